"""
Verifying a hash
================

A receiver projects each incoming qubit on the state it expects.  Equal inputs
always pass.  Distinct inputs pass with probability equal to their fidelity.
The lab procedure instead calibrates a coincidence-rate borderline and reads
the fidelity off rate ratios.
"""

from oamhash import HashParams, fidelity, worst_case_x
from oamhash.protocol import (
    ProtocolConfig, acceptance_frequency, calibrate, estimate_error_rate, verify,
)

params = HashParams(512, (1, 76, 131, 201))
x_max, bound = worst_case_x(params)

cfg = ProtocolConfig(params)  # lab detectors, lost qubits are resent
out = verify(cfg, 5, 5 + x_max)
print(out.verdict, out.per_qubit, "resends:", out.resend_count)

ideal = ProtocolConfig.ideal(params)
f, se = acceptance_frequency(ideal, 0, x_max, 5000)
print(f"acceptance at the worst shift {f:.4f} +- {se:.4f}, theory {bound:.4f}")

# rate-ratio estimate; the borderline is the lowest of 10 batch means,
# which tilts the ratio slightly upward
cal = calibrate(ideal)
est = estimate_error_rate(ideal, x_max, 100, cal)
print(f"threshold {cal.threshold:.1f}/s, estimate {est.rate:.4f} +- {est.stderr:.4f}")

# dropping lost qubits instead of resending them makes acceptance easier
lossy = cfg.with_(loss_policy="accept")
print("accept policy:", acceptance_frequency(lossy, 0, x_max, 2000)[0],
      "vs fidelity", round(fidelity(params, 0, x_max), 4))
