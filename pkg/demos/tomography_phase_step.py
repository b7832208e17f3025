"""
Reading a phase back with tomography
====================================

Six projective settings fix a qubit's density matrix.  With 1e5 shots per
setting the reconstruction is good enough to see a pi/256 phase step.
"""

import math

from oamhash.tomography import DensityMatrix2, TomoSettings, phase_step_resolution, run_tomography

phi = 2 * math.pi / 3
run = run_tomography(phi, TomoSettings(shots_per_setting=100_000, seed=1))
print("expected\n" + DensityMatrix2.from_phase(phi).format())
print("reconstructed\n" + run.rho.format(run.uncertainty))
print(f"phase {run.phase_deg:.2f} +- {run.phase_err_deg:.2f} deg")

delta, err, _ = phase_step_resolution(phi, math.pi / 256, seed=5)
print(f"step: {delta:.3f} +- {err:.3f} deg (nominal {180 / 256:.3f})")
