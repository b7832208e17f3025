"""
Phase hashes and their overlaps
===============================

Each input x becomes s single-qubit states with phases 2*pi*b_j*x/q.  Two
hashes agree with probability equal to their fidelity, which only depends on
the difference of the inputs.
"""

import numpy as np

from oamhash import HashParams, fidelity, quantum_hash, worst_case_x
from oamhash.hash_core import bounds_report, example1_encode, example2_properties, fidelity_profile

params = HashParams(q=512, B=(1, 163, 400))
h = quantum_hash(params, 17)
print("phases of x=17:", np.round(h.phases, 4))

# the fidelity only sees x2 - x1 (mod q)
print(fidelity(params, 3, 20), fidelity(params, 0, 17))

# scanning every shift gives the collision profile; its maximum is the
# probability that the worst pair of distinct inputs is confused
profile = fidelity_profile(params)
x, worst = worst_case_x(params)
print(f"worst shift {x}: fidelity {worst:.4f}, mean over shifts {profile[1:].mean():.4f}")

# number of qubits against collision probability and one-way protection
print(bounds_report(params))

# two extremes for a k-bit word: one rotated qubit hides the word well but
# distinct words overlap strongly; k basis qubits are orthogonal but readable
for k in (2, 4, 8):
    _, delta, eps = example1_encode(1, k)
    print(f"k={k}: one qubit delta={delta:.4f} eps={eps:.4f} | k qubits {example2_properties(k)}")
