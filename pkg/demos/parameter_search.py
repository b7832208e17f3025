"""
Choosing the multipliers B
==========================

For small alphabets every sorted subset can be scored.  Beyond a budget the
search switches to seeded annealing followed by a tabu polish.
"""

import logging

from oamhash.param_search import SearchConfig, exhaustive_cost, search

logging.basicConfig(level=logging.WARNING)

# q = 64, s = 2: about 1.2e5 candidates, cheap enough to enumerate
res = search(SearchConfig(q=64, s=2, method="exhaustive"))
print("exhaustive:", res.params.B, round(res.worst_fidelity, 5), "evals", res.evaluations)

# the stochastic search lands on an equally good set
res2 = search(SearchConfig(q=64, s=2, method="anneal", anneal_iters=2000, anneal_restarts=4, seed=1))
print("anneal:    ", res2.params.B, round(res2.worst_fidelity, 5))

# q = 512, s = 4 is far out of reach for enumeration
print(f"cost of enumerating q=512, s=4: {exhaustive_cost(512, 4):.2e}")
res4 = search(SearchConfig(q=512, s=4, method="auto", seed=4, anneal_restarts=4))
print(res4.method, res4.params.B, round(res4.worst_fidelity, 4), "at x =", res4.x_max)

# results round-trip through JSON-friendly dicts
print(res4.to_dict()["params"])
