"""Search for phase multipliers ``B`` minimising the worst-case fidelity.

Two strategies share one scoring path:

* ``exhaustive`` walks every sorted ``s``-subset of ``[1, q-1]`` in
  lexicographic order, vectorised over the last element.  Ties keep the first
  (lexicographically smallest) minimiser.
* ``anneal`` runs seeded simulated annealing with single-element replacement
  moves, then hands each restart's best set to a short tabu descent over the
  full one-swap neighbourhood.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .hash_core import HashParams, factor_table, worst_case_x

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**9
_LOG_FLOOR = 1e-300


class BudgetExceeded(RuntimeError):
    def __init__(self, cost: int, budget: int):
        super().__init__(
            f"exhaustive search needs ~{cost:.3e} factor evaluations, budget is {budget:.3e}"
        )
        self.cost = cost
        self.budget = budget


@dataclass
class SearchConfig:
    q: int
    s: int
    method: str = "anneal"
    seed: int = 0
    anneal_iters: int = 20000
    anneal_restarts: int = 16
    initial_temp: float = 0.1
    cooling: float = 0.995
    refine_iters: int = 300
    tabu_tenure: int = 15
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.method not in ("exhaustive", "anneal", "auto"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if not 1 <= self.s < self.q:
            raise ValueError(f"need 1 <= s < q, got s={self.s}, q={self.q}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not 0 < self.cooling < 1:
            raise ValueError("cooling must lie in (0, 1)")
        if self.anneal_restarts < 1 or self.anneal_iters < 0:
            raise ValueError("anneal_restarts must be >= 1 and anneal_iters >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchResult:
    params: HashParams
    worst_fidelity: float
    x_max: int
    evaluations: int
    method: str
    seed: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "worst_fidelity": self.worst_fidelity,
            "x_max": self.x_max,
            "evaluations": self.evaluations,
            "method": self.method,
            "seed": self.seed,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SearchResult":
        return cls(
            params=HashParams.from_dict(d["params"]),
            worst_fidelity=float(d["worst_fidelity"]),
            x_max=int(d["x_max"]),
            evaluations=int(d["evaluations"]),
            method=d["method"],
            seed=int(d["seed"]),
            config=d.get("config", {}),
        )


def evaluate(params: HashParams) -> tuple[float, int]:
    """``(worst_fidelity, x_max)`` of one parameter set."""
    x_max, worst = worst_case_x(params)
    return worst, x_max


def exhaustive_cost(q: int, s: int) -> int:
    return math.comb(q - 1, s) * (q - 1)


@lru_cache(maxsize=8)
def _row_table(q: int) -> np.ndarray:
    """``T[b, i] = factor(b * x_i)`` for ``x_i = 1..q//2``; row 0 unused."""
    xs = np.arange(1, q // 2 + 1)
    f = factor_table(q)
    t = f[(np.arange(q)[:, None] * xs[None, :]) % q]
    t.setflags(write=False)
    return t


@lru_cache(maxsize=8)
def _log_row_table(q: int) -> np.ndarray:
    t = np.log(np.maximum(_row_table(q), _LOG_FLOOR))
    t.setflags(write=False)
    return t


def _exhaustive(cfg: SearchConfig) -> tuple[tuple[int, ...], int]:
    q, s = cfg.q, cfg.s
    cost = exhaustive_cost(q, s)
    if cost > cfg.budget:
        raise BudgetExceeded(cost, cfg.budget)
    table = _row_table(q)
    ones = np.ones(table.shape[1])
    best_val, best_B, evals = math.inf, None, 0
    t0 = time.perf_counter()
    for prefix in itertools.combinations(range(1, q), s - 1):
        start = prefix[-1] + 1 if prefix else 1
        if start > q - 1:
            continue
        prof = ones
        for b in prefix:
            prof = prof * table[b]
        worst = (prof[None, :] * table[start:]).max(axis=1)
        evals += worst.size
        i = int(np.argmin(worst))
        if worst[i] < best_val:
            best_val = float(worst[i])
            best_B = prefix + (start + i,)
            log.info("exhaustive q=%d s=%d best=%.6f B=%s (%d cand, %.0f cand/s)",
                     q, s, best_val, best_B, evals, evals / max(time.perf_counter() - t0, 1e-9))
    return best_B, evals


def _tabu_refine(B: np.ndarray, cfg: SearchConfig, rng: np.random.Generator):
    """Best-improvement tabu walk over all single-element replacements."""
    q, s = cfg.q, cfg.s
    logt = _log_row_table(q)
    half = q // 2
    # b and q-b give the same factor; search the lower half when it has room
    hi = half if 2 * s <= half else q - 1
    B = np.array([b if b <= hi else q - b for b in B], dtype=np.int64)
    taken = set()
    pool = [v for v in range(1, hi + 1) if v not in set(B.tolist())]
    for k in range(s):
        if int(B[k]) in taken:
            B[k] = pool.pop(int(rng.integers(len(pool))))
        taken.add(int(B[k]))

    vals = np.arange(1, hi + 1)
    cand_rows = logt[vals]
    best = float(logt[B].sum(axis=0).max())
    best_B = np.sort(B)
    tabu_until = np.zeros(hi + 1, dtype=np.int64)
    evals = 0
    for it in range(cfg.refine_iters):
        base = logt[B].sum(axis=0)[None, :] - logt[B]
        cand = (base[:, None, :] + cand_rows[None, :, :]).max(axis=2)
        evals += cand.size
        cand[:, B - 1] = np.inf
        tabu = tabu_until[vals] > it
        if tabu.any():
            sub = cand[:, tabu]
            cand[:, tabu] = np.where(sub < best, sub, np.inf)  # aspiration
        j, i = np.unravel_index(int(np.argmin(cand)), cand.shape)
        if not np.isfinite(cand[j, i]):
            break
        tabu_until[B[j]] = it + cfg.tabu_tenure
        B[j] = vals[i]
        if cand[j, i] < best:
            best = float(cand[j, i])
            best_B = np.sort(B)
    return tuple(int(b) for b in best_B), evals


def _anneal_restart(cfg: SearchConfig, rng: np.random.Generator):
    q, s = cfg.q, cfg.s
    table = _row_table(q)
    B = rng.choice(np.arange(1, q), size=s, replace=False)
    used = set(B.tolist())
    cur = float(table[B].prod(axis=0).max())
    best, best_B = cur, B.copy()
    T = cfg.initial_temp
    evals = 1
    for _ in range(cfg.anneal_iters):
        j = int(rng.integers(s))
        v = int(rng.integers(1, q))
        if v not in used:
            old = int(B[j])
            B[j] = v
            new = float(table[B].prod(axis=0).max())
            evals += 1
            if new <= cur or (T > 0 and rng.random() < math.exp(-(new - cur) / T)):
                used.discard(old)
                used.add(v)
                cur = new
                if cur < best:
                    best, best_B = cur, B.copy()
            else:
                B[j] = old
        T *= cfg.cooling
    return best_B, evals


def _anneal(cfg: SearchConfig):
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.anneal_restarts)
    best_val, best_B, evals = math.inf, None, 0
    t0 = time.perf_counter()
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        B, n = _anneal_restart(cfg, rng)
        evals += n
        candidates = [tuple(sorted(int(b) for b in B))]
        if cfg.refine_iters > 0:
            Bt, n = _tabu_refine(B, cfg, rng)
            evals += n
            candidates.append(Bt)
        for cand in candidates:
            val, _ = evaluate(HashParams(cfg.q, cand))
            if val < best_val or (val == best_val and cand < best_B):
                best_val, best_B = val, cand
        log.info("anneal q=%d s=%d restart %d/%d best=%.6f (%.0f cand/s)", cfg.q, cfg.s,
                 r + 1, cfg.anneal_restarts, best_val, evals / max(time.perf_counter() - t0, 1e-9))
    return best_B, evals


def search(config: SearchConfig) -> SearchResult:
    """Run the configured strategy; ``auto`` picks exhaustive when affordable."""
    method = config.method
    if method == "auto":
        method = "exhaustive" if exhaustive_cost(config.q, config.s) <= config.budget else "anneal"
    if method == "exhaustive":
        B, evals = _exhaustive(config)
    else:
        B, evals = _anneal(config)
    params = HashParams(config.q, B)
    worst, x_max = evaluate(params)
    return SearchResult(params, worst, x_max, int(evals), method, config.seed, config.to_dict())

