"""Phase-encoded quantum hash over single-photon qubits.

An input ``x`` in ``{0, ..., q-1}`` is mapped to ``s`` qubits, the ``j``-th one
carrying the relative phase ``2*pi*b_j*x/q`` between the ``|l>`` and ``|-l>``
components.  All fidelities here are evaluated through a symmetrised cosine
table indexed by ``(b_j * dx) mod q`` so that shift invariance and the
``x <-> q - x`` symmetry hold bit-for-bit, not just to rounding.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

#: Assumption recorded alongside every bound this module reports.
BOUND_INTERPRETATION = (
    "theoretical error bound = worst-case fidelity |<psi(0)|psi(x_max)>|^2 "
    "(squared overlap), i.e. the REVERSE-test acceptance bound eps^2"
)


@dataclass(frozen=True)
class HashParams:
    """One hash function instance: modulus ``q`` and phase multipliers ``B``.

    ``B`` is stored sorted ascending; ``s`` is implied by ``len(B)`` and may be
    passed explicitly as a consistency check.
    """

    q: int
    B: tuple[int, ...]
    s: int = field(default=-1)

    def __post_init__(self):
        q = int(self.q)
        B = tuple(sorted(int(b) for b in self.B))
        s = len(B) if self.s == -1 else int(self.s)
        if q < 2:
            raise ValueError(f"modulus q must be >= 2, got {q}")
        if s < 1:
            raise ValueError("at least one qubit is required")
        if s != len(B):
            raise ValueError(f"s={s} does not match len(B)={len(B)}")
        if len(set(B)) != len(B):
            raise ValueError(f"B entries must be pairwise distinct: {B}")
        if B[0] < 1 or B[-1] > q - 1:
            raise ValueError(f"B entries must lie in [1, {q - 1}]: {B}")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "s", s)

    def to_dict(self) -> dict:
        return {"q": self.q, "s": self.s, "B": list(self.B)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "HashParams":
        return cls(q=d["q"], B=tuple(d["B"]), s=d.get("s", -1))

    @classmethod
    def from_json(cls, text: str) -> "HashParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class QuantumHash:
    """A hash value: one relative phase per qubit, reduced to ``[0, 2*pi)``."""

    phases: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "phases", tuple(float(p) % TWO_PI for p in self.phases)
        )

    @property
    def s(self) -> int:
        return len(self.phases)

    def amplitudes(self) -> np.ndarray:
        """Per-qubit amplitudes ``(1, e^{i phi}) / sqrt(2)``, shape ``(s, 2)``."""
        ph = np.asarray(self.phases)
        out = np.empty((len(ph), 2), dtype=complex)
        out[:, 0] = 1.0
        out[:, 1] = np.exp(1j * ph)
        return out / math.sqrt(2.0)

    def state_vector(self) -> np.ndarray:
        """Full ``2**s`` tensor-product state (small ``s`` only)."""
        vec = np.ones(1, dtype=complex)
        for amp in self.amplitudes():
            vec = np.kron(vec, amp)
        return vec

    def isclose(self, other: "QuantumHash", tol: float = 1e-12) -> bool:
        if self.s != other.s:
            return False
        d = np.abs(np.asarray(self.phases) - np.asarray(other.phases)) % TWO_PI
        return bool(np.all(np.minimum(d, TWO_PI - d) <= tol))

    def to_json(self) -> str:
        body = ", ".join(format(p, ".17g") for p in self.phases)
        return '{"phases": [' + body + "]}"

    @classmethod
    def from_json(cls, text: str) -> "QuantumHash":
        return cls(tuple(json.loads(text)["phases"]))


@dataclass(frozen=True)
class BoundsReport:
    epsilon: float
    worst_fidelity: float
    delta: float
    swap_error: float
    reverse_error: float
    x_max: int | None = None
    assumption: str = BOUND_INTERPRETATION


@lru_cache(maxsize=64)
def _cos_table(q: int) -> np.ndarray:
    # cos(2*pi*k/q), forced exactly even in k so f(x) == f(q - x) bitwise
    k = np.arange(q)
    c = np.cos(TWO_PI * k / q)
    c = 0.5 * (c + c[(-k) % q])
    c[0] = 1.0
    c.setflags(write=False)
    return c


@lru_cache(maxsize=64)
def factor_table(q: int) -> np.ndarray:
    """``(1 + cos(2*pi*k/q)) / 2`` for ``k = 0..q-1`` (read-only)."""
    f = 0.5 * (1.0 + _cos_table(q))
    f.setflags(write=False)
    return f


def _check_input(params: HashParams, x, name: str = "x") -> int:
    if isinstance(x, (bool, np.bool_)) or not isinstance(x, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {type(x).__name__}")
    x = int(x)
    if not 0 <= x < params.q:
        raise ValueError(f"{name}={x} outside [0, {params.q - 1}]")
    return x


def hash(params: HashParams, x: int) -> QuantumHash:  # noqa: A001
    """Quantum hash of ``x``; phases ``2*pi*((b_j*x) mod q)/q``."""
    x = _check_input(params, x)
    return QuantumHash(tuple(TWO_PI * ((b * x) % params.q) / params.q for b in params.B))


def _fidelity_diff(params: HashParams, dx: int) -> float:
    f = factor_table(params.q)
    out = 1.0
    for b in params.B:
        out *= float(f[(b * dx) % params.q])
    return out


def fidelity(params: HashParams, x1: int, x2: int) -> float:
    """``|<psi(x1)|psi(x2)>|^2 = prod_j (1 + cos(2*pi*b_j*(x2-x1)/q)) / 2``."""
    x1 = _check_input(params, x1, "x1")
    x2 = _check_input(params, x2, "x2")
    return _fidelity_diff(params, (x2 - x1) % params.q)


def overlap_magnitude(params: HashParams, x1: int, x2: int) -> float:
    return math.sqrt(fidelity(params, x1, x2))


def inner_product(params: HashParams, x1: int, x2: int) -> complex:
    """Explicit ``<psi(x1)|psi(x2)>`` as a product of per-qubit overlaps."""
    a = hash(params, x1).amplitudes()
    b = hash(params, x2).amplitudes()
    return complex(np.prod(np.sum(a.conj() * b, axis=1)))


def fidelity_profile(params: HashParams, xs=None) -> np.ndarray:
    """Vectorised ``fidelity(params, 0, x)`` over ``xs`` (default all of Z_q)."""
    q = params.q
    xs = np.arange(q) if xs is None else np.asarray(xs, dtype=np.int64)
    f = factor_table(q)
    out = np.ones(xs.shape)
    for b in params.B:
        out = out * f[(b * xs) % q]
    return out


def worst_case_x(params: HashParams) -> tuple[int, float]:
    """Nonzero input with the largest fidelity against ``psi(0)``.

    Only ``x <= q/2`` is scanned: ``f(x) == f(q - x)`` exactly, so the smallest
    maximiser always lies there.
    """
    xs = np.arange(1, params.q // 2 + 1)
    prof = fidelity_profile(params, xs)
    i = int(np.argmax(prof))  # first occurrence -> smallest x
    return int(xs[i]), float(prof[i])


def one_way_delta(s: int, alphabet_size: int) -> float:
    """Holevo-type bound ``min(1, 2**s / |X|)`` on decoding probability."""
    if s < 1 or alphabet_size < 1:
        raise ValueError("s and alphabet_size must be >= 1")
    # exact for power-of-two alphabets
    return min(1.0, math.ldexp(1.0, s) / alphabet_size)


def test_error_bounds(epsilon: float) -> tuple[float, float]:
    """SWAP- and REVERSE-test acceptance bounds for overlap ``epsilon``."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    e2 = epsilon * epsilon
    return 0.5 * (1.0 + e2), e2


# keep pytest from collecting the bound helper when imported into test modules
test_error_bounds.__test__ = False


def bounds_report(params: HashParams) -> BoundsReport:
    x_max, worst = worst_case_x(params)
    eps = math.sqrt(worst)
    swap, reverse = test_error_bounds(eps)
    return BoundsReport(
        epsilon=eps,
        worst_fidelity=eps * eps,
        delta=one_way_delta(params.s, params.q),
        swap_error=swap,
        reverse_error=reverse,
        x_max=x_max,
    )


def example1_encode(w: int, k: int) -> tuple[np.ndarray, float, float]:
    """Single-qubit rotation encoding of a ``k``-bit word.

    Returns the real amplitude pair ``(cos(pi*w/2^k), sin(pi*w/2^k))`` with
    its one-way bound ``2/2^k`` and overlap bound ``cos(pi/2^k)``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 <= w < 2**k:
        raise ValueError(f"w={w} outside [0, {2**k - 1}]")
    angle = math.pi * w / 2**k
    state = np.array([math.cos(angle), math.sin(angle)])
    return state, 2.0 / 2**k, math.cos(math.pi / 2**k)


def example2_properties(k: int) -> tuple[float, float]:
    """Basis encoding ``|w>`` on ``k`` qubits: ``(delta, epsilon) = (1, 0)``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0, 0.0


def make_params(q: int, B: Sequence[int]) -> HashParams:
    return HashParams(q=q, B=tuple(B))
