"""Physical layer: Laguerre-Gauss modes, OAM qubits, SPDC source and detectors.

Lengths are in metres, times in seconds, rates in counts per second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import defaults

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class LGMode:
    p: int
    ell: int
    w0: float
    wavelength: float

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("radial index p must be >= 0")
        if not (self.w0 > 0 and self.wavelength > 0):
            raise ValueError("w0 and wavelength must be positive")

    @property
    def k(self) -> float:
        return TWO_PI / self.wavelength

    @property
    def rayleigh_range(self) -> float:
        return 0.5 * self.k * self.w0**2

    def width(self, z) -> np.ndarray:
        zr = self.rayleigh_range
        return self.w0 * np.sqrt(1.0 + (np.asarray(z, dtype=float) / zr) ** 2)

    def with_ell(self, ell: int) -> "LGMode":
        return LGMode(self.p, ell, self.w0, self.wavelength)


@dataclass(frozen=True)
class OAMQubit:
    """``(|l> + e^{i phi}|-l>) / sqrt(2)`` with ``l > 0``."""

    ell: int
    phi: float = 0.0

    def __post_init__(self):
        if self.ell <= 0:
            raise ValueError("ell must be a positive charge magnitude")
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    def amplitudes(self) -> np.ndarray:
        return np.array([1.0, np.exp(1j * self.phi)]) / math.sqrt(2.0)


@dataclass(frozen=True)
class SourceModel:
    """Heralded SPDC source.

    ``pair_rate`` is the detected-pair generation rate (per mW times pump
    power), ``heralding_efficiency`` the probability that a pair yields a
    heralding event with its partner photon available for analysis.
    """

    pair_rate: float = defaults.PAIR_RATE_PER_MW * defaults.PUMP_POWER_MW
    heralding_efficiency: float = defaults.HERALDING_EFFICIENCY
    ell_pump: int = 0

    def __post_init__(self):
        if self.pair_rate <= 0:
            raise ValueError("pair_rate must be positive")
        if not 0 < self.heralding_efficiency <= 1:
            raise ValueError("heralding_efficiency must lie in (0, 1]")

    def idler_charge(self, ell_signal: int = 0) -> int:
        """Idler OAM from conservation ``l_p = l_s + l_i``."""
        return self.ell_pump - ell_signal

    @property
    def herald_rate(self) -> float:
        return self.pair_rate * self.heralding_efficiency


@dataclass(frozen=True)
class DetectorModel:
    efficiency: float = 1.0
    dark_rate: float = 0.0
    dead_time: float = 0.0

    def __post_init__(self):
        if not 0 < self.efficiency <= 1:
            raise ValueError("efficiency must lie in (0, 1]")
        if self.dark_rate < 0 or self.dead_time < 0:
            raise ValueError("dark_rate and dead_time must be >= 0")

    @property
    def is_ideal(self) -> bool:
        return self.efficiency == 1.0 and self.dark_rate == 0.0 and self.dead_time == 0.0


IDEAL_DETECTOR = DetectorModel()
SPD1 = DetectorModel(*defaults.SPD1)
SPD2 = DetectorModel(*defaults.SPD2)


def laguerre(p: int, alpha: float, x) -> np.ndarray:
    """Generalised Laguerre polynomial ``L_p^alpha(x)`` by upward recurrence."""
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if p == 0:
        return prev
    cur = 1.0 + alpha - x
    for n in range(1, p):
        prev, cur = cur, ((2 * n + 1 + alpha - x) * cur - (n + alpha) * prev) / (n + 1)
    return cur


def gouy_phase(mode: LGMode, z) -> np.ndarray:
    """``(|l| + 2p + 1) * arctan(z / z_R)``."""
    order = abs(mode.ell) + 2 * mode.p + 1
    return order * np.arctan(np.asarray(z, dtype=float) / mode.rayleigh_range)


def lg_amplitude(mode: LGMode, rho, phi, z=0.0) -> np.ndarray:
    """Complex LG_p^l field in cylindrical coordinates, unit power."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("rho must be non-negative")
    phi = np.asarray(phi, dtype=float)
    z = float(z)
    al = abs(mode.ell)
    w = float(mode.width(z))
    zr = mode.rayleigh_range
    norm = math.sqrt(2.0 * math.factorial(mode.p) / (math.pi * math.factorial(al + mode.p))) / w
    u = math.sqrt(2.0) * rho / w
    radial = norm * u**al * laguerre(mode.p, al, u * u) * np.exp(-(rho * rho) / (w * w))
    curvature = -mode.k * rho * rho * z / (2.0 * (zr * zr + z * z))
    phase = curvature + mode.ell * phi - float(gouy_phase(mode, z))
    return radial * np.exp(1j * phase)


def polar_quadrature(mode: LGMode, z: float = 0.0, n_r: int = 400, n_phi: int = 64,
                     r_max_widths: float = 12.0):
    """Nodes and weights for integrating over the transverse plane.

    Gauss-Legendre in ``rho`` on ``[0, r_max_widths * w(z)]``, uniform in
    ``phi`` (exact for azimuthal orders below ``n_phi / 2``).
    """
    w = float(mode.width(z))
    x, wx = np.polynomial.legendre.leggauss(n_r)
    r_max = r_max_widths * w
    rho = 0.5 * r_max * (x + 1.0)
    w_rho = 0.5 * r_max * wx * rho
    phi = TWO_PI * np.arange(n_phi) / n_phi
    R, P = np.meshgrid(rho, phi, indexing="ij")
    W = np.outer(w_rho, np.full(n_phi, TWO_PI / n_phi))
    return R, P, W


def mode_overlap(a: LGMode, b: LGMode, z: float = 0.0, **quad) -> complex:
    """``integral A_a * conj(A_b) dA`` over the transverse plane."""
    R, P, W = polar_quadrature(a, z, **quad)
    return complex(np.sum(W * lg_amplitude(a, R, P, z) * np.conj(lg_amplitude(b, R, P, z))))


def mode_norm(mode: LGMode, z: float = 0.0, **quad) -> float:
    return mode_overlap(mode, mode, z, **quad).real


def make_grid(mode: LGMode, z: float = 0.0, n: int = defaults.GRID_POINTS,
              extent_widths: float = defaults.GRID_EXTENT_WIDTHS):
    """Square Cartesian grid ``n x n`` spanning ``+-extent_widths * w(z)``."""
    half = extent_widths * float(mode.width(z))
    axis = np.linspace(-half, half, n)
    return np.meshgrid(axis, axis, indexing="xy")


def superposition_field(qubit: OAMQubit, template: LGMode, grid, z: float = 0.0) -> np.ndarray:
    X, Y = (np.asarray(g, dtype=float) for g in grid)
    if X.size == 0:
        raise ValueError("empty grid")
    rho = np.hypot(X, Y)
    ang = np.arctan2(Y, X)
    plus = lg_amplitude(template.with_ell(qubit.ell), rho, ang, z)
    minus = lg_amplitude(template.with_ell(-qubit.ell), rho, ang, z)
    return (plus + np.exp(1j * qubit.phi) * minus) / math.sqrt(2.0)


def superposition_intensity(qubit: OAMQubit, template: LGMode, grid, z: float = 0.0) -> np.ndarray:
    """Intensity of the ``+-l`` superposition; ``2|l|`` petals rotated by ``phi/(2l)``."""
    return np.abs(superposition_field(qubit, template, grid, z)) ** 2


def projection_probability(prepared: OAMQubit, analyzed: OAMQubit) -> float:
    """``|<analyzed|prepared>|^2 = cos^2((phi2 - phi1)/2)`` within one basis pair."""
    if prepared.ell != analyzed.ell:
        raise ValueError(
            f"cross-basis projection (l={prepared.ell} vs l={analyzed.ell}) is not modelled"
        )
    return math.cos(0.5 * (analyzed.phi - prepared.phi)) ** 2


def optimal_waists(crystal_length: float, lambda_pump: float) -> tuple[float, float]:
    """Pump waist ``sqrt(L/k_p)`` and down-converted waist ``sqrt(2)`` times it."""
    if crystal_length <= 0 or lambda_pump <= 0:
        raise ValueError("crystal_length and lambda_pump must be positive")
    w_p = math.sqrt(crystal_length * lambda_pump / TWO_PI)
    return w_p, math.sqrt(2.0) * w_p


def _dead_time_filter(times: np.ndarray, dead_time: float) -> np.ndarray:
    """Non-paralysable dead time on a sorted stream; returns a keep mask."""
    keep = np.zeros(times.size, dtype=bool)
    if dead_time <= 0:
        keep[:] = True
        return keep
    ready = -math.inf
    for i, t in enumerate(times.tolist()):
        if t >= ready:
            keep[i] = True
            ready = t + dead_time
    return keep


def simulate_coincidences(source: SourceModel, herald_det: DetectorModel,
                          idler_det: DetectorModel, projection_prob: float,
                          duration: float, seed=None, rng=None,
                          window: float = defaults.COINCIDENCE_WINDOW) -> tuple[int, int]:
    """Herald singles and herald-idler coincidences over ``duration`` seconds.

    Photon arrivals are a Poisson process at ``source.herald_rate``.  Each
    heralding photon is registered with the herald detector efficiency; its
    partner passes the analyser with ``projection_prob`` and is registered with
    the idler efficiency.  Dark counts are Poisson on both channels, both
    channels lose events to non-paralysable dead time, and a coincidence is any
    herald click with an idler click within ``window``.  Pass either ``seed``
    or a ``numpy.random.Generator``.
    """
    if not 0.0 <= projection_prob <= 1.0:
        raise ValueError("projection_prob must lie in [0, 1]")
    if duration <= 0:
        raise ValueError("duration must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)

    n_pairs = rng.poisson(source.herald_rate * duration)
    if (herald_det.dark_rate == 0 and idler_det.dark_rate == 0
            and herald_det.dead_time == 0 and idler_det.dead_time == 0):
        # no timing effects: thinning of a Poisson process stays Poisson
        heralds = rng.binomial(n_pairs, herald_det.efficiency)
        coinc = rng.binomial(heralds, idler_det.efficiency * projection_prob)
        return int(heralds), int(coinc)

    t_pair = np.sort(rng.uniform(0.0, duration, n_pairs))
    h_real = rng.random(n_pairs) < herald_det.efficiency
    i_real = rng.random(n_pairs) < idler_det.efficiency * projection_prob

    h_dark = rng.uniform(0.0, duration, rng.poisson(herald_det.dark_rate * duration))
    i_dark = rng.uniform(0.0, duration, rng.poisson(idler_det.dark_rate * duration))

    h_times = np.concatenate([t_pair[h_real], h_dark])
    i_times = np.concatenate([t_pair[i_real], i_dark])
    h_times.sort(kind="stable")
    i_times.sort(kind="stable")
    h_times = h_times[_dead_time_filter(h_times, herald_det.dead_time)]
    i_times = i_times[_dead_time_filter(i_times, idler_det.dead_time)]

    if h_times.size == 0 or i_times.size == 0:
        return int(h_times.size), 0
    lo = np.searchsorted(i_times, h_times - window, side="left")
    hi = np.searchsorted(i_times, h_times + window, side="right")
    return int(h_times.size), int(np.count_nonzero(hi > lo))


def duration_for_heralds(source: SourceModel, herald_det: DetectorModel, n_heralds: float) -> float:
    """Integration time giving ``n_heralds`` expected herald clicks (dark counts ignored)."""
    return n_heralds / (source.herald_rate * herald_det.efficiency)


def coincidence_sweep(ell: int, phases, n_heralds: float = 1e4, source: SourceModel | None = None,
                      herald_det: DetectorModel = IDEAL_DETECTOR,
                      idler_det: DetectorModel = IDEAL_DETECTOR, seed: int = 0,
                      window: float = defaults.COINCIDENCE_WINDOW) -> np.ndarray:
    """Projection sweep: prepare ``phi1 = 0``, analyse at each ``phi2`` in ``phases``.

    Returns rows ``(phase, heralds, coincidences)``.
    """
    source = source or SourceModel()
    duration = duration_for_heralds(source, herald_det, n_heralds)
    prepared = OAMQubit(ell, 0.0)
    seeds = np.random.SeedSequence([seed, ell]).spawn(len(phases))
    rows = []
    for ph, ss in zip(phases, seeds):
        p = projection_probability(prepared, OAMQubit(ell, ph))
        h, c = simulate_coincidences(source, herald_det, idler_det, p, duration,
                                     rng=np.random.default_rng(ss), window=window)
        rows.append((float(ph), h, c))
    return np.array(rows, dtype=float)


def fit_fringe(phases, normalized_rate) -> dict:
    """Least-squares fit of ``a + b cos(d) + c sin(d)``.

    Visibility is ``sqrt(b^2 + c^2) / a`` and the fitted offset phase
    ``atan2(c, b)``; the max deviation is measured against the ideal
    ``cos^2(d/2)`` curve.
    """
    d = np.asarray(phases, dtype=float)
    y = np.asarray(normalized_rate, dtype=float)
    A = np.column_stack([np.ones_like(d), np.cos(d), np.sin(d)])
    (a, b, c), *_ = np.linalg.lstsq(A, y, rcond=None)
    return {
        "offset": float(a),
        "amplitude": float(math.hypot(b, c)),
        "phase_shift": float(math.atan2(c, b)),
        "visibility": float(math.hypot(b, c) / a) if a > 0 else 0.0,
        "max_deviation": float(np.max(np.abs(y - np.cos(0.5 * d) ** 2))),
    }
