"""Single-qubit tomography of ``(|l> + e^{i phi}|-l>)/sqrt(2)`` states.

Matrices use the ordering ``(|-l>, |l>)``, so the top-right element of a pure
state with phase ``phi`` is ``e^{+i phi}/2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .photonics import OAMQubit

PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)


def qubit_vector(phi: float) -> np.ndarray:
    """Ket of the ``+-l`` superposition in ``(|-l>, |l>)`` ordering."""
    return np.array([np.exp(1j * phi), 1.0]) / math.sqrt(2.0)


@dataclass(frozen=True)
class DensityMatrix2:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise ValueError("matrix is not Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise ValueError("trace is not 1")
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise ValueError("matrix is not positive semidefinite")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_phase(cls, phi: float) -> "DensityMatrix2":
        v = qubit_vector(phi)
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_qubit(cls, qubit: OAMQubit) -> "DensityMatrix2":
        return cls.from_phase(qubit.phi)

    @classmethod
    def from_bloch(cls, r) -> "DensityMatrix2":
        r = np.asarray(r, dtype=float)
        return cls(0.5 * (np.eye(2) + np.tensordot(r, PAULI, axes=1)))

    def bloch(self) -> np.ndarray:
        return np.real(np.einsum("kij,ji->k", PAULI, self.matrix))

    def __getitem__(self, idx):
        return self.matrix[idx]

    def to_dict(self, uncertainty=None) -> dict:
        out = {"entries": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix]}
        if uncertainty is not None:
            u = np.asarray(uncertainty)
            out["uncertainty"] = [[[float(z.real), float(z.imag)] for z in row] for row in u]
        return out

    def to_json(self, uncertainty=None) -> str:
        return json.dumps(self.to_dict(uncertainty))

    def format(self, uncertainty=None, digits: int = 3) -> str:
        """Two-line text rendering, optionally with +- errors per entry."""
        def cell(i, j):
            z = self.matrix[i, j]
            re, im = z.real, z.imag
            if uncertainty is None:
                if i == j:
                    return f"{re:.{digits}f}"
                return f"{re:.{digits}f} {'+' if im >= 0 else '-'} {abs(im):.{digits}f}i"
            u = uncertainty[i, j]
            if i == j:
                return f"{re:.{digits}f} ± {u.real:.{digits}f}"
            sign = "+" if im >= 0 else "-"
            return (f"{re:.{digits}f} ± {u.real:.{digits}f} {sign} "
                    f"({abs(im):.{digits}f} ± {u.imag:.{digits}f})i")
        return "\n".join(f"[ {cell(i, 0)}   {cell(i, 1)} ]" for i in range(2))


@dataclass(frozen=True)
class TomoSettings:
    """Projective measurement settings; ``phases=None`` means ``|l>`` or ``|-l>``."""

    projectors: tuple = field(default=None)
    labels: tuple = field(default=None)
    shots_per_setting: int = defaults.TOMO_SHOTS
    seed: int = 0

    def __post_init__(self):
        if self.projectors is None:
            labels = ("l", "-l", "phi=0", "phi=pi/2", "phi=pi", "phi=3pi/2")
            kets = [np.array([0.0, 1.0]), np.array([1.0, 0.0])]
            kets += [qubit_vector(t) for t in (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)]
            object.__setattr__(self, "projectors", tuple(np.asarray(k, dtype=complex) for k in kets))
            object.__setattr__(self, "labels", labels)
        elif self.labels is None:
            object.__setattr__(self, "labels", tuple(f"P{i}" for i in range(len(self.projectors))))
        if self.shots_per_setting < 1:
            raise ValueError("shots_per_setting must be >= 1")

    def bloch_directions(self) -> np.ndarray:
        """Bloch vector of each (pure) projector, shape ``(n, 3)``."""
        return np.array([
            np.real(np.einsum("kij,i,j->k", PAULI, k.conj(), k)) / np.vdot(k, k).real
            for k in self.projectors
        ])

    def is_complete(self) -> bool:
        return np.linalg.matrix_rank(self.bloch_directions(), tol=1e-9) == 3


def _as_density(state) -> DensityMatrix2:
    if isinstance(state, DensityMatrix2):
        return state
    if isinstance(state, OAMQubit):
        return DensityMatrix2.from_qubit(state)
    raise TypeError("state must be an OAMQubit or DensityMatrix2")


def probabilities(state, settings: TomoSettings) -> np.ndarray:
    rho = _as_density(state).matrix
    p = np.array([np.vdot(k, rho @ k).real / np.vdot(k, k).real for k in settings.projectors])
    return np.clip(p, 0.0, 1.0)


def simulate_tomo_counts(state, settings: TomoSettings, rng=None) -> np.ndarray:
    """Binomial click counts per setting."""
    if rng is None:
        rng = np.random.default_rng(settings.seed)
    return rng.binomial(settings.shots_per_setting, probabilities(state, settings))


def project_psd(m: np.ndarray) -> np.ndarray:
    """Nearest unit-trace PSD matrix by eigenvalue clipping."""
    m = 0.5 * (m + m.conj().T)
    w, v = np.linalg.eigh(m)
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        raise ValueError("reconstruction has no positive part")
    w /= w.sum()
    out = (v * w) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def reconstruct(counts, settings: TomoSettings) -> DensityMatrix2:
    """Linear inversion to a Bloch vector, then projection onto valid states.

    ``counts`` may be non-integer (e.g. ``shots * probabilities`` for the
    infinite-statistics limit).
    """
    if not settings.is_complete():
        raise ValueError("measurement settings are not informationally complete")
    f = np.asarray(counts, dtype=float) / settings.shots_per_setting
    if f.shape != (len(settings.projectors),):
        raise ValueError("one count per setting expected")
    n = settings.bloch_directions()
    r, *_ = np.linalg.lstsq(n, 2.0 * f - 1.0, rcond=None)
    raw = 0.5 * (np.eye(2) + np.tensordot(r, PAULI, axes=1))
    return DensityMatrix2(project_psd(raw))


def _phase_deg(rho: DensityMatrix2) -> float:
    c = rho.matrix[0, 1]
    if abs(c) <= 1e-6:
        raise ValueError("state has no coherence")
    return math.degrees(math.atan2(c.imag, c.real)) % 360.0


def _wrap_deg(d):
    return (np.asarray(d) + 180.0) % 360.0 - 180.0


def bootstrap(counts, settings: TomoSettings, n_boot: int = defaults.BOOTSTRAP_RESAMPLES,
              seed: int = 0):
    """Parametric bootstrap: resampled reconstructions from the observed frequencies."""
    rng = np.random.default_rng(seed)
    f = np.clip(np.asarray(counts, dtype=float) / settings.shots_per_setting, 0.0, 1.0)
    return [reconstruct(rng.binomial(settings.shots_per_setting, f), settings)
            for _ in range(n_boot)]


def entry_uncertainty(counts, settings: TomoSettings, n_boot: int = defaults.BOOTSTRAP_RESAMPLES,
                      seed: int = 0) -> np.ndarray:
    """Bootstrap std of real and imaginary parts, packed as ``re_std + 1j*im_std``."""
    mats = np.array([r.matrix for r in bootstrap(counts, settings, n_boot, seed)])
    return mats.real.std(axis=0, ddof=1) + 1j * mats.imag.std(axis=0, ddof=1)


def extract_phase(rho: DensityMatrix2, counts=None, settings: TomoSettings | None = None,
                  n_boot: int = defaults.BOOTSTRAP_RESAMPLES, seed: int = 0) -> tuple[float, float]:
    """Relative phase in degrees, ``[0, 360)``, with bootstrap uncertainty.

    Without ``counts`` the uncertainty is reported as 0.
    """
    phase = _phase_deg(rho)
    if counts is None:
        return phase, 0.0
    if settings is None:
        raise ValueError("settings are required to bootstrap from counts")
    boots = np.array([_phase_deg(r) for r in bootstrap(counts, settings, n_boot, seed)])
    return phase, float(_wrap_deg(boots - phase).std(ddof=1))


def trace_distance(a: DensityMatrix2, b: DensityMatrix2) -> float:
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a.matrix - b.matrix)).sum())


@dataclass
class TomographyRun:
    true_phase_deg: float
    counts: np.ndarray
    rho: DensityMatrix2
    uncertainty: np.ndarray
    phase_deg: float
    phase_err_deg: float


def run_tomography(phi: float, settings: TomoSettings | None = None, ell: int = 2,
                   n_boot: int = defaults.BOOTSTRAP_RESAMPLES) -> TomographyRun:
    """Simulate, reconstruct and read out the phase of one prepared qubit."""
    settings = settings or TomoSettings()
    counts = simulate_tomo_counts(OAMQubit(ell, phi), settings)
    rho = reconstruct(counts, settings)
    unc = entry_uncertainty(counts, settings, n_boot, settings.seed + 1)
    ph, err = extract_phase(rho, counts, settings, n_boot, settings.seed + 1)
    return TomographyRun(math.degrees(phi) % 360.0, counts, rho, unc, ph, err)


def phase_step_resolution(phi: float = 2 * math.pi / 3, step: float = math.pi / 256,
                          shots: int = defaults.TOMO_SHOTS, seed: int = 0, ell: int = 2,
                          n_boot: int = defaults.BOOTSTRAP_RESAMPLES):
    """Tomography of ``phi`` and ``phi - step``; returns ``(delta_deg, err_deg, runs)``."""
    a = run_tomography(phi, TomoSettings(shots_per_setting=shots, seed=seed), ell, n_boot)
    b = run_tomography(phi - step, TomoSettings(shots_per_setting=shots, seed=seed + 7919), ell, n_boot)
    delta = float(_wrap_deg(a.phase_deg - b.phase_deg))
    return delta, math.hypot(a.phase_err_deg, b.phase_err_deg), (a, b)
