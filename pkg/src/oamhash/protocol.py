"""Monte-Carlo model of hash verification with heralded OAM qubits.

Two views of the same experiment are provided.  :func:`verify` simulates the
ideal protocol photon by photon: each received qubit is projected onto the
expected state or its orthogonal complement and the hash is accepted only if
every qubit lands on the expected outcome.  :func:`calibrate` and
:func:`estimate_error_rate` reproduce the statistical procedure used in the
lab, where the acceptance probability is read off coincidence rates relative
to a borderline taken from equal-state runs.

Every random draw comes from a generator seeded by ``(seed, label, ...)`` so
results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import math
import zlib
from dataclasses import dataclass, field, replace
from importlib import resources

import numpy as np

from . import defaults
from .hash_core import HashParams, factor_table, _check_input
from .photonics import (
    IDEAL_DETECTOR, SPD1, SPD2, DetectorModel, SourceModel, simulate_coincidences,
)

LOSS_POLICIES = ("resend", "accept")

#: Note attached to outputs produced with ``loss_policy="accept"``.
ACCEPT_POLICY_NOTE = "lost qubits are counted as matches, which can only raise the acceptance rate"


@dataclass(frozen=True)
class ProtocolConfig:
    params: HashParams
    ell: int = 1
    trials_per_point: int = defaults.TRIALS_PER_POINT
    calibration_iterations: int = defaults.CALIBRATION_ITERATIONS
    loss_policy: str = "resend"
    source: SourceModel = field(default_factory=SourceModel)
    herald_det: DetectorModel = SPD1
    hash_det: DetectorModel = SPD2
    seed: int = 0
    trial_duration: float = defaults.TRIAL_DURATION
    window: float = defaults.COINCIDENCE_WINDOW
    max_resends: int = defaults.MAX_RESENDS
    bootstrap_resamples: int = defaults.BOOTSTRAP_RESAMPLES

    def __post_init__(self):
        if self.trials_per_point < 1 or self.calibration_iterations < 1:
            raise ValueError("trials_per_point and calibration_iterations must be >= 1")
        if self.loss_policy not in LOSS_POLICIES:
            raise ValueError(f"loss_policy must be one of {LOSS_POLICIES}")
        if self.ell <= 0:
            raise ValueError("ell must be a positive charge magnitude")
        if self.trial_duration <= 0:
            raise ValueError("trial_duration must be positive")

    @classmethod
    def ideal(cls, params: HashParams, **kw) -> "ProtocolConfig":
        """Lossless, noiseless detectors on both channels."""
        kw.setdefault("herald_det", IDEAL_DETECTOR)
        kw.setdefault("hash_det", IDEAL_DETECTOR)
        return cls(params=params, **kw)

    def with_(self, **kw) -> "ProtocolConfig":
        return replace(self, **kw)


@dataclass
class VerificationOutcome:
    verdict: str
    per_qubit: list[str]
    resend_count: int = 0

    @property
    def accepted(self) -> bool:
        return self.verdict == "equal"


@dataclass
class CalibrationResult:
    threshold: float
    iteration_means: list[float]
    samples: np.ndarray = field(repr=False, default=None)  # (iterations, trials) rates


@dataclass
class ErrorRateEstimate:
    rate: float
    stderr: float
    raw_ratio: float
    per_qubit_ratio: list[float]
    x: int


def _label(name: str) -> int:
    return zlib.crc32(name.encode())


def sub_rng(seed: int, label: str, *index: int) -> np.random.Generator:
    """Generator for one stream, keyed by master seed, label and indices."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), _label(label), *map(int, index)]))


def match_probabilities(params: HashParams, x1: int, x2: int) -> np.ndarray:
    """Per-qubit ``|<psi_j(x2)|psi_j(x1)>|^2``."""
    x1 = _check_input(params, x1, "x1")
    x2 = _check_input(params, x2, "x2")
    f = factor_table(params.q)
    d = (x2 - x1) % params.q
    return np.array([f[(b * d) % params.q] for b in params.B])


def verify(config: ProtocolConfig, x1: int, x2: int, trial: int = 0) -> VerificationOutcome:
    """Compare a received hash of ``x1`` against the expected hash of ``x2``.

    Each qubit hits the "same" detector with probability ``eta * p_match``,
    the orthogonal detector with ``eta * (1 - p_match)`` and is lost
    otherwise, ``eta`` being the hash-channel efficiency.
    """
    p_match = match_probabilities(config.params, x1, x2)
    eta = config.hash_det.efficiency
    rng = sub_rng(config.seed, "verify", x1, x2, trial)
    per_qubit, resends = [], 0
    for p in p_match:
        while True:
            u = rng.random()
            if u < eta * p:
                per_qubit.append("match")
                break
            if u < eta:
                per_qubit.append("mismatch")
                break
            if config.loss_policy == "accept":
                per_qubit.append("lost")
                break
            resends += 1
            if resends > config.max_resends:
                raise RuntimeError(f"qubit still lost after {config.max_resends} resends")
    verdict = "not_equal" if "mismatch" in per_qubit else "equal"
    return VerificationOutcome(verdict, per_qubit, resends)


def acceptance_frequency(config: ProtocolConfig, x1: int, x2: int, trials: int) -> tuple[float, float]:
    """Fraction of ``trials`` verifications answering "equal", with binomial stderr."""
    hits = sum(verify(config, x1, x2, t).accepted for t in range(trials))
    freq = hits / trials
    return freq, math.sqrt(freq * (1.0 - freq) / trials)


def _rate(config: ProtocolConfig, p: float, rng: np.random.Generator) -> tuple[int, float]:
    heralds, coinc = simulate_coincidences(
        config.source, config.herald_det, config.hash_det, float(p),
        config.trial_duration, rng=rng, window=config.window,
    )
    return heralds, coinc / config.trial_duration


def calibrate(config: ProtocolConfig) -> CalibrationResult:
    """Borderline rate from repeated equal-state comparisons.

    Runs ``calibration_iterations`` batches of ``trials_per_point`` rate
    measurements of ``psi(0)`` against itself and keeps the smallest batch
    mean, the setting in which equal and unequal states are easiest to
    confuse.
    """
    samples = np.empty((config.calibration_iterations, config.trials_per_point))
    for i in range(config.calibration_iterations):
        heralds = 0
        for t in range(config.trials_per_point):
            h, r = _rate(config, 1.0, sub_rng(config.seed, "calibrate", config.ell, i, t))
            heralds += h
            samples[i, t] = r
        if heralds == 0:
            raise RuntimeError(
                f"calibration batch {i} saw no heralding events; increase trial_duration"
            )
    means = samples.mean(axis=1)
    return CalibrationResult(float(means.min()), means.tolist(), samples)


def _bootstrap_threshold(samples: np.ndarray, rng: np.random.Generator) -> float:
    n_it, n_tr = samples.shape
    idx = rng.integers(n_tr, size=(n_it, n_tr))
    return float(np.take_along_axis(samples, idx, axis=1).mean(axis=1).min())


def estimate_error_rate(config: ProtocolConfig, x: int, repetitions: int,
                        calibration: CalibrationResult | None = None) -> ErrorRateEstimate:
    """Fidelity estimate of ``psi(x)`` against ``psi(0)`` from coincidence rates.

    For each qubit the mean coincidence rate over ``repetitions`` is divided by
    the calibration threshold; the hash-level estimate is the product of these
    ratios, clamped to ``[0, 1]``.  The standard error is a bootstrap over both
    the comparison repetitions and the calibration trials.
    """
    if calibration is None:
        raise ValueError("calibration missing: run calibrate(config) first")
    if x == 0:
        raise ValueError("x must be nonzero")
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    p = match_probabilities(config.params, 0, x)
    rates = np.empty((repetitions, len(p)))
    for r in range(repetitions):
        for j, pj in enumerate(p):
            rates[r, j] = _rate(config, pj, sub_rng(config.seed, "estimate", config.ell, x, r, j))[1]

    thr = calibration.threshold
    ratios = rates.mean(axis=0) / thr
    raw = float(np.prod(ratios))

    rng = sub_rng(config.seed, "bootstrap", config.ell, x)
    boots = np.empty(config.bootstrap_resamples)
    for k in range(config.bootstrap_resamples):
        idx = rng.integers(repetitions, size=repetitions)
        t = thr if calibration.samples is None else _bootstrap_threshold(calibration.samples, rng)
        boots[k] = min(1.0, float(np.prod(rates[idx].mean(axis=0) / t)))
    return ErrorRateEstimate(
        rate=min(1.0, max(0.0, raw)),
        stderr=float(boots.std(ddof=1)) if boots.size > 1 else 0.0,
        raw_ratio=raw,
        per_qubit_ratio=ratios.tolist(),
        x=int(x),
    )


# -- Table reproduction ---------------------------------------------------

TABLE_COLUMNS = [
    "s", "x_max", "bound_theory",
    "rate_l1", "stderr_l1", "verdict_l1",
    "rate_l2", "stderr_l2", "verdict_l2",
    "rate_l3", "stderr_l3", "verdict_l3",
    "ref_x", "ref_bound", "ref_l1", "ref_l2", "ref_l3",
    "status",
]


def load_reference_table() -> dict[int, dict]:
    """Reference worst-case table, keyed by hash size ``s``."""
    text = resources.files("oamhash.data").joinpath("table1_reference.csv").read_text()
    rows = {}
    for row in csv.DictReader(text.splitlines()):
        rows[int(row["s"])] = {
            "x_max": int(row["x_max"]),
            "bound": float(row["bound_theory"]),
            "l1": float(row["exp_l1"]),
            "l2": float(row["exp_l2"]),
            "l3": float(row["exp_l3"]),
        }
    return rows


def reproduce_table(template: ProtocolConfig, results: dict, s_range=range(2, 9),
                    ells=(1, 2, 3), repetitions: int | None = None) -> list[dict]:
    """One row per ``s``: theoretical bound, simulated rate per basis, reference data.

    ``results`` maps ``s`` to an object with ``params`` (e.g. a
    :class:`~oamhash.param_search.SearchResult`); missing entries produce a row
    with ``status="incomplete"``.  ``template.params`` is ignored.
    """
    from .hash_core import worst_case_x

    repetitions = repetitions or template.trials_per_point
    ref = load_reference_table()
    calibrations = {ell: calibrate(template.with_(ell=ell)) for ell in ells}
    rows = []
    for s in s_range:
        known = ref.get(s, {})
        row = {c: "" for c in TABLE_COLUMNS}
        row.update(s=s, ref_x=known.get("x_max", ""), ref_bound=known.get("bound", ""),
                   ref_l1=known.get("l1", ""), ref_l2=known.get("l2", ""),
                   ref_l3=known.get("l3", ""))
        res = results.get(s)
        if res is None:
            row["status"] = "incomplete"
            rows.append(row)
            continue
        x_max, bound = worst_case_x(res.params)
        row.update(x_max=x_max, bound_theory=bound, status="ok")
        for ell in ells:
            cfg = template.with_(params=res.params, ell=ell)
            est = estimate_error_rate(cfg, x_max, repetitions, calibrations[ell])
            row[f"rate_l{ell}"] = est.rate
            row[f"stderr_l{ell}"] = est.stderr
            row[f"verdict_l{ell}"] = "equal" if est.raw_ratio >= 1.0 else "not_equal"
        rows.append(row)
    return rows
