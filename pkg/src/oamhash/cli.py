"""``oamhash`` command-line entry point.

Subcommands: optimize, table, curve, lgmap, tomo, verify, replay.  Every data
file lands in ``--out`` (or ``$OAMHASH_OUT``, or the working directory)
together with a ``manifest_<command>.json``; replaying a manifest rewrites the
same data files byte for byte.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, defaults
from .hash_core import HashParams, bounds_report, fidelity, hash as quantum_hash
from .param_search import BudgetExceeded, SearchConfig, SearchResult, search
from .photonics import (
    IDEAL_DETECTOR, DetectorModel, LGMode, OAMQubit, SourceModel,
    coincidence_sweep, fit_fringe, gouy_phase, lg_amplitude, make_grid,
    superposition_field,
)
from .protocol import (
    ACCEPT_POLICY_NOTE, TABLE_COLUMNS, ProtocolConfig, reproduce_table, verify,
)
from .runio import RunManifest, component_seed, output_dir, write_csv, write_json, write_raster
from .tomography import DensityMatrix2, phase_step_resolution, run_tomography

log = logging.getLogger("oamhash")


class CLIError(Exception):
    pass


# -- shared option groups --------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", default=None, help="output directory (default $OAMHASH_OUT or .)")
    p.add_argument("--config", default=None, help="JSON file with option overrides")


def _add_detectors(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("source and detectors")
    g.add_argument("--ideal", action="store_true", help="unit efficiency, no dark counts, no dead time")
    g.add_argument("--pair-rate", type=float, default=defaults.PAIR_RATE_PER_MW)
    g.add_argument("--pump-mw", type=float, default=defaults.PUMP_POWER_MW)
    g.add_argument("--heralding-eff", type=float, default=defaults.HERALDING_EFFICIENCY)
    g.add_argument("--herald-det", type=float, nargs=3, default=list(defaults.SPD1),
                   metavar=("EFF", "DARK", "DEAD"))
    g.add_argument("--hash-det", type=float, nargs=3, default=list(defaults.SPD2),
                   metavar=("EFF", "DARK", "DEAD"))
    g.add_argument("--window", type=float, default=defaults.COINCIDENCE_WINDOW)


def _source(a) -> SourceModel:
    return SourceModel(a.pair_rate * a.pump_mw, a.heralding_eff)


def _detectors(a) -> tuple[DetectorModel, DetectorModel]:
    if a.ideal:
        return IDEAL_DETECTOR, IDEAL_DETECTOR
    return DetectorModel(*a.herald_det), DetectorModel(*a.hash_det)


def _params_from(a) -> HashParams:
    if a.params:
        d = json.loads(Path(a.params).read_text())
        return HashParams.from_dict(d.get("params", d))
    if a.B is None:
        raise CLIError("give either --params FILE or --q with --B")
    return HashParams(a.q, tuple(a.B))


# -- commands -------------------------------------------------------------

def cmd_optimize(a, out: Path) -> list[Path]:
    cfg = SearchConfig(q=a.q, s=a.s, method=a.method, seed=a.seed, anneal_iters=a.iters,
                       anneal_restarts=a.restarts, initial_temp=a.initial_temp,
                       cooling=a.cooling, refine_iters=a.refine_iters, budget=a.budget)
    res = search(cfg)
    rep = bounds_report(res.params)
    payload = res.to_dict()
    payload["bounds"] = {
        "epsilon": rep.epsilon, "delta": rep.delta, "swap_error": rep.swap_error,
        "reverse_error": rep.reverse_error, "assumption": rep.assumption,
    }
    path = write_json(out / f"search_q{a.q}_s{a.s}.json", payload)
    print(f"B={list(res.params.B)} worst_fidelity={res.worst_fidelity:.6f} x_max={res.x_max}")
    return [path]


def _load_or_search(a, s: int):
    if a.results:
        path = Path(a.results) / f"search_q{a.q}_s{s}.json"
        if not path.exists():
            log.warning("no search result for s=%d at %s", s, path)
            return None
        return SearchResult.from_dict(json.loads(path.read_text()))
    cfg = SearchConfig(q=a.q, s=s, method="auto", seed=component_seed(a.seed, f"search/s={s}"),
                       anneal_iters=a.iters, anneal_restarts=a.restarts)
    return search(cfg)


def cmd_table(a, out: Path) -> list[Path]:
    s_range = range(a.s_min, a.s_max + 1)
    results = {s: _load_or_search(a, s) for s in s_range}
    results = {s: r for s, r in results.items() if r is not None}
    herald, hashd = _detectors(a)
    template = ProtocolConfig(
        params=HashParams(2, (1,)), source=_source(a), herald_det=herald, hash_det=hashd,
        seed=component_seed(a.seed, "table"), trials_per_point=a.trials,
        calibration_iterations=a.calibration_iterations, window=a.window,
        trial_duration=a.trial_duration,
    )
    rows = reproduce_table(template, results, s_range, tuple(a.ell), a.repetitions)
    path = write_csv(out / "table.csv", rows, TABLE_COLUMNS)
    paths = [path]
    for s, r in sorted(results.items()):
        paths.append(write_json(out / f"search_q{a.q}_s{s}.json", r.to_dict()))
    for row in rows:
        cells = " ".join(
            f"l{e}={row[f'rate_l{e}']:.4f}±{row[f'stderr_l{e}']:.4f}"
            for e in a.ell if row[f"rate_l{e}"] != ""
        )
        bound = row["bound_theory"]
        print(f"s={row['s']} x_max={row['x_max']} bound={bound if bound == '' else f'{bound:.4f}'} "
              f"{cells} ref={row['ref_bound']} [{row['status']}]")
    return paths


def cmd_curve(a, out: Path) -> list[Path]:
    phases = np.linspace(0.0, 2.0 * math.pi, a.points)
    herald, hashd = _detectors(a)
    rows, fits = [], {}
    for ell in a.ell:
        data = coincidence_sweep(ell, phases, a.heralds, _source(a), herald, hashd,
                                 seed=component_seed(a.seed, f"curve/l={ell}"), window=a.window)
        norm = data[:, 2] / np.maximum(data[:, 1], 1)
        fits[ell] = fit_fringe(data[:, 0], norm)
        for (ph, h, c), n in zip(data, norm):
            rows.append({"ell": ell, "phase": ph, "heralds": int(h), "coincidences": int(c),
                         "normalized": float(n), "theory": math.cos(ph / 2) ** 2})
        f = fits[ell]
        print(f"l={ell} visibility={f['visibility']:.4f} max_dev={f['max_deviation']:.4f}")
    p1 = write_csv(out / "curve.csv", rows,
                   ["ell", "phase", "heralds", "coincidences", "normalized", "theory"])
    p2 = write_json(out / "curve_fit.json", {str(k): v for k, v in fits.items()})
    return [p1, p2]


def cmd_lgmap(a, out: Path) -> list[Path]:
    mode = LGMode(a.p, a.ell, a.w0, a.wavelength)
    X, Y = make_grid(mode, a.z, a.n, a.extent)
    if a.phi is None:
        field = lg_amplitude(mode, np.hypot(X, Y), np.arctan2(Y, X), a.z)
        stem = f"lg_p{a.p}_l{a.ell}"
    else:
        if a.ell == 0:
            raise CLIError("a superposition needs ell != 0")
        field = superposition_field(OAMQubit(abs(a.ell), a.phi), mode, (X, Y), a.z)
        stem = f"lg_p{a.p}_pm{abs(a.ell)}_phi{a.phi:g}"
    half = float(X.max())
    extent = [-half, half, -half, half]
    paths = write_raster(out / f"{stem}_intensity", np.abs(field) ** 2, extent, "1/m^2", a.format)
    paths += write_raster(out / f"{stem}_phase", np.angle(field), extent, "rad", a.format)
    centre = np.abs(field[a.n // 2, a.n // 2]) ** 2 if a.n % 2 else None
    print(f"{stem}: grid {a.n}x{a.n} over ±{half:.3e} m, gouy={float(gouy_phase(mode, a.z)):.6f} rad"
          + ("" if centre is None else f", on-axis intensity={centre:.3e}"))
    return paths


def cmd_tomo(a, out: Path) -> list[Path]:
    from .tomography import TomoSettings

    phi = math.radians(a.phi_deg)
    settings = TomoSettings(shots_per_setting=a.shots, seed=component_seed(a.seed, "tomo"))
    run = run_tomography(phi, settings, a.ell, a.bootstrap)
    theory = DensityMatrix2.from_phase(phi)
    print("theoretical:\n" + theory.format())
    print("reconstructed:\n" + run.rho.format(run.uncertainty))
    print(f"phase = {run.phase_deg:.2f} ± {run.phase_err_deg:.2f} deg")
    payload = {"phi_deg": a.phi_deg, "shots": a.shots, "counts": run.counts.tolist(),
               "labels": list(settings.labels), "theory": theory.to_dict(),
               "reconstructed": run.rho.to_dict(run.uncertainty),
               "phase_deg": run.phase_deg, "phase_err_deg": run.phase_err_deg}
    if a.step_deg:
        delta, err, _ = phase_step_resolution(phi, math.radians(a.step_deg), a.shots,
                                              component_seed(a.seed, "tomo/step"), a.ell, a.bootstrap)
        payload["step"] = {"nominal_deg": a.step_deg, "measured_deg": delta, "err_deg": err}
        print(f"step: nominal {a.step_deg:.3f} deg, measured {delta:.3f} ± {err:.3f} deg")
    return [write_json(out / "tomo.json", payload)]


def cmd_verify(a, out: Path) -> list[Path]:
    params = _params_from(a)
    herald, hashd = _detectors(a)
    cfg = ProtocolConfig(params=params, ell=a.ell, loss_policy=a.loss_policy, source=_source(a),
                         herald_det=herald, hash_det=hashd, seed=component_seed(a.seed, "verify"))
    outcome = verify(cfg, a.x1, a.x2, a.trial)
    h1, h2 = quantum_hash(params, a.x1), quantum_hash(params, a.x2)
    trace = []
    for j, (b, res) in enumerate(zip(params.B, outcome.per_qubit)):
        d = h2.phases[j] - h1.phases[j]
        trace.append({"qubit": j, "b": b, "phi_received": h1.phases[j], "phi_expected": h2.phases[j],
                      "p_match": math.cos(d / 2) ** 2, "outcome": res})
        print(f"qubit {j}: b={b} phi1={h1.phases[j]:.4f} phi2={h2.phases[j]:.4f} "
              f"p_match={math.cos(d / 2) ** 2:.4f} -> {res}")
    print(f"verdict: {outcome.verdict} (resends={outcome.resend_count}, "
          f"fidelity={fidelity(params, a.x1, a.x2):.6f})")
    payload = {"params": params.to_dict(), "x1": a.x1, "x2": a.x2, "verdict": outcome.verdict,
               "resend_count": outcome.resend_count, "trace": trace}
    if a.loss_policy == "accept":
        payload["note"] = ACCEPT_POLICY_NOTE
    return [write_json(out / "verify.json", payload)]


COMMANDS = {
    "optimize": cmd_optimize, "table": cmd_table, "curve": cmd_curve,
    "lgmap": cmd_lgmap, "tomo": cmd_tomo, "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oamhash", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--quiet", action="store_true", help="suppress progress on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="search for B minimising the worst-case fidelity")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--method", choices=["auto", "exhaustive", "anneal"], default="auto")
    p.add_argument("--budget", type=int, default=10**9)
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--initial-temp", type=float, default=0.1)
    p.add_argument("--cooling", type=float, default=0.995)
    p.add_argument("--refine-iters", type=int, default=300)
    _add_common(p)

    p = sub.add_parser("table", help="worst-case table: theory, simulation, reference data")
    p.add_argument("--q", type=int, default=512)
    p.add_argument("--s-min", type=int, default=2)
    p.add_argument("--s-max", type=int, default=8)
    p.add_argument("--ell", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--results", default=None, help="directory with search_q*_s*.json files")
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--trials", type=int, default=defaults.TRIALS_PER_POINT)
    p.add_argument("--calibration-iterations", type=int, default=defaults.CALIBRATION_ITERATIONS)
    p.add_argument("--repetitions", type=int, default=defaults.TRIALS_PER_POINT)
    p.add_argument("--trial-duration", type=float, default=defaults.TRIAL_DURATION)
    _add_detectors(p)
    _add_common(p)

    p = sub.add_parser("curve", help="coincidence rate versus phase difference")
    p.add_argument("--ell", type=int, nargs="+", default=[1, 2, 3])
    p.add_argument("--points", type=int, default=33)
    p.add_argument("--heralds", type=float, default=1e4, help="expected heralds per point")
    _add_detectors(p)
    _add_common(p)

    p = sub.add_parser("lgmap", help="LG mode or +-l superposition field maps")
    p.add_argument("--p", type=int, default=0)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--w0", type=float, default=defaults.IDLER_WAIST)
    p.add_argument("--wavelength", type=float, default=defaults.IDLER_WAVELENGTH)
    p.add_argument("--z", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=None, help="superpose +-ell with this phase (rad)")
    p.add_argument("--n", type=int, default=defaults.GRID_POINTS)
    p.add_argument("--extent", type=float, default=defaults.GRID_EXTENT_WIDTHS,
                   help="half-width in units of w(z)")
    p.add_argument("--format", choices=["bin", "csv"], default="bin")
    _add_common(p)

    p = sub.add_parser("tomo", help="simulate tomography of one OAM qubit")
    p.add_argument("--phi-deg", type=float, default=120.0)
    p.add_argument("--shots", type=int, default=defaults.TOMO_SHOTS)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--step-deg", type=float, default=None,
                   help="also resolve a phase step of this size (e.g. 0.703125)")
    p.add_argument("--bootstrap", type=int, default=defaults.BOOTSTRAP_RESAMPLES)
    _add_common(p)

    p = sub.add_parser("verify", help="one verification run with a per-qubit trace")
    p.add_argument("--params", default=None, help="HashParams or search result JSON")
    p.add_argument("--q", type=int, default=None)
    p.add_argument("--B", type=int, nargs="+", default=None)
    p.add_argument("--x1", type=int, required=True)
    p.add_argument("--x2", type=int, required=True)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--trial", type=int, default=0)
    p.add_argument("--loss-policy", choices=["resend", "accept"], default="resend")
    _add_detectors(p)
    _add_common(p)

    p = sub.add_parser("replay", help="re-run a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    return parser


def _apply_config(args: argparse.Namespace, path: str) -> None:
    d = json.loads(Path(path).read_text())
    d = d.get("config", d)
    for k, v in d.items():
        key = k.replace("-", "_")
        if key in ("command", "config", "out"):
            continue
        if not hasattr(args, key):
            raise CLIError(f"unknown option in config file: {k}")
        setattr(args, key, v)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s")
    if args.command == "replay":
        manifest = json.loads(Path(args.manifest).read_text())
        out_arg = args.out
        args = parser.parse_args([manifest["command"], *_required_args(manifest)])
        for k, v in manifest["config"].items():
            setattr(args, k, v)
        args.out = out_arg
    elif args.config:
        _apply_config(args, args.config)

    out = output_dir(args.out)
    config = {k: v for k, v in vars(args).items() if k not in ("out", "config", "quiet")}
    manifest = RunManifest(args.command, config, args.seed, __version__)
    paths = COMMANDS[args.command](args, out)
    manifest.finish(paths)
    manifest.write(out)
    return 0


def _required_args(manifest: dict) -> list[str]:
    # satisfy argparse's required options; real values are restored from the config
    cfg = manifest["config"]
    needed = {"optimize": ["q", "s"], "verify": ["x1", "x2"]}.get(manifest["command"], [])
    out = []
    for k in needed:
        out += [f"--{k}", str(cfg[k])]
    return out


def main(argv=None) -> int:
    try:
        return run(argv)
    except (CLIError, BudgetExceeded, ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"oamhash: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
