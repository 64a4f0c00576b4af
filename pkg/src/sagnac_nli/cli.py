"""Command-line entry point: ``sagnac-nli <subcommand> ...``."""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from . import formats, fringe, model, noise, traces, validation
from .model import NliConfig
from .traces import TraceModel


def _resolve_config(args) -> tuple[NliConfig, TraceModel]:
    if args.config:
        cfg, tm = formats.load_config(args.config)
    else:
        cfg, tm = NliConfig(), TraceModel()
    overrides = {
        "g1": args.g1, "g2": args.g2, "alpha2": args.alpha2,
        "pump_phase": args.pump_phase, "probe_eta": args.probe_eta,
        "conj_eta": args.conj_eta, "det_eta": args.det_eta,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if args.gain is not None:
        overrides.setdefault("g1", args.gain)
        overrides.setdefault("g2", args.gain)
    if args.single_pass:
        overrides["double_pass"] = False
    if overrides:
        cfg = replace(cfg, **overrides)
    tm_over = {}
    if args.k_const is not None:
        tm_over["k_const"] = args.k_const
    if args.jitter_db is not None:
        tm_over["noise_jitter_db"] = args.jitter_db
    if args.floor_dbm is not None:
        tm_over["electronics_floor"] = float(traces.dbm_linear(args.floor_dbm))
    if args.seed is not None:
        tm_over["rng_seed"] = args.seed
    if tm_over:
        tm = replace(tm, **tm_over)
    return cfg, tm


def _phase_grid(args) -> np.ndarray:
    if args.n < 2:
        raise ValueError("--n must be >= 2")
    if not args.phi_max > args.phi_min:
        raise ValueError("--phi-max must exceed --phi-min")
    return np.linspace(args.phi_min, args.phi_max, args.n)


def _write_manifest(args, outputs: list[str], manifest_path: Path, extra: dict | None = None):
    manifest = {
        "subcommand": args.command,
        "config_path": getattr(args, "config", None),
        "seed": getattr(args, "seed", None),
        "outputs": outputs,
        "argv": sys.argv[1:],
        "tool_version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    manifest_path.write_text(formats.dumps(manifest) + "\n")


def _emit(args, payload: bytes | str, extra_manifest: dict | None = None):
    if isinstance(payload, str):
        payload = payload.encode("utf-8")
    if args.out is None:
        sys.stdout.write(payload.decode("utf-8"))
        return
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(payload)
    _write_manifest(args, [str(out)], out.with_name(out.name + ".manifest.json"), extra_manifest)


def _config_snapshot(cfg, tm):
    return {"config": formats.config_to_dict(cfg, tm)}


def cmd_simulate(args) -> int:
    cfg, tm = _resolve_config(args)
    exact = model.run_exact(cfg, args.phi)
    report = {"phi": args.phi, "exact": exact.as_dict(), "closed_form": None}
    if cfg.g1 == cfg.g2:
        report["closed_form"] = model.closed_form_moments(cfg.g1, cfg.alpha2, args.phi).as_dict()
    _emit(args, formats.dumps(report) + "\n", _config_snapshot(cfg, tm))
    return 0


def cmd_sweep(args) -> int:
    cfg, tm = _resolve_config(args)
    scan = traces.sweep_scan(cfg, tm, _phase_grid(args), closed_form=args.closed_form)
    scan = replace(scan, meta=_config_snapshot(cfg, tm))
    _emit(args, formats.scan_to_csv(scan), _config_snapshot(cfg, tm))
    return 0


def cmd_synth(args) -> int:
    cfg, tm = _resolve_config(args)
    if args.out is None:
        raise ValueError("synth writes several files; --out DIR is required")
    trs, scan = traces.synth_scan(cfg, tm, _phase_grid(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for i, tr in enumerate(trs):
        path = out / f"trace_{i:04d}.csv"
        path.write_bytes(formats.trace_to_csv(tr))
        written.append(str(path))
    scan_path = out / "scan.csv"
    scan_path.write_bytes(formats.scan_to_csv(replace(scan, meta=_config_snapshot(cfg, tm))))
    written.append(str(scan_path))
    _write_manifest(args, written, out / "manifest.json", _config_snapshot(cfg, tm))
    return 0


def cmd_fit(args) -> int:
    scan = formats.csv_to_scan(Path(args.scan).read_bytes())
    fit = fringe.fit_fringe(
        scan, calibrate_phase=args.calibrate_phase, weighting=args.weighting,
        subtract_floor=args.subtract_floor,
    )
    report = fit.as_dict()
    if args.bootstrap:
        _, sigma = fringe.bootstrap_visibility(
            scan, args.bootstrap, seed=args.seed or 0, calibrate_phase=args.calibrate_phase,
            weighting=args.weighting, subtract_floor=args.subtract_floor,
        )
        report["visibility_sigma_bootstrap"] = sigma
    _emit(args, formats.dumps(report) + "\n")
    return 0


def cmd_noise(args) -> int:
    scan = formats.csv_to_scan(Path(args.scan).read_bytes())
    res = noise.analyze_scan(
        scan, degree=args.degree, k_sigma=args.k_sigma, jitter_db=args.jitter_db,
        n_boot=args.n_boot, seed=args.seed or 0,
    )
    _emit(args, formats.dumps(res.as_dict()) + "\n")
    return 0


def cmd_compare(args) -> int:
    cfg, tm = _resolve_config(args)
    phi_star, dphi = model.optimal_sensitivity(cfg)
    n_ps = cfg.phase_sensing_photons
    sql = model.linear_baseline(n_ps, passes=2)
    report = {
        "phi_star": phi_star,
        "dphi_nli": dphi,
        "dphi_sql": sql,
        "n_phase_sensing": n_ps,
        "ratio": sql / dphi,
        "two_g": 2 * cfg.g1 if cfg.g1 == cfg.g2 else None,
    }
    _emit(args, formats.dumps(report) + "\n", _config_snapshot(cfg, tm))
    return 0


def _faulty_engine(*circuit):
    got = validation.gaussian_engine(*circuit)
    return {k: v * (1 + 1e-3) + 1e-3 for k, v in got.items()}


def cmd_oracle_check(args) -> int:
    engine = _faulty_engine if args.inject_fault else validation.gaussian_engine
    rep = validation.oracle_check(
        max_gain=args.max_gain, max_alpha=args.max_alpha, n_cases=args.n_cases,
        seed=args.seed or 0, engine=engine,
    )
    _emit(args, formats.dumps(rep.as_dict()) + "\n")
    return 0 if rep.passed else 1


def _add_common(p: argparse.ArgumentParser, config: bool = True):
    if config:
        p.add_argument("--config", metavar="PATH", help="experiment config JSON")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (overrides config)")
    p.add_argument("--out", metavar="PATH", default=None, help="output path (default: stdout)")


def _add_overrides(p: argparse.ArgumentParser):
    g = p.add_argument_group("config overrides (win over --config)")
    g.add_argument("--gain", type=float, help="set both g1 and g2")
    g.add_argument("--g1", type=float)
    g.add_argument("--g2", type=float)
    g.add_argument("--alpha2", type=float)
    g.add_argument("--pump-phase", type=float)
    g.add_argument("--probe-eta", type=float)
    g.add_argument("--conj-eta", type=float)
    g.add_argument("--det-eta", type=float)
    g.add_argument("--single-pass", action="store_true")
    g.add_argument("--k-const", type=float)
    g.add_argument("--jitter-db", type=float)
    g.add_argument("--floor-dbm", type=float)


def _add_grid(p: argparse.ArgumentParser, n_default: int):
    p.add_argument("--phi-min", type=float, default=0.0)
    p.add_argument("--phi-max", type=float, default=float(np.pi))
    p.add_argument("--n", type=int, default=n_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sagnac-nli",
        description="Double-pass SU(1,1) interferometer simulation and fringe analysis",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="output moments at one phase")
    _add_common(p)
    _add_overrides(p)
    p.add_argument("--phi", type=float, required=True, help="single-pass phase (rad)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="noiseless scan CSV from the exact model")
    _add_common(p)
    _add_overrides(p)
    _add_grid(p, 101)
    p.add_argument("--closed-form", action="store_true",
                   help="use the bright-seed closed form instead of the exact model")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("synth", help="synthesize analyzer traces and the reduced scan")
    _add_common(p)
    _add_overrides(p)
    _add_grid(p, 100)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("fit", help="fit a scan CSV and report visibility")
    p.add_argument("scan", help="scan CSV")
    _add_common(p, config=False)
    p.add_argument("--calibrate-phase", action="store_true")
    p.add_argument("--weighting", choices=("none", "relative"), default="none")
    p.add_argument("--subtract-floor", action="store_true")
    p.add_argument("--bootstrap", type=int, default=0, metavar="N",
                   help="also report a residual-bootstrap sigma from N resamples")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("noise", help="log-log noise scaling of a scan CSV")
    p.add_argument("scan", help="scan CSV")
    _add_common(p, config=False)
    p.add_argument("--degree", type=int, default=noise.DEFAULT_DEGREE, choices=(1, 2, 3))
    p.add_argument("--k-sigma", type=float, default=2.0)
    p.add_argument("--jitter-db", type=float, default=None)
    p.add_argument("--n-boot", type=int, default=500)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("compare", help="optimal NLI phase sensitivity against the linear SQL")
    _add_common(p)
    _add_overrides(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("oracle-check", help="Gaussian engine against the Fock oracle")
    _add_common(p, config=False)
    p.add_argument("--max-gain", type=float, default=2.0)
    p.add_argument("--max-alpha", type=float, default=1.5)
    p.add_argument("--n-cases", type=int, default=50)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc),
                        "subcommand": args.command}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
