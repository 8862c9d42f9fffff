"""Command-line entry point.

Subcommands: construct, verify, simulate, sweep, fit, compare-baseline.
Machine-readable output goes to stdout; logs go to stderr at the level set by
the MEDLAB_LOG environment variable (error, info, debug). Exit codes: 0 on
success, 1 when a verification fails, 2 on usage errors.

Every produced artifact embeds a run manifest (subcommand, parameters, seed,
version, timestamp) so it can be reproduced bit-for-bit apart from the
timestamp itself.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .core import PointSet, Scoring, load_pointset, save_pointset
from .constructions import cyclic_config, gaussian_config
from .exceptions import UsageError
from .harness import (
    CriticalSizeRecord,
    baseline_curve,
    find_critical_m,
    fit_log_linear,
    read_records,
    sweep,
)
from .optimizer import TrainConfig, train
from .verifier import verify_k_centroid_shatter, verify_k_shatter

log = logging.getLogger("medlab")

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2


def _setup_logging() -> None:
    level_name = os.environ.get("MEDLAB_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    level = levels.get(level_name, logging.ERROR)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility stamp embedded in every produced artifact.

    Re-running the same subcommand with these parameters and seed rebuilds
    the artifact byte-for-byte except for the timestamp itself.
    """

    subcommand: str
    parameters: dict
    seed: int
    artifact_version: str
    timestamp: str

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "parameters": {k: v for k, v in sorted(self.parameters.items())},
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "timestamp": self.timestamp,
        }


def make_manifest(subcommand: str, parameters: dict, seed: int) -> dict:
    return RunManifest(
        subcommand=subcommand,
        parameters=parameters,
        seed=seed,
        artifact_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
    ).to_dict()


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="medlab", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("construct", help="emit a point configuration as CSV")
    p.add_argument("--kind", choices=["cyclic", "gaussian"], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, default=None, help="output path (default stdout)")

    p = sub.add_parser("verify", help="verify k-shattering of a point set")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--scoring", choices=["linear", "cos", "l2"], default="linear")
    p.add_argument("--mode", choices=["atmost", "exact"], default="atmost")
    p.add_argument("--centroid", action="store_true", help="verify centroid shattering instead")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers over subsets")

    p = sub.add_parser("simulate", help="one training run of the centroid optimizer")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--patience", type=int, default=None)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--out", type=Path, default=None, help="write final embeddings CSV here")

    p = sub.add_parser("sweep", help="critical-dimension search over universe sizes")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m-values", type=str, required=True, help="comma-separated, e.g. 5,10,20,40,80")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=3, help="retry seeds per probed dimension")
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--patience", type=int, default=None)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--window", type=int, default=40)
    p.add_argument("--full-window", action="store_true", help="search [1, m] instead of the windowed prior")

    p = sub.add_parser("fit", help="log-linear fit of a sweep results CSV")
    p.add_argument("--input", type=Path, required=True)

    p = sub.add_parser("compare-baseline", help="critical m versus the published cubic curve")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--dims", type=str, required=True, help="comma-separated dimensions, e.g. 8,16")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--max-steps", type=int, default=1000)
    p.add_argument("--patience", type=int, default=None)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--m-cap", type=int, default=512)
    return parser


def _cmd_construct(args) -> int:
    if args.kind == "cyclic":
        ps = cyclic_config(args.m, args.dim)
    else:
        ps = gaussian_config(args.m, args.dim, args.seed)
    manifest = make_manifest("construct", {"kind": args.kind, "m": args.m, "dim": args.dim}, args.seed)
    comment = "manifest: " + json.dumps(manifest, sort_keys=True)
    if args.out is None:
        save_pointset(ps, sys.stdout, comments=[comment])
    else:
        with args.out.open("w") as fp:
            save_pointset(ps, fp, comments=[comment])
        log.info("wrote %s points to %s", ps.m, args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    with args.input.open() as fp:
        ps = load_pointset(fp)
    s = Scoring.parse(args.scoring)
    if args.centroid:
        report = verify_k_centroid_shatter(ps, args.k, s, args.mode)
    else:
        report = verify_k_shatter(ps, args.k, s, args.mode, jobs=args.jobs, collect_witnesses=False)
    payload = report.to_dict()
    payload["manifest"] = make_manifest(
        "verify",
        {"input": str(args.input), "k": args.k, "scoring": args.scoring, "mode": args.mode, "centroid": args.centroid},
        seed=0,
    )
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _cmd_simulate(args) -> int:
    cfg = TrainConfig(
        m=args.m,
        k=args.k,
        dim=args.dim,
        max_steps=args.max_steps,
        base_lr=args.lr,
        patience=args.patience,
        seed=args.seed,
    )
    state = train(cfg)
    payload = {
        "min_violations": state.min_violations,
        "steps": len(state.violation_history),
        "stopped_reason": state.stopped_reason,
        "final_loss": state.final_loss,
        "manifest": make_manifest(
            "simulate",
            {"m": args.m, "k": args.k, "dim": args.dim, "max_steps": args.max_steps, "lr": args.lr, "patience": cfg.patience},
            args.seed,
        ),
    }
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if args.out is not None:
        with args.out.open("w") as fp:
            save_pointset(PointSet(state.embeddings), fp, comments=["manifest: " + json.dumps(payload["manifest"], sort_keys=True)])
    return EXIT_OK


def _parse_int_list(text: str, *, name: str) -> list[int]:
    try:
        values = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise UsageError(f"{name} must be a comma-separated list of integers, got {text!r}") from exc
    if not values:
        raise UsageError(f"{name} must not be empty")
    return values


def _cmd_sweep(args) -> int:
    m_values = _parse_int_list(args.m_values, name="--m-values")
    budget = TrainConfig(
        m=max(m_values),
        k=args.k,
        dim=1,
        max_steps=args.max_steps,
        base_lr=args.lr,
        patience=args.patience,
    )
    manifest = make_manifest(
        "sweep",
        {
            "k": args.k,
            "m_values": m_values,
            "seeds": args.seeds,
            "max_steps": args.max_steps,
            "lr": args.lr,
            "window": args.window,
            "full_window": args.full_window,
        },
        args.seed,
    )
    records = sweep(
        args.k,
        m_values,
        args.out,
        budget,
        window_hint=args.window,
        retries=args.seeds,
        seed=args.seed,
        full_window=args.full_window,
        manifest=manifest,
    )
    summary = {
        "records": [
            {"m": r.m, "k": r.k, "critical_dim": r.critical_dim, "wall_time_s": round(r.wall_time, 3)}
            for r in records
        ],
        "out": str(args.out),
        "manifest": manifest,
    }
    json.dump(summary, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_fit(args) -> int:
    records = read_records(args.input)
    result = fit_log_linear(records)
    payload = result.to_dict()
    payload["manifest"] = make_manifest("fit", {"input": str(args.input)}, seed=0)
    json.dump(payload, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK


def _cmd_compare_baseline(args) -> int:
    dims = _parse_int_list(args.dims, name="--dims")
    budget = TrainConfig(
        m=args.k + 1,
        k=args.k,
        dim=max(dims),
        max_steps=args.max_steps,
        base_lr=args.lr,
        patience=args.patience,
    )
    print("d,critical_m,baseline_m,ratio")
    worst_ratio = None
    for d in dims:
        rec: CriticalSizeRecord = find_critical_m(
            d, args.k, budget, retries=args.seeds, seed=args.seed, m_cap=args.m_cap
        )
        base = baseline_curve(d)
        ratio = rec.critical_m / base if base > 0 else float("inf")
        worst_ratio = ratio if worst_ratio is None else min(worst_ratio, ratio)
        suffix = "+" if rec.censored else ""
        print(f"{d},{rec.critical_m}{suffix},{base:.4f},{ratio:.3f}")
    return EXIT_OK


_HANDLERS = {
    "construct": _cmd_construct,
    "verify": _cmd_verify,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
    "compare-baseline": _cmd_compare_baseline,
}


def dispatch(argv: list[str] | None = None) -> int:
    """Route argv to a subcommand; returns the process exit code."""
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.subcommand](args)
    except ValueError as exc:
        # covers UsageError and DomainError from every subcommand
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
