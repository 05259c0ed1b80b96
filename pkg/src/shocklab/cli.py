"""Command-line experiment runner.

Subcommands: profile, periodic, shock-shift, coincidence, counterexample,
sweep, rarefaction, hopf-check, suite.  Every subcommand accepts
``--config PATH`` (plain key = value text) and ``--out DIR``; ``suite``
additionally takes ``--threads N``.

Exit status: 0 all checks pass, 2 numerical checks failed, 3 validation
failed.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ValidationError, build_scenario, load_config
from .experiments import default_suite, run_experiment, write_csv
from .profile import compute_profile

SUBCOMMAND_KINDS = {
    "periodic": "periodic-decay",
    "shock-shift": "shock-shift",
    "coincidence": "burgers-coincidence",
    "counterexample": "counterexample",
    "sweep": "viscosity-sweep",
    "rarefaction": "rarefaction",
    "hopf-check": "hopf-check",
}


def _add_common(sp):
    sp.add_argument("--config", type=Path, default=None, help="scenario config file")
    sp.add_argument("--out", type=Path, default=Path("out"), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shocklab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMAND_KINDS:
        sp = sub.add_parser(name, help=f"run a {SUBCOMMAND_KINDS[name]} experiment")
        _add_common(sp)
    sp = sub.add_parser("profile", help="dump a viscous profile table as CSV")
    _add_common(sp)
    sp = sub.add_parser("suite", help="run the default scenario suite")
    _add_common(sp)
    sp.add_argument("--threads", type=int, default=1, help="scenario workers")
    return ap


def _defaults_for(kind: str) -> dict:
    for raw in default_suite():
        if raw["experiment.kind"] == kind:
            return dict(raw)
    raise KeyError(kind)


def _run_one(raw: dict, outdir: Path) -> int:
    try:
        cfg = build_scenario(raw)
    except ValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return 3
    report = run_experiment(cfg, outdir)
    print(report.summary(), end="")
    return report.status


def _cmd_profile(args) -> int:
    raw = {"experiment.kind": "shock-shift"}
    if args.config:
        raw.update(load_config(args.config))
    try:
        cfg = build_scenario(raw)
        prof = compute_profile(cfg.model, cfg.states(), cfg.nu)
    except (ValidationError, Exception) as exc:
        if isinstance(exc, ValidationError):
            print(f"validation failed: {exc}", file=sys.stderr)
            return 3
        raise
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    delta = prof.states.jump
    ratio = np.where(
        prof.g * (1 - prof.g) > 1e-12,
        -prof.gp / np.maximum(delta * prof.g * (1 - prof.g), 1e-300),
        np.nan,
    )
    path = write_csv(outdir / "profile.csv", "x,phi,g,gprime,ratio",
                     [prof.grid, prof.phi, prof.g, prof.gp, ratio])
    print(f"wrote {path} ({prof.grid.size} rows); "
          f"beta1={prof.beta1:.6f} beta2={prof.beta2:.6f}")
    return 0


def _cmd_suite(args) -> int:
    scen = default_suite()
    outroot = Path(args.out)
    results = {}

    def work(raw):
        label = raw["experiment.label"]
        return label, _run_one(raw, outroot / label)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            for label, status in pool.map(work, scen):
                results[label] = status
    else:
        for raw in scen:
            label, status = work(raw)
            results[label] = status
    worst = max(results.values(), default=0)
    print("suite:", " ".join(f"{k}={'ok' if v == 0 else v}" for k, v in results.items()))
    return worst


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "suite":
        return _cmd_suite(args)
    if args.command == "profile":
        return _cmd_profile(args)
    kind = SUBCOMMAND_KINDS[args.command]
    raw = _defaults_for(kind)
    if args.config:
        raw.update(load_config(args.config))
        raw["experiment.kind"] = kind
    return _run_one(raw, Path(args.out))


if __name__ == "__main__":
    sys.exit(main())
