"""Command-line front end.

Every command writes its results into ``--out`` together with a
``manifest.json`` recording the exact arguments and a SHA-256 of each output
file. ``hfbikit validate --manifest PATH`` replays a manifest into a fresh
directory and checks that the outputs are byte-identical.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from .bursts import (burst_baseline, burst_table, fit_intervals, loyal_users, tables_to_json,
                     write_details_csv, write_table_csv)
from .calibration import calibrate_alpha, per_node_calibration, per_node_fits
from .event_log import LogError, frequency_sequence, prefix, read_csv, write_csv
from .evidence import prop_by_absence, prop_by_history, smooth
from .hfbi import HfbiParams, derive_params, simulate, validate_theory
from .powerlaw import FitError, ccdf, lorenz_curve, select_xmin, top_share

DEFAULT_SEED = 20150501
SCHEMA = "hfbikit/1"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_FIT = 4
EXIT_PARAMS = 5
EXIT_MISMATCH = 6


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _clean(o):
    # NaN is not valid JSON
    if isinstance(o, float) and math.isnan(o):
        return None
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def _write_json(path: Path, payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    text = json.dumps(_clean(json.loads(json.dumps(payload, default=_json_default))),
                      indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")


def _write_xy(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for a, b in rows:
            fh.write(f"{a!r},{b!r}\n")


def _load(args):
    log = read_csv(args.input)
    if getattr(args, "upto", None) is not None:
        log = prefix(log, args.upto)
    return log


# ---------------------------------------------------------------------------
# commands; each returns the list of files it wrote (relative to --out)
# ---------------------------------------------------------------------------
def cmd_fit(args, out: Path) -> list[str]:
    log = _load(args)
    freqs = frequency_sequence(log)
    fit = select_xmin(freqs, p_threshold=args.p_threshold, n_boot=args.n_boot, seed=args.seed)
    _write_json(out / "fit.json", {
        **fit.to_dict(),
        "top_share": {str(p): top_share(freqs, p) for p in (0.1, 0.2, 0.5)},
        "users": int(freqs.size),
        "records": int(freqs.sum()),
    })
    _write_xy(out / "ccdf.csv", ("q", "F"), [(int(q), float(f)) for q, f in ccdf(freqs)])
    _write_xy(out / "lorenz.csv", ("p", "P"), [(float(a), float(b)) for a, b in lorenz_curve(freqs)])
    return ["fit.json", "ccdf.csv", "lorenz.csv"]


def cmd_simulate(args, out: Path) -> list[str]:
    if args.input:
        params = derive_params(_load(args), alpha=args.alpha, kernel=args.kernel)
    else:
        if None in (args.n, args.c, args.m):
            raise ValueError("simulate needs --n, --c and --m (or --input to derive them)")
        params = HfbiParams(n=args.n, c=args.c, m=args.m, alpha=args.alpha, kernel=args.kernel)
    res = simulate(params, seed=args.seed)
    write_csv(res.log, out / "synthetic.csv")
    _write_json(out / "frequencies.json", {
        "params": params.to_dict(),
        "seed": args.seed,
        "users": int(res.frequencies.size),
        "frequencies": res.frequencies,
    })
    return ["synthetic.csv", "frequencies.json"]


def cmd_calibrate(args, out: Path) -> list[str]:
    log = _load(args)
    cal = calibrate_alpha(log, kernel=args.kernel, grid_step=args.grid_step, runs=args.runs, seed=args.seed)
    _write_json(out / "calibration.json", cal.to_dict())
    files = ["calibration.json"]
    if args.per_node:
        series = per_node_calibration(log, kernel=args.kernel, population_threshold=args.threshold,
                                      stride=args.stride, grid_step=args.grid_step, runs=args.runs,
                                      seed=args.seed)
        series.to_csv(out / "alpha_nodes.csv")
        fits = per_node_fits(log, population_threshold=args.threshold, stride=args.stride,
                             n_boot=args.n_boot, seed=args.seed)
        fits.to_csv(out / "gamma_nodes.csv")
        files += ["alpha_nodes.csv", "gamma_nodes.csv"]
    return files


def cmd_evidence(args, out: Path) -> list[str]:
    log = _load(args)
    files = []
    for name, curve in (("history", prop_by_history(log)), ("absence", prop_by_absence(log))):
        curve.to_csv(out / f"{name}.csv")
        smooth(curve, args.window).to_csv(out / f"{name}_smoothed.csv")
        files += [f"{name}.csv", f"{name}_smoothed.csv"]
    return files


def cmd_bursts(args, out: Path) -> list[str]:
    log = _load(args)
    loyal = loyal_users(log, args.min_count)
    users = log.users if args.scope == "all" else loyal
    tables = [burst_table(log, users, d) for d in args.delta]
    write_table_csv(tables, out / "burst_table.csv")
    write_details_csv(tables, out / "bursts.csv")
    intervals = {}
    if args.fit_intervals:
        for u in loyal.tolist():
            try:
                intervals[str(u)] = fit_intervals(log, u, n_boot=args.n_boot, seed=args.seed).to_dict()
            except FitError as exc:
                intervals[str(u)] = {"error": str(exc)}
    _write_json(out / "bursts.json", {
        "scope": args.scope,
        "users": int(len(users)),
        "loyal_users": loyal,
        "incentive_baseline": burst_baseline(log),
        "tables": json.loads(tables_to_json(tables)),
        "interval_fits": intervals,
    })
    return ["burst_table.csv", "bursts.csv", "bursts.json"]


def cmd_theory(args, out: Path) -> list[str]:
    check = validate_theory(args.c, args.m, args.n, seed=args.seed, n_boot=args.n_boot)
    _write_json(out / "theory.json", {"c": args.c, "m": args.m, "n": args.n, "seed": args.seed,
                                      **check.to_dict()})
    return ["theory.json"]


def cmd_validate(args, out: Path) -> list[str]:
    if args.manifest:
        return _replay(args.manifest, out)
    if not args.input:
        raise ValueError("validate needs --input or --manifest")
    log = _load(args)
    _write_json(out / "validate.json", {
        "input": os.path.basename(args.input),
        "records": len(log),
        "users": log.user_count,
        "activities": log.activity_count,
        "incentive_activities": len(log.incentive_set),
    })
    return ["validate.json"]


COMMANDS = {
    "fit": cmd_fit,
    "simulate": cmd_simulate,
    "calibrate": cmd_calibrate,
    "evidence": cmd_evidence,
    "bursts": cmd_bursts,
    "theory": cmd_theory,
    "validate": cmd_validate,
}


# ---------------------------------------------------------------------------
# manifests
# ---------------------------------------------------------------------------
class ReproducibilityError(RuntimeError):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _manifest_args(args) -> dict:
    skip = {"command", "out", "manifest"}
    d = {k: v for k, v in vars(args).items() if k not in skip}
    if d.get("input"):
        d["input"] = os.path.abspath(d["input"])
    return d


def _write_manifest(args, out: Path, files: list[str]) -> None:
    _write_json(out / "manifest.json", {
        "version": __version__,
        "command": args.command,
        "args": _manifest_args(args),
        "outputs": {f: _sha256(out / f) for f in files},
    })


def _replay(manifest_path, out: Path) -> list[str]:
    manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    args = argparse.Namespace(command=manifest["command"], **manifest["args"])
    with tempfile.TemporaryDirectory() as tmp:
        files = COMMANDS[args.command](args, Path(tmp))
        got = {f: _sha256(Path(tmp) / f) for f in files}
    expected = manifest["outputs"]
    report = {f: {"expected": expected.get(f), "actual": got.get(f),
                  "match": expected.get(f) == got.get(f)}
              for f in sorted(set(expected) | set(got))}
    ok = all(r["match"] for r in report.values())
    _write_json(out / "replay.json", {"manifest": os.path.abspath(manifest_path),
                                      "identical": ok, "files": report})
    if not ok:
        raise ReproducibilityError("replayed outputs differ from the manifest")
    return ["replay.json"]


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------
def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hfbikit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        sp.add_argument("--input", required=needs_input, help="participation CSV")
        sp.add_argument("--out", default="hfbikit-out", help="output directory (created if absent)")
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--upto", type=int, default=None, help="restrict to activities 0..UPTO")
        sp.add_argument("--n-boot", type=int, default=1000, dest="n_boot")

    sp = sub.add_parser("fit", help="power-law fit, CCDF and concentration curve of participation counts")
    common(sp)
    sp.add_argument("--p-threshold", type=float, default=0.1, dest="p_threshold")

    sp = sub.add_parser("simulate", help="run the HFBI model")
    common(sp, needs_input=False)
    sp.add_argument("--n", type=int)
    sp.add_argument("--c", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--alpha", type=float, default=0.9)
    sp.add_argument("--kernel", choices=("reciprocal", "exponential"), default="reciprocal")

    sp = sub.add_parser("calibrate", help="grid-search the mixture weight alpha")
    common(sp)
    sp.add_argument("--kernel", choices=("reciprocal", "exponential"), default="reciprocal")
    sp.add_argument("--grid-step", type=float, default=0.01, dest="grid_step")
    sp.add_argument("--runs", type=int, default=5)
    sp.add_argument("--per-node", action="store_true", dest="per_node")
    sp.add_argument("--threshold", type=int, default=1000, help="population at which per-node analysis starts")
    sp.add_argument("--stride", type=int, default=1)

    sp = sub.add_parser("evidence", help="habit-formation and behavioral-inertia curves")
    common(sp)
    sp.add_argument("--window", type=int, default=20)

    sp = sub.add_parser("bursts", help="burst detection and incentive positions")
    common(sp)
    sp.add_argument("--delta", type=_int_list, default=[8, 9, 10])
    sp.add_argument("--min-count", type=int, default=100, dest="min_count")
    sp.add_argument("--scope", choices=("loyal", "all"), default="loyal")
    sp.add_argument("--fit-intervals", action="store_true", dest="fit_intervals")

    sp = sub.add_parser("theory", help="habit-only exponent check against 2 + c/m")
    common(sp, needs_input=False)
    sp.add_argument("--c", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--n", type=int, default=50000)

    sp = sub.add_parser("validate", help="check a CSV log, or replay a manifest")
    common(sp, needs_input=False)
    sp.add_argument("--manifest", default=None)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        files = COMMANDS[args.command](args, out)
        if args.command != "validate" or not args.manifest:
            _write_manifest(args, out, files)
    except (LogError, OSError) as exc:
        print(f"hfbikit: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FitError as exc:
        print(f"hfbikit: fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except ReproducibilityError as exc:
        print(f"hfbikit: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (ValueError, IndexError) as exc:
        print(f"hfbikit: invalid parameters: {exc}", file=sys.stderr)
        return EXIT_PARAMS
    for f in files:
        print(out / f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
