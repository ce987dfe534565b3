"""Command-line front end: ``qicrates {region,classify,simulate,properties}``.

Every command writes deterministic JSON reports (sorted keys, no timestamps)
carrying a SHA-256 of their own content, so repeated runs can be compared
byte for byte. Stage timings go to stderr with ``--timings`` only.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .capacity import (
    DistGrid,
    RegimeWarning,
    classify_strong,
    classify_very_strong,
    enumerate_hk_inputs,
    hk_input_pairs,
    hk_region,
    mac_capacity_region,
    sato_outer_region,
    sd_rs_region,
    strong_capacity_region,
    successive_region,
    very_strong_capacity_region,
)
from .channels import channel_to_dict, induced_mac, load_channel
from .codec import simulate
from .errors import GuardError, ValidationError
from .geometry import region_to_csv
from .properties import FAULTS, property_harness
from .svg import regions_svg

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_GUARD, EXIT_PROPERTY = 0, 1, 2, 3, 4
REGIONS = ("mac1", "mac2", "very-strong", "strong", "sato", "hk", "sdrs", "successive")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _stable(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _with_hash(report: dict) -> dict:
    body = json.dumps(report, sort_keys=True, separators=(",", ":"), allow_nan=False)
    report = dict(report)
    report["report_sha256"] = hashlib.sha256(body.encode()).hexdigest()
    return report


def channel_digest(ch) -> str:
    body = json.dumps(channel_to_dict(ch), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(body.encode()).hexdigest()


class _Timer:
    def __init__(self, enabled: bool):
        self.enabled = enabled
        self.t = time.perf_counter()

    def stage(self, name: str):
        now = time.perf_counter()
        if self.enabled:
            print(f"[timing] {name}: {now - self.t:.3f} s", file=sys.stderr)
        self.t = now


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _parse_dist(text: str | None, k: int, name: str) -> np.ndarray:
    if text is None:
        return np.full(k, 1.0 / k)
    try:
        vals = np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise ValidationError(f"{name}: expected comma-separated probabilities, got {text!r}") from exc
    if vals.size != k or np.any(vals < 0) or abs(vals.sum() - 1) > 1e-9:
        raise ValidationError(f"{name}: need {k} nonnegative probabilities summing to 1, got {text!r}")
    return vals / vals.sum()


def _region_list(text: str) -> list[str]:
    names = [w.strip() for w in text.split(",") if w.strip()]
    bad = [w for w in names if w not in REGIONS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"unknown region(s) {bad}; choose from {', '.join(REGIONS)}")
    return list(dict.fromkeys(names))


def _echo(args, keys) -> dict:
    out = {"command": args.command, "version": __version__}
    for k in keys:
        v = getattr(args, k)
        out[k.replace("_", "-")] = os.path.basename(v) if k == "channel" else v
    return out


# ------------------------------------------------------------------ region

def cmd_region(args) -> int:
    timer = _Timer(args.timings)
    ch = load_channel(args.channel)
    timer.stage("load")
    grid = DistGrid(args.grid_step)
    threads = args.threads
    pairs = grid.pairs(ch.nx1, ch.nx2)
    names = args.which
    hk_inputs = None
    if any(n in names for n in ("hk", "sdrs", "sato")):
        hk_inputs = enumerate_hk_inputs(ch.nx1, ch.nx2, grid, args.hk_max_aux, args.hk_step)
    regions = {}
    warn_list = []
    classification = {}
    for name in names:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RegimeWarning)
            if name in ("mac1", "mac2"):
                r = mac_capacity_region(induced_mac(ch, int(name[-1])), pairs, threads)
            elif name == "very-strong":
                rep = classify_very_strong(ch, grid, threads)
                classification["very_strong"] = rep.as_dict()
                r = very_strong_capacity_region(ch, pairs, n_jobs=threads)
                if not rep.holds:
                    warnings.warn("very-strong region computed on a channel not certified very strong", RegimeWarning)
            elif name == "strong":
                rep = classify_strong(ch, grid, threads)
                classification["strong"] = rep.as_dict()
                r = strong_capacity_region(ch, pairs, n_jobs=threads)
                if not rep.holds:
                    warnings.warn("strong region computed on a channel not certified strong", RegimeWarning)
            elif name == "sato":
                # include the marginals induced by the HK family so the outer bound covers it
                fam = _merge_pairs(pairs, hk_input_pairs(hk_inputs, ch.nx1, ch.nx2))
                r = sato_outer_region(ch, fam, threads)
            elif name == "hk":
                r = hk_region(ch, hk_inputs, threads)
            elif name == "sdrs":
                r = sd_rs_region(ch, hk_inputs, threads)
            else:
                r = successive_region(ch, pairs, threads)
        for w in caught:
            warn_list.append({"region": name, "message": str(w.message)})
            print(f"warning: {name}: {w.message}", file=sys.stderr)
        regions[name] = r
        timer.stage(name)

    out = Path(args.out)
    if args.format == "csv":
        for name, r in regions.items():
            _write(out / f"region_{name}.csv", region_to_csv(r))
    elif args.format == "svg":
        _write(out / "regions.svg", regions_svg(regions))
    report = {
        "run": _echo(args, ("channel", "which", "grid_step", "hk_max_aux", "hk_step", "format")),
        "channel_sha256": channel_digest(ch),
        "grid": {"step": grid.step, "points": len(pairs),
                 "hk_inputs": None if hk_inputs is None else len(hk_inputs)},
        "regions": {n: {"vertices": [[float(a), float(b)] for a, b in r.vertices],
                        "area": r.area, "max_sum_rate": r.max_sum_rate()} for n, r in regions.items()},
        "classification": classification,
        "warnings": warn_list,
    }
    _write(out / "report.json", _stable(_with_hash(report)))
    timer.stage("write")
    for name, r in regions.items():
        print(f"{name}: {len(r)} vertices, max sum rate {r.max_sum_rate():.6f}")
    return EXIT_OK


def _merge_pairs(a, b):
    seen = {}
    for p1, p2 in list(a) + list(b):
        key = (tuple(np.round(p1, 12)), tuple(np.round(p2, 12)))
        seen.setdefault(key, (p1, p2))
    return list(seen.values())


# ---------------------------------------------------------------- classify

def cmd_classify(args) -> int:
    ch = load_channel(args.channel)
    grid = DistGrid(args.grid_step)
    reps = {"very_strong": classify_very_strong(ch, grid, args.threads),
            "strong": classify_strong(ch, grid, args.threads)}
    for name, rep in reps.items():
        label = name.replace("_", " ")
        verdict = "holds" if rep.holds else "not certified"
        w1, w2 = rep.witness
        print(f"{label} interference: {verdict} on the grid (step {grid.step:g}, {rep.points} points); "
              f"worst margin {rep.worst_margin:.6g} bits at p1={list(w1)}, p2={list(w2)}")
    if reps["very_strong"].holds:
        overall = "very_strong"
    elif reps["strong"].holds:
        overall = "strong"
    else:
        overall = "unclassified"
    print(f"verdict: {overall}")
    if args.out:
        report = {
            "run": _echo(args, ("channel", "grid_step")),
            "channel_sha256": channel_digest(ch),
            "verdict": overall,
            "reports": {k: v.as_dict() for k, v in reps.items()},
        }
        _write(Path(args.out), _stable(_with_hash(report)))
    return EXIT_OK


# ---------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    timer = _Timer(args.timings)
    ch = load_channel(args.channel)
    mac = induced_mac(ch, args.receiver)
    p1 = _parse_dist(args.p1, mac.nx1, "--p1")
    p2 = _parse_dist(args.p2, mac.nx2, "--p2")
    if args.r1 < 0 or args.r2 < 0:
        raise ValidationError("rates must be nonnegative")
    rep = simulate(mac, p1, p2, args.n, args.r1, args.r2, samples=args.samples, seed=args.seed,
                   delta=args.delta, n_jobs=args.threads)
    timer.stage("simulate")
    report = {
        "run": _echo(args, ("channel", "receiver", "n", "r1", "r2", "samples", "seed", "delta")),
        "channel_sha256": channel_digest(ch),
        "simulation": rep,
    }
    text = _stable(_with_hash(report))
    if args.out:
        _write(Path(args.out), text)
    s = rep["summary"]
    print(f"n={args.n} rates=({args.r1}, {args.r2}) messages={rep['messages']}: mean error {s['mean_error']:.6f} "
          f"(min {s['min_error']:.6f}, max {s['max_error']:.6f}); POVM valid: {s['povm_valid']}")
    return EXIT_OK


# -------------------------------------------------------------- properties

def cmd_properties(args) -> int:
    rep = property_harness(args.trials, args.seed, faults=tuple(args.inject or ()))
    for name, c in rep["checks"].items():
        status = "ok" if c["violations"] == 0 else f"{c['violations']} violation(s)"
        wm = "n/a" if c["worst_margin"] is None else f"{c['worst_margin']:.3g}"
        print(f"{name}: {status} (worst margin {wm})")
    for f in rep["failures"][:20]:
        print(f"violation: {f['check']} trial {f['trial']} margin {f['margin']:.3g}", file=sys.stderr)
    if args.out:
        _write(Path(args.out), _stable(_with_hash({"run": _echo(args, ("seed", "trials")), "properties": rep})))
    return EXIT_OK if rep["passed"] else EXIT_PROPERTY


# ------------------------------------------------------------------ parser

def _positive_step(text: str) -> float:
    try:
        v = float(text)
        DistGrid(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qicrates", description="Rate regions and decoder simulations for cc-qq interference channels.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, grid=True):
        if grid:
            sp.add_argument("--grid-step", type=_positive_step, default=0.0625,
                            help="simplex grid step for input distributions (default 1/16)")
        sp.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads (results do not depend on this)")
        sp.add_argument("--timings", action="store_true", help="print stage wall-clock times to stderr")

    r = sub.add_parser("region", help="compute and export rate regions")
    r.add_argument("channel", help="channel file (JSON)")
    r.add_argument("--which", type=_region_list, default=["strong"],
                   help=f"comma-separated regions among {', '.join(REGIONS)}")
    r.add_argument("--hk-max-aux", type=int, default=None,
                   help="auxiliary alphabet size for genuine HK splits (default |X|)")
    r.add_argument("--hk-step", type=_positive_step, default=0.25,
                   help="grid step for the personal/common split distributions (default 1/4)")
    r.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    r.add_argument("--out", default=".", help="output directory (default: current)")
    common(r)
    r.set_defaults(func=cmd_region)

    c = sub.add_parser("classify", help="grid-certify very strong / strong interference")
    c.add_argument("channel")
    c.add_argument("--out", default=None, help="optional report path")
    common(c)
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("simulate", help="simulate the simultaneous decoder on an induced MAC")
    s.add_argument("channel")
    s.add_argument("--receiver", type=int, choices=(1, 2), default=1)
    s.add_argument("--n", type=int, required=True, help="block length")
    s.add_argument("--r1", type=float, required=True)
    s.add_argument("--r2", type=float, required=True)
    s.add_argument("--p1", default=None, help="input distribution of sender 1, e.g. 0.5,0.5 (default uniform)")
    s.add_argument("--p2", default=None)
    s.add_argument("--samples", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--delta", type=float, default=0.2)
    s.add_argument("--out", default=None, help="optional report path")
    common(s, grid=False)
    s.set_defaults(func=cmd_simulate)

    q = sub.add_parser("properties", help="run the operator-inequality suite")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--trials", type=int, default=100)
    q.add_argument("--inject", action="append", choices=FAULTS, help="inject a faulty fixture (testing)")
    q.add_argument("--out", default=None)
    q.set_defaults(func=cmd_properties, threads=1, timings=False)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return int(exc.code or 0)
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValidationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
