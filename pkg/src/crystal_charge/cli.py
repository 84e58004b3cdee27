"""Command-line front end for verification runs, enumeration and figure data.

Exit codes: 0 on success, 1 when any check reports a violation, 2 on usage
or configuration errors.  All runs are deterministic for a fixed seed; the
CRYSTAL_CHARGE_WORKERS environment variable overrides --workers.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from contextlib import contextmanager

from .charge_engine import (UnsupportedDimensionError, factor_multiset_oracle,
                            potential, recipe_for, spectrum_to_json)
from .crystal import Crystal, addable, load_crystal, removable, targets
from .hypercube_lab import (DEDEKIND, enumerate_ideals, sample_scan,
                            stratified_scan)
from .lattice import charge_of_box
from .lemma_suite import (check_conjecture, check_lemma5, random_crystal,
                          run_conjecture_scan, run_lemma_instances,
                          write_reports_jsonl)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


def _resolve_workers(args) -> int:
    env = os.environ.get("CRYSTAL_CHARGE_WORKERS")
    if env:
        return max(1, int(env))
    if getattr(args, "workers", None):
        return max(1, args.workers)
    return os.cpu_count() or 1


@contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fp:
            yield fp


def _require_recipe(n: int):
    try:
        return recipe_for(n)
    except UnsupportedDimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None


def cmd_verify(args) -> int:
    recipe = _require_recipe(args.n)
    if recipe is None:
        return EXIT_USAGE
    if args.infile:
        delta = load_crystal(args.infile, n=args.n)
        if delta.n != args.n:
            print(f"error: partition file has n={delta.n}, expected {args.n}",
                  file=sys.stderr)
            return EXIT_USAGE
        reports = [check_conjecture(delta, recipe)]
        if potential(delta, recipe) != factor_multiset_oracle(delta, recipe):
            reports[0].passed = False
            reports[0].observed = "spectrum mismatch between rule table and factor walk"
    else:
        reports = run_conjecture_scan(args.n, args.boxes, args.seeds, args.seed,
                                      cross_check_oracle=True)
    with _open_out(args.out) as fp:
        failures = write_reports_jsonl(reports, fp)
    print(f"verify: n={args.n} crystals={len(reports)} violations={failures}",
          file=sys.stderr)
    return EXIT_VIOLATION if failures else EXIT_OK


def cmd_lemma(args) -> int:
    recipe = _require_recipe(args.n)
    if recipe is None:
        return EXIT_USAGE
    if args.which == 5:
        return _lemma5_scan(args)
    ran, failures = run_lemma_instances(args.which, args.n, args.samples,
                                        args.seed, max_boxes=args.boxes)
    with _open_out(args.out) as fp:
        write_reports_jsonl(failures, fp)
    print(f"lemma{args.which}: n={args.n} instances={ran} "
          f"violations={len(failures)}", file=sys.stderr)
    return EXIT_VIOLATION if failures else EXIT_OK


def _lemma5_scan(args) -> int:
    recipe = _require_recipe(args.n)
    if recipe is None:
        return EXIT_USAGE
    if args.exhaustive:
        dims = [args.d] if args.d else list(range(1, min(args.n, 5) + 1))
    else:
        dims = [args.d] if args.d else list(range(1, args.n + 1))
    strategy = getattr(args, "strategy", "grow_to")
    total_violations = 0
    lines = []
    for d in dims:
        exhaustive = args.exhaustive or d <= 5
        if exhaustive and d > 5:
            print(f"error: exhaustive mode supports d <= 5, got d={d}",
                  file=sys.stderr)
            return EXIT_USAGE
        if exhaustive:
            hist = stratified_scan(d, args.n, seed=args.seed, exhaustive=True)
        elif strategy == "grow_to":
            per_stratum = max(1, -(-args.samples // ((1 << d) + 1)))
            hist = stratified_scan(d, args.n, per_stratum, args.seed,
                                   exhaustive=False,
                                   workers=_resolve_workers(args))
        else:
            hist = sample_scan(d, args.n, args.samples, strategy, args.seed,
                               workers=_resolve_workers(args))
        total_violations += len(hist.violations)
        lines.append({"d": d, "n": args.n, "mode": hist.mode,
                      "ideals": hist.processed,
                      "violations": len(hist.violations)})
    with _open_out(args.out) as fp:
        for line in lines:
            fp.write(json.dumps(line, sort_keys=True))
            fp.write("\n")
    for line in lines:
        print(f"lemma5: d={line['d']} n={line['n']} mode={line['mode']} "
              f"ideals={line['ideals']} violations={line['violations']}",
              file=sys.stderr)
    return EXIT_VIOLATION if total_violations else EXIT_OK


def cmd_lemma5(args) -> int:
    return _lemma5_scan(args)


def cmd_enumerate(args) -> int:
    if not 1 <= args.d <= 6:
        print("error: enumeration supports 1 <= d <= 6", file=sys.stderr)
        return EXIT_USAGE
    count = 0
    sink = None
    try:
        if args.out:
            sink = open(args.out, "w")
        for ideal in enumerate_ideals(args.d):
            count += 1
            if sink:
                cells = [[cell >> j & 1 for j in range(args.d)]
                         for cell in ideal.cells()]
                sink.write(json.dumps(cells))
                sink.write("\n")
    finally:
        if sink:
            sink.close()
    expected = DEDEKIND.get(args.d)
    print(f"enumerate: d={args.d} ideals={count}"
          + (f" expected={expected}" if expected else ""))
    return EXIT_OK if expected is None or count == expected else EXIT_VIOLATION


def _projection_payload(delta: Crystal, recipe) -> dict:
    adds = sorted(addable(delta))
    rems = sorted(removable(delta))
    spectrum = potential(delta, recipe)
    poles = sorted(c for c, o in spectrum.items() if o == 1)
    markers = sorted(targets(delta))
    slices = {}
    for b in sorted(delta.boxes):
        slices.setdefault(b[3:], {"boxes": [], "addable": [], "removable": []})
        slices[b[3:]]["boxes"].append(list(b[:3]))
    for b in adds:
        slices.setdefault(b[3:], {"boxes": [], "addable": [], "removable": []})
        slices[b[3:]]["addable"].append(list(b[:3]))
    for b in rems:
        slices.setdefault(b[3:], {"boxes": [], "addable": [], "removable": []})
        slices[b[3:]]["removable"].append(list(b[:3]))
    return {
        "n": delta.n,
        "boxes": len(delta),
        "slices": [{"tail": list(tail), **content}
                   for tail, content in sorted(slices.items())],
        "marker_charges": [list(c) for c in markers],
        "pole_charges": [list(c) for c in poles],
        "coincide": markers == set(poles) or sorted(markers) == poles,
        "spectrum": spectrum_to_json(spectrum),
    }


def cmd_figure_data(args) -> int:
    if args.mode == "bubbles":
        recipe = _require_recipe(args.n)
        if recipe is None:
            return EXIT_USAGE
        exhaustive = args.d <= 5 if args.exhaustive is None else args.exhaustive
        if not exhaustive and args.strategy != "grow_to":
            hist = sample_scan(args.d, args.n, args.samples, args.strategy,
                               args.seed, workers=_resolve_workers(args))
        else:
            per_stratum = max(1, -(-args.samples // ((1 << args.d) + 1)))
            hist = stratified_scan(args.d, args.n, per_stratum, args.seed,
                                   exhaustive=exhaustive,
                                   workers=_resolve_workers(args))
        with _open_out(args.out) as fp:
            hist.write_csv(fp)
        print(f"figure-data bubbles: d={args.d} n={args.n} ideals={hist.processed} "
              f"violations={len(hist.violations)}", file=sys.stderr)
        return EXIT_VIOLATION if hist.violations else EXIT_OK
    # projection
    recipe = _require_recipe(args.n)
    if recipe is None:
        return EXIT_USAGE
    if args.infile:
        delta = load_crystal(args.infile, n=args.n)
    else:
        delta = random_crystal(args.n, args.boxes, f"project/{args.n}/{args.seed}")
    payload = _projection_payload(delta, recipe)
    with _open_out(args.out) as fp:
        fp.write(json.dumps(payload, sort_keys=True, indent=1))
        fp.write("\n")
    return EXIT_OK if payload["coincide"] else EXIT_VIOLATION


def cmd_project(args) -> int:
    args.mode = "projection"
    return cmd_figure_data(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crystal-charge",
        description="Verification engine for charge functions of n-dimensional partitions")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, n_default=None):
        p.add_argument("--n", type=int, default=n_default, required=n_default is None,
                       help="ambient dimension")
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
        p.add_argument("--workers", type=int, default=0,
                       help="worker processes (0 = auto)")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("verify", help="pole/target correspondence on random or loaded crystals")
    common(p)
    p.add_argument("--boxes", type=int, default=200, help="boxes per grown crystal")
    p.add_argument("--seeds", type=int, default=100, help="number of random crystals")
    p.add_argument("--in", dest="infile", default=None, help="partition JSON file")

    p = sub.add_parser("lemma", help="run one structural property suite")
    p.add_argument("which", type=int, choices=[1, 2, 3, 4, 5])
    common(p)
    p.add_argument("--samples", type=int, default=1000, help="instances or sampled ideals")
    p.add_argument("--boxes", type=int, default=30, help="max crystal size per instance")
    p.add_argument("--d", type=int, default=0, help="cube dimension (lemma 5 only)")
    p.add_argument("--exhaustive", action="store_true",
                   help="enumerate all cube ideals (lemma 5, d <= 5)")

    p = sub.add_parser("lemma5", help="hypercube potential bound, exhaustive or sampled")
    common(p)
    p.add_argument("--samples", type=int, default=10000, help="sampled ideals per cube dimension")
    p.add_argument("--d", type=int, default=0, help="restrict to one cube dimension")
    p.add_argument("--exhaustive", action="store_true", help="enumerate all ideals, d <= 5")
    p.add_argument("--strategy", choices=["grow_to", "closure", "walk"],
                   default="grow_to", help="sampler for non-exhaustive cubes")

    p = sub.add_parser("enumerate", help="enumerate cube order ideals")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--out", default=None, help="write one ideal per line (JSONL)")

    p = sub.add_parser("figure-data", help="emit bubble-plot CSV or projection JSON")
    p.add_argument("mode", choices=["bubbles", "projection"])
    common(p, n_default=5)
    p.add_argument("--d", type=int, default=4, help="cube dimension (bubbles)")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--exhaustive", action="store_true", default=None)
    p.add_argument("--strategy", choices=["grow_to", "closure", "walk"],
                   default="grow_to", help="sampler for non-exhaustive cubes")
    p.add_argument("--boxes", type=int, default=200, help="boxes for a grown crystal (projection)")
    p.add_argument("--in", dest="infile", default=None, help="partition JSON file (projection)")

    p = sub.add_parser("project", help="projection slices and pole/marker data for one crystal")
    common(p, n_default=5)
    p.add_argument("--boxes", type=int, default=200)
    p.add_argument("--in", dest="infile", default=None)

    return parser


_HANDLERS = {
    "verify": cmd_verify,
    "lemma": cmd_lemma,
    "lemma5": cmd_lemma5,
    "enumerate": cmd_enumerate,
    "figure-data": cmd_figure_data,
    "project": cmd_project,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())
