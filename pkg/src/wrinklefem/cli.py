"""Command-line driver.

Subcommands::

    wrinklefem run <case.json>        execute a case file, write results
    wrinklefem bench <name|--all>     build and run a packaged benchmark
    wrinklefem validate <case.json>   schema + consistency check only
    wrinklefem report <results-dir>   probes vs references, pass/fail table

Results go to ``--out`` when given, else ``$WRINKLEFEM_OUTPUT_ROOT/<case
name>``, else ``./wrinklefem-out/<case name>``.

Exit codes: 0 success, 1 invalid input, 2 nonconvergence (the residual
history and any completed snapshots are still written).
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import math
import os
import sys

from . import __version__
from .benchmarks import build_case, case_names
from .casefile import CaseValidationError, load_case, validate_case
from .results import run_case

OUTPUT_ROOT_ENV = "WRINKLEFEM_OUTPUT_ROOT"

# builders whose mesh density is a single n (--mesh maps onto it)
_SQUARE_MESH_CASES = ("corner", "airbag", "blanket")
_RATIO_CASES = ("bending", "corner")


def _output_dir(args, case_name: str) -> str:
    if args.out:
        return args.out
    root = os.environ.get(OUTPUT_ROOT_ENV, "wrinklefem-out")
    return os.path.join(root, case_name)


def _execute(doc: dict, outdir: str) -> int:
    res = run_case(doc, outdir)
    for name, step, value in res.probe_rows:
        print(f"  probe {name} @ step {step}: {value:.6g}")
    print(f"wrote {outdir} ({'converged' if res.converged else 'DID NOT CONVERGE'})")
    if not res.converged:
        print(f"error: {res.error}", file=sys.stderr)
        return 2
    return 0


def _cmd_run(args) -> int:
    try:
        doc = load_case(args.case)
    except (OSError, ValueError) as exc:
        print(f"invalid case file: {exc}", file=sys.stderr)
        return 1
    return _execute(doc, _output_dir(args, doc["name"]))


def _parse_opt(text: str):
    """key=value with value parsed as JSON when possible, else string."""
    key, sep, raw = text.partition("=")
    if not sep:
        raise ValueError(f"expected key=value, got '{text}'")
    try:
        return key, json.loads(raw)
    except json.JSONDecodeError:
        return key, raw


def _bench_options(args, name: str) -> dict:
    opts: dict = {}
    if args.model:
        opts["model"] = args.model
    if args.mesh is not None:
        if name not in _SQUARE_MESH_CASES:
            raise ValueError(
                f"--mesh applies to {_SQUARE_MESH_CASES}; '{name}' uses the "
                "published mesh (override with --opt nx=... --opt ny=...)")
        opts["n"] = args.mesh
    if args.ratio is not None:
        if name not in _RATIO_CASES:
            raise ValueError(f"--ratio applies to {_RATIO_CASES}")
        opts["ratio"] = args.ratio
    if args.eta is not None:
        opts["eta"] = args.eta
    for item in args.opt or []:
        key, value = _parse_opt(item)
        opts[key] = value
    return opts


def _run_one_bench(name: str, opts: dict, outdir: str | None, args) -> int:
    case = build_case(name, **opts)
    doc = case.document
    out = outdir or _output_dir(args, doc["name"])
    print(f"running {doc['name']} -> {out}")
    return _execute(doc, out)


def _cmd_bench(args) -> int:
    if args.all:
        names = case_names()
    elif args.name:
        names = (args.name,)
    else:
        print("bench: give a case name or --all", file=sys.stderr)
        return 1
    try:
        jobs = [(n, _bench_options(args, n)) for n in names]
    except (TypeError, ValueError) as exc:
        print(f"invalid bench options: {exc}", file=sys.stderr)
        return 1
    # validate names/options before any run
    try:
        for name, opts in jobs:
            build_case(name, **opts)
    except ValueError as exc:
        print(f"invalid bench case: {exc}", file=sys.stderr)
        return 1

    if args.all and args.jobs > 1:
        codes = []
        with concurrent.futures.ProcessPoolExecutor(args.jobs) as pool:
            futs = [pool.submit(_bench_worker, name, opts,
                                _output_dir(args, build_case(name, **opts)
                                            .document["name"]))
                    for name, opts in jobs]
            codes = [f.result() for f in futs]
        return max(codes)
    code = 0
    for name, opts in jobs:
        code = max(code, _run_one_bench(name, opts, None, args))
    return code


def _bench_worker(name: str, opts: dict, outdir: str) -> int:
    case = build_case(name, **opts)
    return _execute(case.document, outdir)


def _cmd_validate(args) -> int:
    try:
        with open(args.case) as fh:
            doc = json.load(fh)
    except OSError as exc:
        print(f"cannot read case file: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"not valid JSON: {exc}", file=sys.stderr)
        return 1
    try:
        validate_case(doc)
    except (CaseValidationError, ValueError) as exc:
        print(f"invalid case:\n{exc}", file=sys.stderr)
        return 1
    print(f"{args.case}: OK")
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _load_bundle(dirpath: str):
    meta_path = os.path.join(dirpath, "metadata.json")
    probes_path = os.path.join(dirpath, "probes.csv")
    with open(meta_path) as fh:
        meta = json.load(fh)
    values: dict[tuple[str, int], float] = {}
    with open(probes_path) as fh:
        for row in csv.DictReader(fh):
            values[(row["probe"], int(row["step"]))] = float(row["value"])
    return meta, values


def _check_reference(ref: dict, values) -> tuple[str, float, float, bool]:
    """Returns (label, expected, actual, ok)."""
    step = ref["step"]
    kind = ref["kind"]
    if kind == "value":
        actual = values[(ref["probe"], step)]
        expected = ref["value"]
        tol = ref.get("rtol", 0.0) * abs(expected) + ref.get("atol", 0.0)
        return ref["probe"], expected, actual, abs(actual - expected) <= tol
    if kind == "mean":
        vals = [values[(p, step)] for p in ref["probes"]]
        actual = sum(vals) / len(vals)
        expected = ref["value"]
        tol = ref.get("rtol", 0.0) * abs(expected) + ref.get("atol", 0.0)
        label = f"mean({len(vals)} probes)"
        return label, expected, actual, abs(actual - expected) <= tol
    if kind == "rms":
        devs = [values[(p, step)] - v
                for p, v in zip(ref["probes"], ref["values"], strict=True)]
        rms = math.sqrt(sum(d * d for d in devs) / len(devs))
        label = f"rms({len(devs)} probes)"
        return label, ref["tol"], rms, rms <= ref["tol"]
    raise ValueError(f"unknown reference kind '{kind}'")


def _report_dir(dirpath: str) -> tuple[list[str], bool]:
    meta, values = _load_bundle(dirpath)
    case = meta["case"]
    lines = [f"case {case['name']}: model={case['model']} "
             f"converged={meta['converged']}"]
    ok_all = meta["converged"]
    refs = case.get("references", [])
    if not refs:
        lines.append("  (no references recorded)")
    for ref in refs:
        try:
            label, expected, actual, ok = _check_reference(ref, values)
        except KeyError as exc:
            lines.append(f"  MISSING probe value {exc}")
            ok_all = False
            continue
        mark = "pass" if ok else "FAIL"
        if ref["kind"] == "rms":
            detail = f"rms={actual:.6g} tol={expected:.6g}"
        else:
            detail = f"got {actual:.6g}, want {expected:.6g}"
        note = f"  [{ref['note']}]" if ref.get("note") else ""
        src = ref.get("source", "")
        lines.append(f"  {mark}  step {ref['step']:>3} {label:<22} {detail}"
                     f" ({src}){note}")
        informational = "informational" in ref.get("note", "")
        ok_all = ok_all and (ok or informational)
    return lines, ok_all


def _cmd_report(args) -> int:
    target = args.results
    bundles = []
    if os.path.isfile(os.path.join(target, "metadata.json")):
        bundles = [target]
    elif os.path.isdir(target):
        bundles = sorted(
            os.path.join(target, d) for d in os.listdir(target)
            if os.path.isfile(os.path.join(target, d, "metadata.json")))
    if not bundles:
        print(f"no result bundles under {target}", file=sys.stderr)
        return 1
    all_ok = True
    for b in bundles:
        try:
            lines, ok = _report_dir(b)
        except (OSError, ValueError, KeyError) as exc:
            print(f"{b}: unreadable bundle ({exc})", file=sys.stderr)
            return 1
        print("\n".join(lines))
        all_ok = all_ok and ok
    print("overall:", "pass" if all_ok else "FAIL")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wrinklefem",
        description="Membrane wrinkling finite elements: run case files and "
                    "packaged benchmarks.")
    ap.add_argument("--version", action="version",
                    version=f"wrinklefem {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a JSON case file")
    p_run.add_argument("case")
    p_run.add_argument("--out", help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_bench = sub.add_parser("bench", help="run a packaged benchmark case")
    p_bench.add_argument("name", nargs="?", choices=case_names())
    p_bench.add_argument("--all", action="store_true",
                         help="run every benchmark with default options")
    p_bench.add_argument("--model", choices=("svk", "stress", "strain",
                                             "mixed"))
    p_bench.add_argument("--mesh", type=int,
                         help="elements per side (square-mesh cases)")
    p_bench.add_argument("--ratio", type=float,
                         help="load ratio (bending: 2M/PH, corner: T1/T2)")
    p_bench.add_argument("--eta", type=float,
                         help="residual-stiffness factor override")
    p_bench.add_argument("--opt", action="append", metavar="KEY=VALUE",
                         help="extra builder option (repeatable)")
    p_bench.add_argument("--out", help="output directory (single case only)")
    p_bench.add_argument("--jobs", type=int, default=1,
                         help="parallel workers for --all")
    p_bench.set_defaults(func=_cmd_bench)

    p_val = sub.add_parser("validate", help="check a case file and exit")
    p_val.add_argument("case")
    p_val.set_defaults(func=_cmd_validate)

    p_rep = sub.add_parser("report",
                           help="summarize probe values against references")
    p_rep.add_argument("results", help="result directory (or parent of "
                                       "several)")
    p_rep.set_defaults(func=_cmd_report)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep 2 reserved for nonconvergence
        return 0 if exc.code in (0, None) else 1
    if args.command == "bench" and args.out and args.all:
        print("--out is only valid for a single bench case", file=sys.stderr)
        return 1
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
