"""Command line entry point: ``slopebounds --data FILE --y Y --x X ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional

from .bounds import bound_inputs, envelope, envelope_grid_oracle
from .data import InteractionSpec, build_interactions, load_csv
from .estimator import results_agree
from .exceptions import NodeBudgetExceeded, SlopeBoundsError
from .linalg import simple_slope
from .search import BRUTE_FORCE_CAP, branch_and_bound, brute_force

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_BUDGET = 3

REPORT_KEYS = ("beta_simple", "lower", "upper", "argmin", "argmax", "nodes_popped",
               "nodes_pruned", "nodes_pushed", "elapsed_ms", "n", "p", "mode")

log = logging.getLogger("slopebounds")


def _num(v: float) -> float:
    return float(f"{v:.12g}")


def _labels(text: str):
    return [t.strip() for t in text.split(",") if t.strip()]


def _pair(text: str):
    parts = text.split(":")
    if len(parts) != 2 or not all(p.strip() for p in parts):
        raise argparse.ArgumentTypeError(f"expected A:B, got {text!r}")
    return tuple(p.strip() for p in parts)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="slopebounds",
        description="Exact minimum and maximum of a regression slope over every subset of covariates.",
    )
    ap.add_argument("--data", required=True, metavar="PATH", help="comma-separated file with a header row")
    ap.add_argument("--y", required=True, metavar="LABEL", help="response column")
    ap.add_argument("--x", required=True, metavar="LABEL", help="explanatory column")
    cov = ap.add_mutually_exclusive_group()
    cov.add_argument("--covariates", type=_labels, metavar="L1,L2,...")
    cov.add_argument("--all-others", action="store_true", help="use every other column as a covariate (default)")
    ap.add_argument("--interactions", type=_labels, default=[], metavar="L1,L2,...",
                    help="covariates whose pairwise products are added")
    ap.add_argument("--exclude-pair", type=_pair, action="append", default=[], metavar="A:B",
                    help="interaction pair to leave out (repeatable)")
    ap.add_argument("--mode", choices=("bb", "bf", "both"), default="bb")
    ap.add_argument("--node-budget", type=int, default=None, metavar="N")
    ap.add_argument("--brute-force-cap", type=int, default=BRUTE_FORCE_CAP, metavar="P")
    ap.add_argument("--format", choices=("json", "text"), default="json", dest="output_format")
    ap.add_argument("--grid-check", type=int, default=None, metavar="N",
                    help="audit the root envelope against an N x N grid search")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def build_report(data, result, mode: str) -> dict:
    ext = result.extrema
    return {
        "beta_simple": _num(simple_slope(data.x, data.y)),
        "lower": _num(ext.lower),
        "upper": _num(ext.upper),
        "argmin": data.label_subset(ext.argmin_subset),
        "argmax": data.label_subset(ext.argmax_subset),
        "nodes_popped": result.nodes_popped,
        "nodes_pruned": result.nodes_pruned,
        "nodes_pushed": result.nodes_pushed,
        "elapsed_ms": round(result.elapsed * 1000.0, 3),
        "n": data.n,
        "p": data.p,
        "mode": mode,
    }


def grid_audit(data, grid_n: int) -> dict:
    b = bound_inputs(data.x, data.y, data.s)
    exact = envelope(b)
    grid = envelope_grid_oracle(b, grid_n)
    slack = 1e-12 * (1.0 + abs(exact.lower) + abs(exact.upper))
    return {
        "grid_n": grid_n,
        "contained": exact.lower - slack <= grid.lower and grid.upper <= exact.upper + slack,
        "gap": _num(max(grid.lower - exact.lower, exact.upper - grid.upper, 0.0)),
    }


def format_text(report: dict) -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, float) and key != "elapsed_ms":
            value = f"{value:.12g}"
        elif isinstance(value, list):
            value = ", ".join(value) if value else "(none)"
        elif isinstance(value, dict):
            value = " ".join(f"{k}={format_text({k: v}).split(': ', 1)[1]}" for k, v in value.items())
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def run(args: argparse.Namespace) -> tuple[int, Optional[dict]]:
    covs = args.covariates if args.covariates is not None else None
    data = load_csv(args.data, args.y, args.x, covs)
    if args.interactions:
        data = build_interactions(data, InteractionSpec(args.interactions, args.exclude_pair))
    elif args.exclude_pair:
        raise SlopeBoundsError("--exclude-pair given without --interactions")
    if args.mode in ("bf", "both") and data.p > args.brute_force_cap:
        raise SlopeBoundsError(f"brute force needs p <= {args.brute_force_cap}, got p={data.p}")
    log.info("loaded n=%d p=%d from %s", data.n, data.p, args.data)

    try:
        if args.mode == "bf":
            result = brute_force(data, cap=args.brute_force_cap)
        else:
            result = branch_and_bound(data, node_budget=args.node_budget)
    except NodeBudgetExceeded as exc:
        report = build_report(data, exc.partial, args.mode)
        report["partial"] = True
        print(f"slopebounds: {exc}; reporting partial result", file=sys.stderr)
        return EXIT_BUDGET, report

    report = build_report(data, result, args.mode)
    if args.mode == "both":
        report["agreement"] = results_agree(result, brute_force(data, cap=args.brute_force_cap))
        if not report["agreement"]:
            print("slopebounds: branch and bound disagrees with brute force", file=sys.stderr)
    if args.grid_check is not None:
        report["grid_check"] = grid_audit(data, args.grid_check)
    return EXIT_OK, report


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        status, report = run(args)
    except SlopeBoundsError as exc:
        print(f"slopebounds: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.output_format == "json":
        print(json.dumps(report, indent=2, ensure_ascii=False))
    else:
        print(format_text(report))
    return status


if __name__ == "__main__":
    sys.exit(main())
