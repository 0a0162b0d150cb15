"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 matching budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from collections import OrderedDict
from pathlib import Path

from . import __version__
from .analysis import prune_threshold, threshold_curve, threshold_for_fraction, tree_metrics
from .errors import CombinatorialBudgetExceeded, SessionTreeError
from .export import DotOptions, export_dot, load_tree_with_meta, save_tree
from .gaze import (
    STABLE_EYE_METRIC,
    aoi_stats_csv,
    read_aois_json,
    read_fixations_csv,
    read_windows_csv,
    run_pipeline,
)
from .merge import DEFAULT_BUDGET, merge_all
from .session import build_session_tree, read_session_log
from .stats import compare_groups, comparison_table_csv
from .tree import serialize
from .weights import MODES, STABILIZED, WeightConfig, subtree_weight

log = logging.getLogger("sessiontree")

EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _config(args) -> WeightConfig:
    try:
        return WeightConfig(args.mode, args.log_base)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _add_weight_args(p):
    p.add_argument("--mode", choices=MODES, default=STABILIZED, help="subtree weight variant")
    p.add_argument("--log-base", type=float, default=2.0, help="logarithm base (> 1)")


def cmd_parse(args):
    records = read_session_log(args.log)
    trees = {r.session_id: build_session_tree(r) for r in records}
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for rec in records:
            meta = {"session_id": rec.session_id, "group": rec.group}
            save_tree(trees[rec.session_id], out / f"{rec.session_id}.json", meta)
        log.info("wrote %d session trees to %s", len(records), out)
    else:
        for rec in records:
            meta = {"session_id": rec.session_id, "group": rec.group}
            sys.stdout.write(serialize(trees[rec.session_id], meta) + "\n")


def cmd_merge(args):
    config = _config(args)
    records = read_session_log(args.log)
    if args.group:
        records = [r for r in records if r.group in args.group]
    trees = [build_session_tree(r) for r in records]
    combined = merge_all(trees, config, budget=args.budget, greedy_fallback=args.greedy_fallback)
    meta = {
        **config.as_meta(),
        "n_sessions": len(records),
        "groups": sorted({r.group for r in records}),
        "budget": args.budget,
        "greedy_fallback": args.greedy_fallback,
        "root_subtree_weight": subtree_weight(combined, config),
    }
    _write(serialize(combined, meta) + "\n", args.output)


def cmd_prune(args):
    tree, meta = load_tree_with_meta(args.tree)
    if args.fraction is not None:
        n = args.sessions if args.sessions is not None else meta.get("n_sessions")
        if n is None:
            raise UsageError("--fraction needs --sessions when the tree file has no n_sessions")
        threshold = threshold_for_fraction(args.fraction, int(n))
    else:
        threshold = args.threshold
    pruned = prune_threshold(tree, threshold)
    _write(serialize(pruned, {**meta, "threshold": threshold}) + "\n", args.output)


def cmd_curve(args):
    tree, _ = load_tree_with_meta(args.tree)
    _write(threshold_curve(tree).to_csv(), args.output)


def cmd_metrics(args):
    config = _config(args)
    tree, _ = load_tree_with_meta(args.tree)
    metrics = tree_metrics(tree, config).to_dict()
    metrics["subtree_weight"] = metrics["root_subtree_weight"]
    _write(json.dumps(metrics, indent=2, sort_keys=True) + "\n", args.output)


def _read_long_csv(path):
    """``feature,group,value`` rows -> {feature: {group: [values]}} plus group order."""
    table: "OrderedDict[str, dict[str, list[float]]]" = OrderedDict()
    groups: list[str] = []
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.DictReader(fh), start=2):
                feature, group = row["feature"], row["group"]
                value = float(row["value"])
                table.setdefault(feature, {}).setdefault(group, []).append(value)
                if group not in groups:
                    groups.append(group)
    except (KeyError, ValueError, TypeError) as exc:
        raise SessionTreeError(f"{path}: bad comparison row: {exc}") from None
    except OSError as exc:
        raise SessionTreeError(f"cannot read {path}: {exc}") from None
    return table, groups


def cmd_compare(args):
    table, groups = _read_long_csv(args.csv)
    if args.groups:
        pair = [g.strip() for g in args.groups.split(",")]
        if len(pair) != 2:
            raise UsageError("--groups takes exactly two comma-separated labels")
    elif len(groups) == 2:
        pair = groups
    else:
        raise UsageError(f"found groups {groups}; choose two with --groups A,B")
    rows = [(f, by_group.get(pair[0], []), by_group.get(pair[1], [])) for f, by_group in table.items()]
    result = compare_groups(rows, args.method, args.alpha)
    _write(comparison_table_csv(result), args.output)


def cmd_gaze(args):
    fixations = read_fixations_csv(args.fixations)
    aois = read_aois_json(args.aois)
    windows = read_windows_csv(args.windows) if args.windows else None
    rows, eyes = run_pipeline(fixations, aois, windows, args.min_duration)
    _write(aoi_stats_csv(rows), args.output)
    if args.eyes_out:
        meta = {"stable_eye_metric": STABLE_EYE_METRIC, "min_duration_ms": args.min_duration, "eyes": eyes}
        Path(args.eyes_out).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_dot(args):
    tree, _ = load_tree_with_meta(args.tree)
    try:
        options = DotOptions(args.min_penwidth, args.max_penwidth, args.show_labels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(export_dot(tree, options), args.output)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sessiontree", description="Session tree construction, merging and analysis.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("parse", help="session log -> one tree JSON per session")
    p.add_argument("log")
    p.add_argument("-o", "--out-dir", help="directory for <session_id>.json files (default: JSON lines on stdout)")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("merge", help="merge all sessions of a log into a combined tree")
    p.add_argument("log")
    p.add_argument("-o", "--output")
    p.add_argument("--group", action="append", help="only merge sessions of this group (repeatable)")
    _add_weight_args(p)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max evaluated matchings per pairwise merge")
    p.add_argument("--greedy-fallback", action="store_true", help="pair largest-first once the budget is spent")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("prune", help="keep edges with weight >= threshold")
    p.add_argument("tree")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--threshold", type=int)
    g.add_argument("--fraction", type=float, help="threshold = ceil(fraction * sessions)")
    p.add_argument("--sessions", type=int, help="session count for --fraction")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("curve", help="nodes remaining per threshold (CSV)")
    p.add_argument("tree")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("metrics", help="structural metrics of a tree (JSON)")
    p.add_argument("tree")
    _add_weight_args(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="Mann-Whitney U per feature from feature,group,value CSV")
    p.add_argument("csv")
    p.add_argument("--groups", help="two group labels, first one is sample A")
    p.add_argument("--method", choices=("auto", "exact", "normal"), default="auto")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gaze", help="AOI fixation counts and dwell times (CSV)")
    p.add_argument("fixations", help="participant,eye,stimulus,x,y,start_ms,duration_ms CSV")
    p.add_argument("aois", help="JSON list of {name, stimulus, rect:[x,y,w,h]}")
    p.add_argument("--windows", help="participant,stimulus,enter_ms,first_interaction_ms CSV")
    p.add_argument("--min-duration", type=int, default=104, help="minimum fixation duration in ms (inclusive)")
    p.add_argument("--eyes-out", help="write the chosen eye per participant as JSON")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gaze)

    p = sub.add_parser("dot", help="Graphviz DOT rendering of a tree")
    p.add_argument("tree")
    p.add_argument("--min-penwidth", type=float, default=1.0)
    p.add_argument("--max-penwidth", type=float, default=8.0)
    p.add_argument("--show-labels", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except UsageError as exc:
        print(f"sessiontree: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CombinatorialBudgetExceeded as exc:
        print(f"sessiontree: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SessionTreeError, ValueError, OSError) as exc:
        print(f"sessiontree: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
