"""Command-line entry point: extract, micro-evaluate, macro-compare.

Exit codes: 0 success; 1 fatal error (bad arguments, unreadable inputs,
suite/config problems); 2 partial extraction (some source files errored,
the rest were analyzed and written).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ProjectConfig, load_profile, load_project_config
from .csvio import write_edges_csv
from .errors import RefGraphError
from .extractor import extract_project, filter_edges
from .macroeval import load_comparison_config, render_report, run_comparison
from .microeval import (
    clean_suite,
    evaluate_recall,
    extract_suite_graph,
    format_recall_table,
    load_suite,
)
from .model import ALL_EDGE_KINDS, EdgeKind, NormalizationProfile


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except RefGraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refgraph",
        description="Static dependency-graph extraction and evaluation.",
    )
    sub = parser.add_subparsers(required=True)

    extract = sub.add_parser("extract", help="extract a dependency graph from a source tree")
    extract.add_argument("--root", required=True, help="project root directory")
    extract.add_argument("--out", required=True, help="output CSV path")
    extract.add_argument("--config", help="project config file (key = value)")
    extract.add_argument(
        "--include-external", action="store_true",
        help="keep edges whose target lies outside the project",
    )
    extract.add_argument(
        "--kinds", help="comma-separated edge kinds to keep (default: all)",
    )
    extract.set_defaults(handler=cmd_extract)

    micro = sub.add_parser("micro", help="score a ground-truth suite")
    micro.add_argument("--suite", required=True, help="suite manifest path")
    micro.add_argument(
        "--mode", choices=("initial", "cleaned", "both"), default="both",
        help="evaluate the raw suite, the cleaned suite, or both (default)",
    )
    micro.add_argument("--profile", help="normalization profile file")
    micro.add_argument("--config", help="project config applied to case extraction")
    micro.set_defaults(handler=cmd_micro)

    macro = sub.add_parser("macro", help="compare edge lists from multiple tools")
    macro.add_argument("--config", required=True, help="comparison config file")
    macro.add_argument("--out", help="JSON report path (overrides config)")
    macro.set_defaults(handler=cmd_macro)
    return parser


def cmd_extract(args: argparse.Namespace) -> int:
    root = Path(args.root)
    config = load_project_config(args.config) if args.config else ProjectConfig()
    kinds = _parse_kinds(args.kinds)

    graph, project, _ = extract_project(root, config)
    graph = filter_edges(graph, include_external=args.include_external, kinds=kinds)
    write_edges_csv(graph, args.out)

    print(f"modules: {len(project.modules)}")
    print(f"nodes:   {graph.node_count}")
    print(f"edges:   {graph.edge_count}")
    for kind, count in graph.kind_counts().items():
        print(f"  {kind}: {count}")
    if project.file_errors:
        print(f"file errors: {len(project.file_errors)}", file=sys.stderr)
        for message in project.file_errors:
            print(f"  {message}", file=sys.stderr)
        return 2
    if project.diagnostics.counters.get("opaque_regions"):
        count = project.diagnostics.counters["opaque_regions"]
        print(f"files with opaque regions: {count}", file=sys.stderr)
        return 2
    return 0


def cmd_micro(args: argparse.Namespace) -> int:
    suite = load_suite(args.suite)
    if not suite.cases:
        print("error: suite has no cases", file=sys.stderr)
        return 1
    profile = load_profile(args.profile) if args.profile else NormalizationProfile()
    config = load_project_config(args.config) if args.config else None

    actual = extract_suite_graph(suite, config)
    initial = evaluate_recall(actual, suite, profile) if args.mode in ("initial", "both") else None
    cleaned = None
    if args.mode in ("cleaned", "both"):
        cleaned_suite = clean_suite(suite)
        cleaned = evaluate_recall(actual, cleaned_suite, profile)
        summary = cleaned_suite.cleanup
        assert summary is not None
        print(
            f"cleanup: {summary.initial_edges} edges - "
            + " - ".join(f"{n} {tag}" for tag, n in sorted(summary.removed_by_tag.items()))
            + f" = {summary.final_edges}; cases {summary.initial_cases} -> {summary.final_cases}"
        )
    print(format_recall_table(initial, cleaned))
    return 0


def cmd_macro(args: argparse.Namespace) -> int:
    config = load_comparison_config(args.config)
    if len(config.tools) < 2:
        print("error: comparison needs at least 2 tools", file=sys.stderr)
        return 1
    report = run_comparison(config)
    print(render_report(report, "markdown"))
    out = args.out or config.out
    if out:
        Path(out).write_text(render_report(report, "json"), encoding="utf-8")
        print(f"json report: {out}")
    return 0


def _parse_kinds(text: str | None) -> set[EdgeKind]:
    if not text:
        return set(ALL_EDGE_KINDS)
    kinds: set[EdgeKind] = set()
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            kinds.add(EdgeKind(item))
        except ValueError:
            valid = ", ".join(sorted(k.value for k in EdgeKind))
            raise RefGraphError(f"unknown edge kind {item!r}; valid kinds: {valid}") from None
    if not kinds:
        raise RefGraphError("empty --kinds")
    return kinds


if __name__ == "__main__":
    sys.exit(main())
