"""Multi-tool output comparison: exact Venn regions, ratios, and reports.

Every tool contributes a deduplicated set of canonical edge keys; the union
is partitioned exactly (per-element membership, no sampling) into the
2^n - 1 regions over n tools.  All ratios are taken against the union of
every tool's edges, so per tool the shared and unique ratios sum to its
total ratio rather than to one.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .csvio import read_edges_csv
from .errors import ComparisonError, Diagnostics
from .model import NormalizationProfile, canonical_key

REPORT_SCHEMA = "refgraph-overlap-report/1"

SUPPORTED_FORMATS = ("core", "csv", "adjacency")

MAX_TOOLS = 5
# Tolerated fraction of rows that fail to map to an edge before erroring.
UNMAPPABLE_LIMIT = 0.10


@dataclass(frozen=True)
class FormatSpec:
    """How to pull (source, target) name pairs out of a raw tool file."""

    kind: str  # core | csv | adjacency
    source_column: str = "source"
    target_column: str = "target"

    @staticmethod
    def parse(text: str) -> "FormatSpec":
        kind, _, columns = text.partition(":")
        kind = kind.strip()
        if kind not in SUPPORTED_FORMATS:
            raise ComparisonError(
                f"unknown tool format {kind!r}; expected one of {SUPPORTED_FORMATS}"
            )
        if columns:
            parts = [c.strip() for c in columns.split(",")]
            if len(parts) != 2 or not all(parts):
                raise ComparisonError(
                    f"format {text!r}: expected 'csv:<source_col>,<target_col>'"
                )
            return FormatSpec(kind, parts[0], parts[1])
        return FormatSpec(kind)


@dataclass
class ToolEdgeList:
    tool_name: str
    keys: frozenset[str]
    total_rows: int = 0
    unmappable_rows: int = 0


@dataclass
class ToolStats:
    total: int = 0
    shared: int = 0
    unique: int = 0
    total_ratio: float | None = None
    shared_ratio: float | None = None
    unique_ratio: float | None = None


@dataclass
class OverlapReport:
    tools: list[str]
    union_size: int
    regions: dict[frozenset[str], int]
    per_tool: dict[str, ToolStats]
    k_shared: dict[int, int]
    degenerate: bool = False
    unmappable: dict[str, int] = field(default_factory=dict)

    @property
    def all_shared(self) -> int:
        return self.k_shared.get(len(self.tools), 0)

    def shared_total(self) -> int:
        """Keys found by at least two tools."""
        return sum(count for k, count in self.k_shared.items() if k >= 2)


def normalize_tool_output(
    path: str | Path,
    fmt: FormatSpec | str,
    profile: NormalizationProfile | None = None,
    tool_name: str | None = None,
    diagnostics: Diagnostics | None = None,
) -> ToolEdgeList:
    """Read one tool's raw edge list into a canonical, deduplicated key set.

    Rows that cannot be mapped to a (source, target) pair are counted; more
    than 10% unmappable rows is an error rather than a silent skew.
    """
    if isinstance(fmt, str):
        fmt = FormatSpec.parse(fmt)
    profile = profile or NormalizationProfile()
    path = Path(path)
    name = tool_name or path.stem

    if fmt.kind == "core":
        graph = read_edges_csv(path, diagnostics=diagnostics)
        keys = frozenset(canonical_key(e, profile) for e in graph.edges)
        return ToolEdgeList(name, keys, total_rows=graph.edge_count)

    if fmt.kind == "csv":
        return _read_generic_csv(path, fmt, profile, name)
    return _read_adjacency(path, profile, name)


def _check_unmappable(tool: ToolEdgeList, path: Path) -> ToolEdgeList:
    if tool.total_rows and tool.unmappable_rows / tool.total_rows > UNMAPPABLE_LIMIT:
        raise ComparisonError(
            f"{path}: {tool.unmappable_rows} of {tool.total_rows} rows unmappable"
        )
    return tool


def _read_generic_csv(
    path: Path, fmt: FormatSpec, profile: NormalizationProfile, name: str
) -> ToolEdgeList:
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ComparisonError(f"{path}: empty file") from None
            positions = {column.strip(): i for i, column in enumerate(header)}
            if fmt.source_column not in positions or fmt.target_column not in positions:
                raise ComparisonError(
                    f"{path}: columns {fmt.source_column!r}/{fmt.target_column!r} "
                    f"not found in header {header!r}"
                )
            src_i = positions[fmt.source_column]
            tgt_i = positions[fmt.target_column]
            keys: set[str] = set()
            total = 0
            bad = 0
            for row in reader:
                if not row:
                    continue
                total += 1
                if len(row) <= max(src_i, tgt_i) or not row[src_i].strip() or not row[tgt_i].strip():
                    bad += 1
                    continue
                keys.add(profile.pair_key(row[src_i], row[tgt_i]))
    except OSError as exc:
        raise ComparisonError(f"cannot read {path}: {exc}") from exc
    return _check_unmappable(ToolEdgeList(name, frozenset(keys), total, bad), path)


def _read_adjacency(path: Path, profile: NormalizationProfile, name: str) -> ToolEdgeList:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ComparisonError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ComparisonError(f"{path}: invalid adjacency JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ComparisonError(f"{path}: adjacency format requires an object at top level")
    keys: set[str] = set()
    total = 0
    bad = 0
    for source, targets in data.items():
        if not isinstance(targets, list):
            total += 1
            bad += 1
            continue
        for target in targets:
            total += 1
            if not isinstance(target, str) or not target.strip() or not str(source).strip():
                bad += 1
                continue
            keys.add(profile.pair_key(str(source), target))
    return _check_unmappable(ToolEdgeList(name, frozenset(keys), total, bad), path)


def compute_regions(lists: list[ToolEdgeList]) -> OverlapReport:
    """Exact partition of the union into per-subset regions.

    Accepts two to five tools with unique names; aggregates (per-tool
    totals, shared and unique counts, k-shared counts) are derived from the
    region partition.
    """
    if len(lists) < 2:
        raise ComparisonError(f"need at least 2 tools, got {len(lists)}")
    if len(lists) > MAX_TOOLS:
        raise ComparisonError(f"at most {MAX_TOOLS} tools supported, got {len(lists)}")
    names = [tool.tool_name for tool in lists]
    if len(set(names)) != len(names):
        raise ComparisonError(f"tool names must be unique: {names}")

    union: set[str] = set()
    for tool in lists:
        union |= tool.keys

    regions: dict[frozenset[str], int] = {}
    for key in union:
        members = frozenset(t.tool_name for t in lists if key in t.keys)
        regions[members] = regions.get(members, 0) + 1

    per_tool: dict[str, ToolStats] = {}
    for tool in lists:
        stats = ToolStats(total=len(tool.keys))
        for members, count in regions.items():
            if tool.tool_name not in members:
                continue
            if len(members) >= 2:
                stats.shared += count
            else:
                stats.unique += count
        per_tool[tool.tool_name] = stats

    k_shared = {k: 0 for k in range(1, len(lists) + 1)}
    for members, count in regions.items():
        k_shared[len(members)] += count

    return OverlapReport(
        tools=names,
        union_size=len(union),
        regions=regions,
        per_tool=per_tool,
        k_shared=k_shared,
        unmappable={t.tool_name: t.unmappable_rows for t in lists},
    )


def compute_ratios(report: OverlapReport) -> OverlapReport:
    """Fill the per-tool ratios, all relative to the union size."""
    union = report.union_size
    if union == 0:
        report.degenerate = True
        for stats in report.per_tool.values():
            stats.total_ratio = stats.shared_ratio = stats.unique_ratio = 0.0
        return report
    for stats in report.per_tool.values():
        stats.total_ratio = stats.total / union
        stats.shared_ratio = stats.shared / union
        stats.unique_ratio = stats.unique / union
    return report


def percent_half_up(count: int, union: int) -> int:
    """Whole-percent rounding, halves away from floor: 0.905 -> 91."""
    if union == 0:
        return 0
    return (200 * count + union) // (2 * union)


_K_LABEL = {2: "Two Shared", 3: "Three Shared", 4: "Four Shared"}


def render_report(report: OverlapReport, style: str = "markdown") -> str:
    """Render a ratio-filled report as a markdown table or exact JSON."""
    if style == "json":
        return _render_json(report)
    if style != "markdown":
        raise ComparisonError(f"unknown report style {style!r}")
    return _render_markdown(report)


def _render_markdown(report: OverlapReport) -> str:
    union = report.union_size
    n = len(report.tools)

    def cell(count: int) -> str:
        return f"{count:,} ({percent_half_up(count, union)}%)"

    header = ["Total Edges", "All shared"]
    values = [f"{union:,}", cell(report.all_shared)]
    for k in range(2, n):
        header.append(_K_LABEL.get(k, f"{k} Shared"))
        values.append(cell(report.k_shared.get(k, 0)))
    header.append("Shared")
    values.append(cell(report.shared_total()))
    for column in ("Total", "Shared", "Unique"):
        for tool in report.tools:
            header.append(f"{column} {tool}")
            stats = report.per_tool[tool]
            count = {"Total": stats.total, "Shared": stats.shared, "Unique": stats.unique}[column]
            values.append(cell(count))

    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
        "| " + " | ".join(values) + " |",
    ]
    if report.degenerate:
        lines.append("")
        lines.append("(degenerate: union of all tool outputs is empty)")
    return "\n".join(lines)


def _render_json(report: OverlapReport) -> str:
    payload = {
        "schema": REPORT_SCHEMA,
        "tools": report.tools,
        "union_size": report.union_size,
        "degenerate": report.degenerate,
        "regions": {
            "&".join(sorted(members)): count
            for members, count in sorted(
                report.regions.items(), key=lambda kv: sorted(kv[0])
            )
        },
        "k_shared": {str(k): v for k, v in sorted(report.k_shared.items())},
        "per_tool": {
            name: {
                "total": stats.total,
                "shared": stats.shared,
                "unique": stats.unique,
                "total_ratio": stats.total_ratio,
                "shared_ratio": stats.shared_ratio,
                "unique_ratio": stats.unique_ratio,
            }
            for name, stats in report.per_tool.items()
        },
        "unmappable_rows": report.unmappable,
    }
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def report_from_json(text: str) -> OverlapReport:
    """Parse a JSON report back into an OverlapReport (round-trip support)."""
    data = json.loads(text)
    if data.get("schema") != REPORT_SCHEMA:
        raise ComparisonError(f"unsupported report schema {data.get('schema')!r}")
    per_tool = {
        name: ToolStats(
            total=stats["total"],
            shared=stats["shared"],
            unique=stats["unique"],
            total_ratio=stats.get("total_ratio"),
            shared_ratio=stats.get("shared_ratio"),
            unique_ratio=stats.get("unique_ratio"),
        )
        for name, stats in data["per_tool"].items()
    }
    return OverlapReport(
        tools=list(data["tools"]),
        union_size=data["union_size"],
        regions={
            frozenset(key.split("&")): count for key, count in data["regions"].items()
        },
        per_tool=per_tool,
        k_shared={int(k): v for k, v in data["k_shared"].items()},
        degenerate=data.get("degenerate", False),
        unmappable=data.get("unmappable_rows", {}),
    )


@dataclass
class ToolEntry:
    name: str
    file: str
    format: FormatSpec
    profile: NormalizationProfile


@dataclass
class ComparisonConfig:
    tools: list[ToolEntry]
    out: str | None = None


def load_comparison_config(path: str | Path) -> ComparisonConfig:
    """Parse a comparison config: ``tool.<name>.<field> = value`` lines.

    Recognized per-tool fields: ``file`` (required), ``format`` (default
    ``core``), ``profile`` (path to a profile file).  Top-level keys:
    ``out`` (JSON report path), ``profile`` (default profile for all tools).
    """
    from .config import load_profile, parse_key_values

    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ComparisonError(f"cannot read comparison config {path}: {exc}") from exc
    values = parse_key_values(text, str(path))

    default_profile = NormalizationProfile()
    if "profile" in values:
        default_profile = load_profile(_relative_to(path, values["profile"]))

    tool_fields: dict[str, dict[str, str]] = {}
    order: list[str] = []
    for key, value in values.items():
        if not key.startswith("tool."):
            continue
        parts = key.split(".")
        if len(parts) != 3:
            raise ComparisonError(f"{path}: bad tool key {key!r}")
        _, name, fld = parts
        if name not in tool_fields:
            tool_fields[name] = {}
            order.append(name)
        tool_fields[name][fld] = value

    tools: list[ToolEntry] = []
    for name in order:
        fields = tool_fields[name]
        if "file" not in fields:
            raise ComparisonError(f"{path}: tool {name!r} missing 'file'")
        unknown = set(fields) - {"file", "format", "profile"}
        if unknown:
            raise ComparisonError(f"{path}: tool {name!r} has unknown keys {sorted(unknown)}")
        profile = default_profile
        if "profile" in fields:
            profile = load_profile(_relative_to(path, fields["profile"]))
        tools.append(
            ToolEntry(
                name,
                str(_relative_to(path, fields["file"])),
                FormatSpec.parse(fields.get("format", "core")),
                profile,
            )
        )
    out = str(_relative_to(path, values["out"])) if "out" in values else None
    return ComparisonConfig(tools=tools, out=out)


def _relative_to(config_path: Path, value: str) -> Path:
    candidate = Path(value)
    return candidate if candidate.is_absolute() else config_path.parent / candidate


def run_comparison(config: ComparisonConfig) -> OverlapReport:
    lists = [
        normalize_tool_output(entry.file, entry.format, entry.profile, entry.name)
        for entry in config.tools
    ]
    return compute_ratios(compute_regions(lists))
