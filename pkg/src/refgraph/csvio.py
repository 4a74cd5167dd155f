"""Bit-exact CSV interchange for dependency graphs.

The schema is fixed: one header row, rows sorted by (source name, target
name, edge kind, line), LF terminated, commas quoted by the standard CSV
rules.  Two writes of equal graphs are byte-identical regardless of the
order edges were inserted.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import IO, Mapping

from .errors import CsvFormatError, Diagnostics
from .model import DependencyEdge, DependencyGraph, EdgeKind, EntityKind, EntityRef

CSV_HEADER = [
    "source_file",
    "source_name",
    "source_kind",
    "target_file",
    "target_name",
    "target_kind",
    "edge_kind",
    "line",
]


def write_edges_csv(graph: DependencyGraph, sink: IO[str] | str | Path) -> None:
    """Serialize the graph's edges to ``sink`` (text stream or path)."""
    if isinstance(sink, (str, Path)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            _write(graph, fh)
    else:
        _write(graph, sink)


def _write(graph: DependencyGraph, fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for edge in graph.sorted_edges():
        writer.writerow(
            [
                edge.source.file,
                edge.source.qualified_name,
                edge.source.kind.value,
                edge.target.file,
                edge.target.qualified_name,
                edge.target.kind.value,
                edge.kind.value,
                str(edge.line),
            ]
        )


def edges_csv_text(graph: DependencyGraph) -> str:
    buf = io.StringIO()
    _write(graph, buf)
    return buf.getvalue()


def read_edges_csv(
    source: IO[str] | str | Path,
    column_map: Mapping[str, str] | None = None,
    diagnostics: Diagnostics | None = None,
) -> DependencyGraph:
    """Parse an edge CSV back into a graph.

    ``column_map`` adapts third-party files: it maps our logical fields
    (``source_name``, ``target_name``, and optionally ``source_file``,
    ``target_file``, ``source_kind``, ``target_kind``, ``edge_kind``,
    ``line``) to column names present in that file's header.  Entities from
    mapped files with no file column get the placeholder file ``?`` (their
    project membership is unknown, not external).  Unknown edge kinds
    degrade to ``call`` and are tallied on ``diagnostics``.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8", newline="") as fh:
            return _read(fh, column_map, diagnostics)
    return _read(source, column_map, diagnostics)


def _read(
    fh: IO[str],
    column_map: Mapping[str, str] | None,
    diagnostics: Diagnostics | None,
) -> DependencyGraph:
    diag = diagnostics if diagnostics is not None else Diagnostics()
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvFormatError("empty input: missing header row") from None

    if column_map is None:
        if header != CSV_HEADER:
            raise CsvFormatError(f"line 1: unexpected header {header!r}")
        indices = {name: i for i, name in enumerate(CSV_HEADER)}
        width = len(CSV_HEADER)
    else:
        positions = {name: i for i, name in enumerate(header)}
        indices = {}
        for logical, column in column_map.items():
            if column not in positions:
                raise CsvFormatError(f"line 1: column {column!r} not in header")
            indices[logical] = positions[column]
        for required in ("source_name", "target_name"):
            if required not in indices:
                raise CsvFormatError(f"column map must include {required!r}")
        width = len(header)

    graph = DependencyGraph()
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != width:
            raise CsvFormatError(
                f"line {lineno}: expected {width} fields, got {len(row)}"
            )

        def get(logical: str, default: str = "") -> str:
            idx = indices.get(logical)
            return row[idx].strip() if idx is not None else default

        file_default = "?" if column_map is not None else ""
        try:
            source = _entity(
                get("source_name"), get("source_kind"), get("source_file", file_default), diag
            )
            target = _entity(
                get("target_name"), get("target_kind"), get("target_file", file_default), diag
            )
            kind = _edge_kind(get("edge_kind"), diag)
            line_text = get("line") or "0"
            line = int(line_text)
            if line < 0:
                raise ValueError(line_text)
            graph.add_edge(DependencyEdge(source, target, kind, line))
        except (ValueError, CsvFormatError) as exc:
            raise CsvFormatError(f"line {lineno}: {exc}") from None
    return graph


def _entity(name: str, kind_text: str, file: str, diag: Diagnostics) -> EntityRef:
    if not name:
        raise CsvFormatError("empty entity name")
    try:
        kind = EntityKind(kind_text) if kind_text else EntityKind.UNKNOWN
    except ValueError:
        diag.count("unknown_entity_kind")
        kind = EntityKind.UNKNOWN
    return EntityRef(name, kind=kind, file=file, is_external=(file == ""))


def _edge_kind(text: str, diag: Diagnostics) -> EdgeKind:
    try:
        return EdgeKind(text) if text else EdgeKind.CALL
    except ValueError:
        # Third-party taxonomies vary; name-pair comparison doesn't care.
        diag.warn(f"unknown edge kind {text!r} mapped to call", "unknown_edge_kind")
        return EdgeKind.CALL
