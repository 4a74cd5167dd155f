"""Parsing of subject-language source files into ASTs.

Files that fail to parse as a whole are recovered block by block: each
top-level statement block that still parses is kept, and the ones that do
not are replaced with ``Opaque`` placeholder nodes covering their span, so
one exotic construct never discards a whole file.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ParseFailure


class Opaque(ast.stmt):
    """Placeholder statement covering a span the parser could not analyze."""

    _fields = ()


@dataclass
class SourceModule:
    """One parsed source file plus its dotted module name."""

    path: str  # project-relative POSIX path
    module_name: str
    tree: ast.Module
    source: str
    opaque_regions: list[tuple[int, int]] = field(default_factory=list)

    @property
    def is_package(self) -> bool:
        return Path(self.path).name == "__init__.py"

    @property
    def opaque_count(self) -> int:
        return len(self.opaque_regions)


def module_name_for_path(rel_path: str | Path) -> str:
    """Dotted module name for a project-relative file path.

    ``a/b/c.py`` -> ``a.b.c``; ``a/b/__init__.py`` -> ``a.b``.
    """
    rel = Path(rel_path)
    parts = list(rel.parts[:-1])
    stem = rel.name
    if "." in stem:
        stem = stem[: stem.rindex(".")]
    if stem != "__init__":
        parts.append(stem)
    return ".".join(parts) if parts else stem


def parse_module(
    path: str | Path,
    root: str | Path | None = None,
    module_name: str | None = None,
) -> SourceModule:
    """Parse one file; raises ParseFailure only when nothing is recoverable."""
    path = Path(path)
    full = Path(root, path) if root is not None else path
    rel = path.as_posix()
    try:
        source = full.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise ParseFailure(rel, 0, 0, f"not valid UTF-8: {exc}") from exc
    except OSError as exc:
        raise ParseFailure(rel, 0, 0, str(exc)) from exc

    name = module_name if module_name is not None else module_name_for_path(path)
    try:
        tree = ast.parse(source, filename=rel)
        return SourceModule(rel, name, tree, source)
    except SyntaxError as first_error:
        return _recover(rel, name, source, first_error)


def _recover(rel: str, name: str, source: str, first_error: SyntaxError) -> SourceModule:
    lines = source.splitlines()
    blocks = _top_level_blocks(lines)
    statements: list[ast.stmt] = []
    opaque: list[tuple[int, int]] = []
    recovered_any = False
    for start, end in blocks:
        text = "\n".join(lines[start - 1 : end])
        try:
            parsed = ast.parse(text)
        except SyntaxError:
            node = Opaque()
            node.lineno = start
            node.col_offset = 0
            node.end_lineno = end
            node.end_col_offset = len(lines[end - 1]) if end <= len(lines) else 0
            statements.append(node)
            opaque.append((start, end))
            continue
        if parsed.body:
            ast.increment_lineno(parsed, start - 1)
            statements.extend(parsed.body)
            recovered_any = True
    if not recovered_any:
        raise ParseFailure(
            rel,
            first_error.lineno or 0,
            first_error.offset or 0,
            first_error.msg,
        )
    module = ast.Module(body=statements, type_ignores=[])
    return SourceModule(rel, name, module, source, opaque)


def _top_level_blocks(lines: list[str]) -> list[tuple[int, int]]:
    """Split a file into column-zero statement blocks (1-based inclusive).

    This is a recovery heuristic, not a tokenizer: a multi-line expression
    whose continuation starts at column zero splits incorrectly, which at
    worst turns one opaque region into two.
    """
    starts: list[int] = []
    for i, line in enumerate(lines, start=1):
        if line and not line[0].isspace() and not line.startswith("#"):
            starts.append(i)
    blocks: list[tuple[int, int]] = []
    for idx, start in enumerate(starts):
        end = starts[idx + 1] - 1 if idx + 1 < len(starts) else len(lines)
        blocks.append((start, end))
    if not blocks and lines:
        blocks.append((1, len(lines)))
    return blocks
