"""Core graph model: entities, typed dependency edges, graphs, and the
name-normalization profile used to line up edges from different tools.

Identity rules that the rest of the package relies on:

* ``EntityRef`` identity is (qualified_name, kind, file, is_external); the
  source span is metadata and never takes part in equality or hashing.
* Edges are deduplicated on (source name, target name, kind); the line
  number is metadata retained for reporting, with the smallest line kept
  when duplicates collapse.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Iterator


class EntityKind(str, Enum):
    MODULE = "module"
    CLASS = "class"
    FUNCTION = "function"
    LAMBDA = "lambda"
    VARIABLE = "variable"
    ATTRIBUTE = "attribute"
    UNKNOWN = "unknown"


class EdgeKind(str, Enum):
    CALL = "call"
    INSTANTIATE = "instantiate"
    INHERIT = "inherit"
    IMPORT = "import"
    ATTRIBUTE_ACCESS = "attribute_access"
    DECORATE = "decorate"
    EXCEPTION = "exception"


ALL_EDGE_KINDS: frozenset[EdgeKind] = frozenset(EdgeKind)

Span = tuple[int, int, int, int]


@dataclass(frozen=True)
class EntityRef:
    """A code element: module, class, function, lambda, variable, attribute.

    ``file`` is a project-relative path and is empty exactly when the entity
    lives outside the analyzed project (``is_external``).  Lambdas carry
    synthetic ``<lambda:LINE:COL>`` name segments so no two lambdas share a
    qualified name.
    """

    qualified_name: str
    kind: EntityKind = EntityKind.UNKNOWN
    file: str = ""
    is_external: bool = False
    span: Span | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.qualified_name or any(c.isspace() for c in self.qualified_name):
            raise ValueError(f"bad qualified name: {self.qualified_name!r}")
        if self.is_external != (self.file == ""):
            raise ValueError(
                f"{self.qualified_name}: is_external={self.is_external} "
                f"inconsistent with file={self.file!r}"
            )


def external_ref(qualified_name: str, kind: EntityKind = EntityKind.UNKNOWN) -> EntityRef:
    return EntityRef(qualified_name, kind=kind, file="", is_external=True)


@dataclass(frozen=True)
class DependencyEdge:
    """A typed directed reference between two entities.

    ``line`` is the 1-based line of the referencing expression (0 when the
    edge comes from a source that carries no position).
    """

    source: EntityRef
    target: EntityRef
    kind: EdgeKind
    line: int = 0

    def __post_init__(self) -> None:
        if self.source.is_external:
            raise ValueError(
                f"edge source must be project code: {self.source.qualified_name}"
            )
        if self.kind is EdgeKind.INHERIT:
            if self.source.kind is not EntityKind.CLASS:
                raise ValueError("inherit edge source must be a class")
            if self.target.kind not in (EntityKind.CLASS, EntityKind.UNKNOWN):
                raise ValueError("inherit edge target must be class or unknown")

    @property
    def dedup_key(self) -> tuple[str, str, EdgeKind]:
        return (self.source.qualified_name, self.target.qualified_name, self.kind)

    @property
    def sort_key(self) -> tuple[str, str, str, int]:
        return (
            self.source.qualified_name,
            self.target.qualified_name,
            self.kind.value,
            self.line,
        )


class DependencyGraph:
    """Set of entities plus deduplicated typed edges between them.

    Every edge endpoint is guaranteed to appear in ``nodes``.  Insertion
    order never affects equality or serialized output.
    """

    def __init__(
        self,
        nodes: Iterable[EntityRef] = (),
        edges: Iterable[DependencyEdge] = (),
    ) -> None:
        self._nodes: set[EntityRef] = set()
        self._edges: dict[tuple[str, str, EdgeKind], DependencyEdge] = {}
        for node in nodes:
            self.add_node(node)
        for edge in edges:
            self.add_edge(edge)

    def add_node(self, node: EntityRef) -> None:
        self._nodes.add(node)

    def add_edge(self, edge: DependencyEdge) -> None:
        self._nodes.add(edge.source)
        self._nodes.add(edge.target)
        key = edge.dedup_key
        existing = self._edges.get(key)
        if existing is None:
            self._edges[key] = edge
        elif edge.line and (not existing.line or edge.line < existing.line):
            self._edges[key] = edge

    @property
    def nodes(self) -> frozenset[EntityRef]:
        return frozenset(self._nodes)

    @property
    def edges(self) -> frozenset[DependencyEdge]:
        return frozenset(self._edges.values())

    def sorted_edges(self) -> list[DependencyEdge]:
        return sorted(self._edges.values(), key=lambda e: e.sort_key)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def kind_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for edge in self._edges.values():
            counts[edge.kind.value] = counts.get(edge.kind.value, 0) + 1
        return dict(sorted(counts.items()))

    def update(self, other: "DependencyGraph") -> None:
        for node in other._nodes:
            self.add_node(node)
        for edge in other._edges.values():
            self.add_edge(edge)

    def prefixed(self, dotted_prefix: str, path_prefix: str = "") -> "DependencyGraph":
        """New graph with every internal entity renamed under a dotted prefix.

        Used to namespace per-case extractions before uniting them into one
        suite-wide graph; external entities keep their global names.
        """

        def rename(entity: EntityRef) -> EntityRef:
            if entity.is_external:
                return entity
            file = f"{path_prefix}/{entity.file}" if path_prefix else entity.file
            return replace(
                entity,
                qualified_name=f"{dotted_prefix}.{entity.qualified_name}",
                file=file,
            )

        out = DependencyGraph()
        for node in self._nodes:
            out.add_node(rename(node))
        for edge in self._edges.values():
            out.add_edge(
                replace(edge, source=rename(edge.source), target=rename(edge.target))
            )
        return out

    def __iter__(self) -> Iterator[DependencyEdge]:
        return iter(self.sorted_edges())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __repr__(self) -> str:
        return f"DependencyGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"


@dataclass(frozen=True)
class NormalizationProfile:
    """How qualified names are rewritten before edges are compared.

    Applying a profile twice gives the same result as applying it once;
    the normalization steps run in a fixed order (whitespace, signature
    strip, path-to-module, inner-class separator, case fold).
    """

    strip_signatures: bool = False
    path_to_module: bool = False
    inner_class_separator: str = "$"
    case_fold: bool = False
    drop_kind: bool = True

    def normalize(self, name: str) -> str:
        out = "".join(name.split())
        if self.strip_signatures:
            out = _strip_trailing_signature(out)
        if self.path_to_module:
            out = _path_to_dotted(out)
        if self.inner_class_separator:
            out = out.replace(self.inner_class_separator, ".")
        if self.case_fold:
            out = out.lower()
        return out

    def pair_key(self, source_name: str, target_name: str) -> str:
        return f"{self.normalize(source_name)}->{self.normalize(target_name)}"


def _strip_trailing_signature(name: str) -> str:
    # Remove trailing balanced "(...)" groups: "a.m(int)(x)" -> "a.m".
    while name.endswith(")"):
        depth = 0
        for i in range(len(name) - 1, -1, -1):
            if name[i] == ")":
                depth += 1
            elif name[i] == "(":
                depth -= 1
                if depth == 0:
                    name = name[:i]
                    break
        else:
            break  # unbalanced: leave untouched
    return name


def _path_to_dotted(name: str) -> str:
    if not any(sep in name for sep in ("/", "\\", "::")):
        return name
    parts = name.split("::")
    path = parts[0].replace("\\", "/")
    segments = [seg for seg in path.split("/") if seg not in ("", ".")]
    if segments and "." in segments[-1]:
        stem, _, _ = segments[-1].rpartition(".")
        if stem:
            segments[-1] = stem
    segments.extend(p for p in parts[1:] if p)
    return ".".join(segments)


def canonical_key(edge: DependencyEdge, profile: NormalizationProfile | None = None) -> str:
    """Deterministic comparison key ``SRC->TGT`` for an edge.

    With ``drop_kind`` unset the edge kind is appended so that edges of
    different kinds between the same names stay distinct.
    """
    profile = profile or NormalizationProfile()
    key = profile.pair_key(edge.source.qualified_name, edge.target.qualified_name)
    if not profile.drop_kind:
        key = f"{key}[{edge.kind.value}]"
    return key
