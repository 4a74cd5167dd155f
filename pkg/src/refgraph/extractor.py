"""Project pipeline: load sources, resolve references, emit the graph.

Edge emission rules:

* the source of every edge is the innermost enclosing *named* scope of the
  referencing expression (module, class, or function; lambdas and
  comprehensions attribute to their nearest named ancestor);
* a method call ``obj.m()`` emits a call edge only -- the attribute lookup
  feeding it is subsumed, while bare attribute reads and writes emit
  ``attribute_access``;
* self-references (recursion) are real references and are emitted;
* unknown values never produce edges.
"""

from __future__ import annotations

import sys
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, TypeVar

from .config import ProjectConfig, load_higher_order_table
from .errors import Diagnostics, ParseFailure
from .frontend.discovery import discover_modules
from .frontend.imports import ImportTable, resolve_imports
from .frontend.parsing import SourceModule, parse_module
from .frontend.scopes import ScopeTree, build_scope_tree
from .model import (
    ALL_EDGE_KINDS,
    DependencyEdge,
    DependencyGraph,
    EdgeKind,
    EntityRef,
)
from .resolver.assignment import build_assignment_graph
from .resolver.resolution import (
    ResolutionResult,
    producer_values,
    resolve_attribute,
    resolve_call,
    solve,
)
from .resolver.values import (
    BoundMethodObj,
    ClassObj,
    ExternalSym,
    FunctionObj,
    InstanceOf,
    ModuleObj,
)


@dataclass
class Project:
    root: Path
    config: ProjectConfig
    modules: dict[str, SourceModule] = field(default_factory=dict)
    scope_trees: dict[str, ScopeTree] = field(default_factory=dict)
    import_table: ImportTable = field(default_factory=ImportTable)
    diagnostics: Diagnostics = field(default_factory=Diagnostics)
    file_errors: list[str] = field(default_factory=list)

    @property
    def module_names(self) -> set[str]:
        return set(self.modules)


_T = TypeVar("_T")

# Deeply nested expressions need real stack: the AST walkers recurse per
# nesting level, and each interpreter frame also consumes C stack.  The
# recursion limit is sized so the worker thread's stack cannot overflow;
# anything deeper degrades per file via RecursionError.
_STACK_BYTES = 128 * 1024 * 1024
_RECURSION_LIMIT = 40_000


def _run_deep(fn: Callable[[], _T]) -> _T:
    """Run ``fn`` on a thread with a large stack and a raised recursion limit."""
    if sys.getrecursionlimit() >= _RECURSION_LIMIT:
        return fn()
    outcome: dict[str, object] = {}

    def runner() -> None:
        previous = sys.getrecursionlimit()
        sys.setrecursionlimit(_RECURSION_LIMIT)
        try:
            outcome["value"] = fn()
        except BaseException as exc:  # re-raised in the caller
            outcome["error"] = exc
        finally:
            sys.setrecursionlimit(previous)

    old_size = threading.stack_size(_STACK_BYTES)
    try:
        worker = threading.Thread(target=runner, name="refgraph-analysis")
        worker.start()
        worker.join()
    finally:
        threading.stack_size(old_size)
    if "error" in outcome:
        raise outcome["error"]  # type: ignore[misc]
    return outcome["value"]  # type: ignore[return-value]


def load_project(root: str | Path, config: ProjectConfig | None = None) -> Project:
    """Discover, parse, scope-analyze, and import-resolve a source tree."""
    config = config or ProjectConfig()
    root = Path(root)
    project = Project(root, config)
    for rel_path in discover_modules(root, config):
        try:
            module = parse_module(rel_path, root=root)
        except ParseFailure as exc:
            project.file_errors.append(str(exc))
            continue
        if module.opaque_regions:
            project.diagnostics.warn(
                f"{module.path}: {module.opaque_count} opaque region(s)",
                "opaque_regions",
            )
        if module.module_name in project.modules:
            project.diagnostics.warn(
                f"{module.path}: duplicate module name {module.module_name}",
                "duplicate_module",
            )
            continue
        project.modules[module.module_name] = module

    def build_scopes() -> None:
        for name in sorted(project.modules):
            try:
                project.scope_trees[name] = build_scope_tree(project.modules[name])
            except RecursionError:
                path = project.modules[name].path
                project.file_errors.append(f"{path}: expression nesting too deep")
                del project.modules[name]

    _run_deep(build_scopes)
    project.import_table = resolve_imports(
        project.modules, project.scope_trees, project.diagnostics
    )
    return project


def analyze_project(project: Project, max_iters: int = 1000) -> ResolutionResult:
    def analyze() -> ResolutionResult:
        graph = build_assignment_graph(
            project.modules, project.scope_trees, project.import_table, project.diagnostics
        )
        return solve(
            graph, project.modules, project.scope_trees, project.diagnostics, max_iters
        )

    return _run_deep(analyze)


def extract_edges(project: Project, resolution: ResolutionResult) -> DependencyGraph:
    """Emit the dependency graph for a resolved project."""
    higher_order = load_higher_order_table(project.config.builtins_file)
    graph = DependencyGraph()
    values = resolution.values
    hierarchy = resolution.hierarchy
    sites = resolution.graph.sites

    for tree in project.scope_trees.values():
        for scope in tree.all_scopes():
            if scope.entity is not None:
                graph.add_node(scope.entity)

    def source_entity(scope) -> EntityRef | None:
        return scope.nearest_named().entity

    for record in sites.imports:
        target = record.binding.target
        if record.binding.unresolved and record.binding.bound_member is None:
            continue  # unresolvable relative import: diagnostic only
        source = source_entity(record.scope)
        if source is not None:
            graph.add_edge(DependencyEdge(source, target, EdgeKind.IMPORT, record.line))

    for site_id in sorted(sites.calls):
        site = sites.calls[site_id]
        source = source_entity(site.scope)
        if source is None:
            continue
        for target, kind in resolve_call(site, values, hierarchy, higher_order):
            graph.add_edge(DependencyEdge(source, target, kind, site.line))

    for site_id in sorted(sites.attrs):
        site = sites.attrs[site_id]
        source = source_entity(site.scope)
        if source is None:
            continue
        if site.access == "load":
            if site.in_callee:
                continue  # the call edge subsumes the lookup
            for target in resolve_attribute(site, values, hierarchy):
                graph.add_edge(
                    DependencyEdge(source, target, EdgeKind.ATTRIBUTE_ACCESS, site.line)
                )
        else:
            for target in _store_targets(site, values, hierarchy):
                graph.add_edge(
                    DependencyEdge(source, target, EdgeKind.ATTRIBUTE_ACCESS, site.line)
                )

    for record in sites.decorators:
        source = source_entity(record.scope)
        if source is None:
            continue
        for value in producer_values(record.dec_producer, values):
            target: EntityRef | None = None
            if isinstance(value, (FunctionObj, ClassObj, ExternalSym, ModuleObj)):
                target = value.entity
            elif isinstance(value, BoundMethodObj):
                target = value.func
            if target is not None:
                graph.add_edge(
                    DependencyEdge(source, target, EdgeKind.DECORATE, record.line)
                )

    for qname in sorted(sites.classes):
        record = sites.classes[qname]
        for slot in record.base_slots:
            for value in values.get(slot, frozenset()):
                if isinstance(value, (ClassObj, ExternalSym)):
                    graph.add_edge(
                        DependencyEdge(
                            record.entity, value.entity, EdgeKind.INHERIT, record.line
                        )
                    )

    for exc_site in sites.raises + sites.excepts:
        source = source_entity(exc_site.scope)
        if source is None:
            continue
        for value in producer_values(exc_site.producer, values):
            target = None
            if isinstance(value, ClassObj):
                target = value.entity
            elif isinstance(value, InstanceOf):
                target = value.cls
            elif isinstance(value, ExternalSym):
                target = value.entity
            if target is not None:
                graph.add_edge(
                    DependencyEdge(source, target, EdgeKind.EXCEPTION, exc_site.line)
                )

    return graph


def _store_targets(site, values, hierarchy) -> set[EntityRef]:
    """Entities an attribute write lands on (the receiver class's own slot)."""
    out: set[EntityRef] = set()
    for value in producer_values(site.receiver, values):
        if isinstance(value, (InstanceOf, ClassObj)):
            cls = value.cls if isinstance(value, InstanceOf) else value.entity
            info = hierarchy.classes.get(cls.qualified_name)
            if info is not None and site.attr in info.attrs:
                out.add(info.attrs[site.attr])
        elif isinstance(value, ModuleObj):
            member = hierarchy.module_member(value.entity.qualified_name, site.attr)
            if member is not None:
                out.add(member)
    return out


def classify_external(
    graph: DependencyGraph,
    project_modules: set[str],
    module_files: dict[str, str] | None = None,
) -> DependencyGraph:
    """Re-flag edge targets by whether their module lies in the project.

    Targets whose qualified name falls under no project module are marked
    external (file dropped); sources are project code by construction and
    stay untouched.  The reverse flip, external to internal, needs a file
    and only happens when ``module_files`` supplies one.  Idempotent.
    """
    packages: set[str] = set()
    for name in project_modules:
        parts = name.split(".")
        for i in range(1, len(parts)):
            packages.add(".".join(parts[:i]))

    def is_project_name(name: str) -> bool:
        if name in project_modules or name in packages:
            return True
        return any(
            name.startswith(module + ".") for module in project_modules
        ) or any(name.startswith(pkg + ".") for pkg in packages)

    remap: dict[EntityRef, EntityRef] = {}

    def mapped(entity: EntityRef) -> EntityRef:
        if entity in remap:
            return remap[entity]
        out = entity
        internal_name = is_project_name(entity.qualified_name)
        if not entity.is_external and not internal_name:
            out = EntityRef(entity.qualified_name, entity.kind, "", True, span=entity.span)
        elif entity.is_external and internal_name and module_files:
            name = entity.qualified_name
            best = max(
                (m for m in module_files if name == m or name.startswith(m + ".")),
                key=len,
                default="",
            )
            if best:
                out = EntityRef(name, entity.kind, module_files[best], False, span=entity.span)
        remap[entity] = out
        return out

    sources = {edge.source for edge in graph.edges}
    out_graph = DependencyGraph()
    for node in graph.nodes:
        out_graph.add_node(node if node in sources else mapped(node))
    for edge in graph.edges:
        out_graph.add_edge(
            DependencyEdge(edge.source, mapped(edge.target), edge.kind, edge.line)
        )
    return out_graph


def filter_edges(
    graph: DependencyGraph,
    include_external: bool,
    kinds: set[EdgeKind] = ALL_EDGE_KINDS,
) -> DependencyGraph:
    """Keep edges by kind and externality; empty kind sets are meaningless."""
    if not kinds:
        raise ValueError("filter_edges: empty edge-kind set")
    touched = {edge.source for edge in graph.edges} | {edge.target for edge in graph.edges}
    out = DependencyGraph()
    for edge in graph.edges:
        if edge.kind not in kinds:
            continue
        if not include_external and edge.target.is_external:
            continue
        out.add_edge(edge)
    # Nodes never incident to any edge are project inventory, not filtered.
    for node in graph.nodes:
        if node not in touched:
            out.add_node(node)
    return out


def extract_project(
    root: str | Path,
    config: ProjectConfig | None = None,
) -> tuple[DependencyGraph, Project, ResolutionResult]:
    """One-shot extraction: load, analyze, emit, classify."""
    project = load_project(root, config)
    resolution = analyze_project(project)
    graph = extract_edges(project, resolution)
    graph = classify_external(graph, project.module_names)
    return graph, project, resolution
