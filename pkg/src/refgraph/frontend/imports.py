"""Resolution of import statements against the set of project modules.

Bindings resolve by name, not load order, so circular imports are fine.
Anything that does not land on a project file resolves to an external
entity; unresolvable relative imports produce a diagnostic and an unknown
binding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import Diagnostics
from ..model import EntityKind, EntityRef, external_ref
from .parsing import SourceModule
from .scopes import BindingKind, ImportDecl, Scope, ScopeTree


@dataclass
class ImportBinding:
    """A resolved import alias: where a name in some scope actually points."""

    decl: ImportDecl
    target: EntityRef  # entity the import statement references (edge target)
    bound_module: str | None = None  # project module the alias evaluates to
    bound_member: tuple[str, str] | None = None  # (module, name) for members
    is_package: bool = False  # bound to a namespace package prefix
    unresolved: bool = False

    @property
    def scope(self) -> Scope:
        return self.decl.scope

    @property
    def alias(self) -> str | None:
        return self.decl.alias


@dataclass
class ImportTable:
    bindings: list[ImportBinding] = field(default_factory=list)
    star_imports: list[ImportBinding] = field(default_factory=list)
    by_binding: dict[tuple[int, str], ImportBinding] = field(default_factory=dict)

    def for_scope_alias(self, scope: Scope, alias: str) -> ImportBinding | None:
        return self.by_binding.get((id(scope), alias))


class PackageIndex:
    """Project module names plus the namespace-package prefixes above them."""

    def __init__(self, modules: dict[str, SourceModule]) -> None:
        self.modules = modules
        self.packages: set[str] = set()
        for name in modules:
            parts = name.split(".")
            for i in range(1, len(parts)):
                self.packages.add(".".join(parts[:i]))

    def has_module(self, name: str) -> bool:
        return name in self.modules

    def has_package(self, name: str) -> bool:
        return name in self.packages

    def module_entity(self, name: str) -> EntityRef:
        module = self.modules.get(name)
        if module is not None:
            return EntityRef(name, EntityKind.MODULE, module.path)
        # Namespace package: no file of its own, point at the directory.
        return EntityRef(name, EntityKind.MODULE, name.replace(".", "/"))


def resolve_imports(
    modules: dict[str, SourceModule],
    scope_trees: dict[str, ScopeTree],
    diagnostics: Diagnostics | None = None,
) -> ImportTable:
    """Resolve every import alias in every module of the project."""
    diag = diagnostics if diagnostics is not None else Diagnostics()
    index = PackageIndex(modules)
    table = ImportTable()
    for name in sorted(scope_trees):
        tree = scope_trees[name]
        for decl in tree.import_decls:
            binding = _resolve_decl(decl, modules[name], index, scope_trees, diag)
            if decl.alias is None:
                table.star_imports.append(binding)
            else:
                table.bindings.append(binding)
                table.by_binding[(id(decl.scope), decl.alias)] = binding
                scope_binding = decl.scope.bindings.get(decl.alias)
                if scope_binding is not None and scope_binding.kind is BindingKind.IMPORT:
                    scope_binding.entity = binding.target
    return table


def _resolve_decl(
    decl: ImportDecl,
    importer: SourceModule,
    index: PackageIndex,
    scope_trees: dict[str, ScopeTree],
    diag: Diagnostics,
) -> ImportBinding:
    if decl.member is None:
        return _resolve_plain(decl, index)

    base = _resolve_base(decl, importer, diag)
    if base is None:
        marker = external_ref(f"<unresolved:{'.' * decl.level}{decl.module}>")
        return ImportBinding(decl, marker, unresolved=True)

    if decl.member == "*":
        return _resolve_source_module(decl, base, index)

    submodule = f"{base}.{decl.member}" if base else decl.member
    if index.has_module(submodule) or index.has_package(submodule):
        return ImportBinding(
            decl, index.module_entity(submodule), bound_module=submodule,
            is_package=not index.has_module(submodule),
        )
    if index.has_module(base):
        tree = scope_trees[base]
        member_binding = tree.module_scope.bindings.get(decl.member)
        if member_binding is not None and member_binding.entity is not None:
            return ImportBinding(
                decl, member_binding.entity, bound_member=(base, decl.member)
            )
        # Member exists dynamically or via re-export we cannot see.
        diag.warn(
            f"{importer.path}:{decl.line}: cannot find {decl.member!r} in module {base}",
            "unresolved_import_member",
        )
        return ImportBinding(
            decl, external_ref(f"{base}.{decl.member}"),
            bound_member=(base, decl.member), unresolved=True,
        )
    return ImportBinding(decl, external_ref(f"{base}.{decl.member}" if base else decl.member))


def _resolve_plain(decl: ImportDecl, index: PackageIndex) -> ImportBinding:
    name = decl.module
    if index.has_module(name) or index.has_package(name):
        # `import a.b.c` binds just `a`; `import a.b.c as m` binds the leaf.
        bound = name.split(".")[0] if decl.binds_prefix else name
        return ImportBinding(
            decl, index.module_entity(name), bound_module=bound,
            is_package=not index.has_module(bound),
        )
    return ImportBinding(decl, external_ref(name, EntityKind.MODULE))


def _resolve_source_module(decl: ImportDecl, base: str, index: PackageIndex) -> ImportBinding:
    if index.has_module(base) or index.has_package(base):
        return ImportBinding(
            decl, index.module_entity(base), bound_module=base,
            is_package=not index.has_module(base),
        )
    return ImportBinding(decl, external_ref(base, EntityKind.MODULE))


def _resolve_base(decl: ImportDecl, importer: SourceModule, diag: Diagnostics) -> str | None:
    """Absolute base module name for a from-import, applying relative levels."""
    if decl.level == 0:
        return decl.module
    parts = importer.module_name.split(".")
    # Level 1 is the current package: the module itself for __init__ files,
    # otherwise its parent.
    if not importer.is_package:
        parts = parts[:-1]
    strip = decl.level - 1
    if strip > len(parts):
        diag.warn(
            f"{importer.path}:{decl.line}: relative import beyond top-level package",
            "unresolved_relative_import",
        )
        return None
    if strip:
        parts = parts[:-strip]
    base = ".".join(parts)
    if decl.module:
        base = f"{base}.{decl.module}" if base else decl.module
    return base
