"""Lexical scope trees and name-binding tables.

Lookup follows the subject language's nesting rules: local scope first,
then enclosing function scopes, then the module, with class scopes visible
only to code directly in the class body, and ``global``/``nonlocal``
declarations redirecting both binding and lookup.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field
from enum import Enum

from ..model import EntityKind, EntityRef, Span
from .parsing import SourceModule


class ScopeKind(Enum):
    MODULE = "module"
    CLASS = "class"
    FUNCTION = "function"
    LAMBDA = "lambda"
    COMPREHENSION = "comprehension"


NAMED_SCOPE_KINDS = (ScopeKind.MODULE, ScopeKind.CLASS, ScopeKind.FUNCTION)


class BindingKind(Enum):
    FUNCTION = "function"
    CLASS = "class"
    PARAM = "param"
    ASSIGN = "assign"
    IMPORT = "import"
    EXCEPT = "except"
    COMPREHENSION = "comprehension"
    FOR = "for"
    WITH = "with"


@dataclass
class Binding:
    """First definition site of a name within one scope."""

    name: str
    kind: BindingKind
    scope: "Scope"
    line: int
    col: int
    entity: EntityRef | None = None


@dataclass
class ImportDecl:
    """One import alias (or star import) as written, prior to resolution."""

    scope: "Scope"
    alias: str | None  # bound name; None for star imports
    module: str  # dotted module text ("" for `from . import x`)
    member: str | None  # imported name for from-imports
    level: int  # relative-import level, 0 = absolute
    line: int
    binds_prefix: bool = False  # `import a.b` binds just `a`


@dataclass
class Scope:
    kind: ScopeKind
    name: str  # qualified
    node: ast.AST
    parent: "Scope | None" = None
    entity: EntityRef | None = None
    bindings: dict[str, Binding] = field(default_factory=dict)
    children: list["Scope"] = field(default_factory=list)
    globals_decl: set[str] = field(default_factory=set)
    nonlocals_decl: set[str] = field(default_factory=set)

    @property
    def is_named(self) -> bool:
        return self.kind in NAMED_SCOPE_KINDS

    def nearest_named(self) -> "Scope":
        scope = self
        while not scope.is_named:
            assert scope.parent is not None
            scope = scope.parent
        return scope

    def module_scope(self) -> "Scope":
        scope = self
        while scope.parent is not None:
            scope = scope.parent
        return scope

    def lookup(self, name: str) -> Binding | None:
        """Binding visible under ``name`` from this scope, or None."""
        scope: Scope | None = self
        while scope is not None:
            if name in scope.globals_decl and scope.kind is not ScopeKind.MODULE:
                return self.module_scope().bindings.get(name)
            if name in scope.nonlocals_decl:
                outer = scope.parent
                while outer is not None:
                    if (
                        outer.kind in (ScopeKind.FUNCTION, ScopeKind.LAMBDA)
                        and name in outer.bindings
                    ):
                        return outer.bindings[name]
                    outer = outer.parent
                return None
            # Class scopes are invisible to anything nested inside them.
            if (scope is self or scope.kind is not ScopeKind.CLASS) and name in scope.bindings:
                return scope.bindings[name]
            scope = scope.parent
        return None


@dataclass
class ScopeTree:
    module: SourceModule
    module_scope: Scope
    import_decls: list[ImportDecl] = field(default_factory=list)
    _by_node: dict[int, Scope] = field(default_factory=dict)

    def scope_for(self, node: ast.AST) -> Scope:
        return self._by_node[id(node)]

    def all_scopes(self) -> list[Scope]:
        out: list[Scope] = []
        stack = [self.module_scope]
        while stack:
            scope = stack.pop()
            out.append(scope)
            stack.extend(reversed(scope.children))
        return out


def build_scope_tree(module: SourceModule) -> ScopeTree:
    """Scope-analyze one parsed module.

    Every name-binding construct (assignment target, def/class, parameter,
    import alias, except alias, loop and comprehension variables) lands in
    exactly one scope; shadowing is legal and the first site wins as the
    recorded definition.
    """
    builder = _ScopeBuilder(module)
    return builder.build()


def _span(node: ast.AST) -> Span | None:
    if not hasattr(node, "lineno"):
        return None
    return (
        node.lineno,
        node.col_offset + 1,
        getattr(node, "end_lineno", node.lineno) or node.lineno,
        (getattr(node, "end_col_offset", node.col_offset) or node.col_offset) + 1,
    )


def synthetic_name(kind: str, node: ast.AST) -> str:
    return f"<{kind}:{node.lineno}:{node.col_offset + 1}>"


_COMP_LABEL = {
    ast.ListComp: "listcomp",
    ast.SetComp: "setcomp",
    ast.DictComp: "dictcomp",
    ast.GeneratorExp: "genexpr",
}


class _ScopeBuilder:
    def __init__(self, module: SourceModule) -> None:
        self.module = module
        self.tree: ScopeTree | None = None

    def build(self) -> ScopeTree:
        mod = self.module
        entity = EntityRef(mod.module_name, EntityKind.MODULE, mod.path)
        root = Scope(ScopeKind.MODULE, mod.module_name, mod.tree, entity=entity)
        self.tree = ScopeTree(mod, root)
        self.tree._by_node[id(mod.tree)] = root
        self._prescan_declarations(mod.tree.body, root)
        for stmt in mod.tree.body:
            self._visit_stmt(stmt, root)
        return self.tree

    # -- scope and binding helpers ------------------------------------

    def _new_scope(self, kind: ScopeKind, name: str, node: ast.AST, parent: Scope,
                   entity: EntityRef | None = None) -> Scope:
        scope = Scope(kind, name, node, parent=parent, entity=entity)
        parent.children.append(scope)
        assert self.tree is not None
        self.tree._by_node[id(node)] = scope
        return scope

    def _bind(self, scope: Scope, name: str, kind: BindingKind, node: ast.AST,
              entity: EntityRef | None = None) -> Binding:
        target = scope
        if name in scope.globals_decl and scope.kind is not ScopeKind.MODULE:
            target = scope.module_scope()
        elif name in scope.nonlocals_decl:
            outer = scope.parent
            while outer is not None:
                if outer.kind in (ScopeKind.FUNCTION, ScopeKind.LAMBDA):
                    target = outer
                    if name in outer.bindings:
                        break
                outer = outer.parent
        if name in target.bindings:
            return target.bindings[name]
        if entity is None:
            entity = self._data_entity(target, name, node, kind)
        line = getattr(node, "lineno", 0)
        col = getattr(node, "col_offset", -1) + 1
        binding = Binding(name, kind, target, line, col, entity)
        target.bindings[name] = binding
        return binding

    def _data_entity(self, scope: Scope, name: str, node: ast.AST,
                     kind: BindingKind) -> EntityRef | None:
        """Module-level names and class attributes are referenceable entities."""
        if kind in (BindingKind.IMPORT, BindingKind.EXCEPT, BindingKind.PARAM):
            return None
        if scope.kind is ScopeKind.MODULE:
            return EntityRef(
                f"{scope.name}.{name}", EntityKind.VARIABLE, self.module.path,
                span=_span(node),
            )
        if scope.kind is ScopeKind.CLASS:
            return EntityRef(
                f"{scope.name}.{name}", EntityKind.ATTRIBUTE, self.module.path,
                span=_span(node),
            )
        return None

    def _prescan_declarations(self, body: list[ast.stmt], scope: Scope) -> None:
        """Collect global/nonlocal declarations before binding anything.

        The scan stops at nested scope boundaries: declarations only affect
        the scope whose body they appear in.
        """
        stack = list(body)
        while stack:
            stmt = stack.pop()
            if isinstance(stmt, ast.Global):
                scope.globals_decl.update(stmt.names)
            elif isinstance(stmt, ast.Nonlocal):
                scope.nonlocals_decl.update(stmt.names)
            elif isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
                continue
            else:
                for child in ast.iter_child_nodes(stmt):
                    if isinstance(child, ast.stmt):
                        stack.append(child)

    # -- statements ----------------------------------------------------

    def _visit_stmt(self, stmt: ast.stmt, scope: Scope) -> None:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            self._visit_function(stmt, scope)
        elif isinstance(stmt, ast.ClassDef):
            self._visit_class(stmt, scope)
        elif isinstance(stmt, ast.Assign):
            self._visit_expr(stmt.value, scope)
            for target in stmt.targets:
                self._bind_target(target, scope, BindingKind.ASSIGN)
        elif isinstance(stmt, ast.AnnAssign):
            if stmt.value is not None:
                self._visit_expr(stmt.value, scope)
                self._bind_target(stmt.target, scope, BindingKind.ASSIGN)
            else:
                self._visit_target_exprs(stmt.target, scope)
        elif isinstance(stmt, ast.AugAssign):
            self._visit_expr(stmt.value, scope)
            self._bind_target(stmt.target, scope, BindingKind.ASSIGN)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            self._visit_expr(stmt.iter, scope)
            self._bind_target(stmt.target, scope, BindingKind.FOR)
            for inner in stmt.body + stmt.orelse:
                self._visit_stmt(inner, scope)
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                self._visit_expr(item.context_expr, scope)
                if item.optional_vars is not None:
                    self._bind_target(item.optional_vars, scope, BindingKind.WITH)
            for inner in stmt.body:
                self._visit_stmt(inner, scope)
        elif isinstance(stmt, (ast.Try, getattr(ast, "TryStar", ast.Try))):
            for inner in stmt.body:
                self._visit_stmt(inner, scope)
            for handler in stmt.handlers:
                if handler.type is not None:
                    self._visit_expr(handler.type, scope)
                if handler.name:
                    self._bind(scope, handler.name, BindingKind.EXCEPT, handler)
                for inner in handler.body:
                    self._visit_stmt(inner, scope)
            for inner in stmt.orelse + stmt.finalbody:
                self._visit_stmt(inner, scope)
        elif isinstance(stmt, ast.Import):
            self._visit_import(stmt, scope)
        elif isinstance(stmt, ast.ImportFrom):
            self._visit_import_from(stmt, scope)
        elif isinstance(stmt, (ast.Global, ast.Nonlocal, ast.Pass, ast.Break, ast.Continue)):
            pass
        elif isinstance(stmt, ast.Match):
            self._visit_expr(stmt.subject, scope)
            for case in stmt.cases:
                self._bind_pattern(case.pattern, scope)
                if case.guard is not None:
                    self._visit_expr(case.guard, scope)
                for inner in case.body:
                    self._visit_stmt(inner, scope)
        else:
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.stmt):
                    self._visit_stmt(child, scope)
                elif isinstance(child, ast.expr):
                    self._visit_expr(child, scope)

    def _visit_function(self, node: ast.FunctionDef | ast.AsyncFunctionDef,
                        scope: Scope) -> None:
        for dec in node.decorator_list:
            self._visit_expr(dec, scope)
        self._visit_defaults(node.args, scope)
        qname = f"{scope.name}.{node.name}"
        entity = EntityRef(qname, EntityKind.FUNCTION, self.module.path, span=_span(node))
        self._bind(scope, node.name, BindingKind.FUNCTION, node, entity)
        fn_scope = self._new_scope(ScopeKind.FUNCTION, qname, node, scope, entity)
        self._bind_params(node.args, fn_scope)
        self._prescan_declarations(node.body, fn_scope)
        for stmt in node.body:
            self._visit_stmt(stmt, fn_scope)

    def _visit_class(self, node: ast.ClassDef, scope: Scope) -> None:
        for dec in node.decorator_list:
            self._visit_expr(dec, scope)
        for base in node.bases:
            self._visit_expr(base, scope)
        for kw in node.keywords:
            self._visit_expr(kw.value, scope)
        qname = f"{scope.name}.{node.name}"
        entity = EntityRef(qname, EntityKind.CLASS, self.module.path, span=_span(node))
        self._bind(scope, node.name, BindingKind.CLASS, node, entity)
        cls_scope = self._new_scope(ScopeKind.CLASS, qname, node, scope, entity)
        self._prescan_declarations(node.body, cls_scope)
        for stmt in node.body:
            self._visit_stmt(stmt, cls_scope)

    def _visit_import(self, stmt: ast.Import, scope: Scope) -> None:
        assert self.tree is not None
        for alias in stmt.names:
            bound = alias.asname or alias.name.split(".")[0]
            self._bind(scope, bound, BindingKind.IMPORT, stmt)
            self.tree.import_decls.append(
                ImportDecl(
                    scope,
                    bound,
                    alias.name,
                    None,
                    0,
                    stmt.lineno,
                    binds_prefix=alias.asname is None and "." in alias.name,
                )
            )

    def _visit_import_from(self, stmt: ast.ImportFrom, scope: Scope) -> None:
        assert self.tree is not None
        module = stmt.module or ""
        for alias in stmt.names:
            if alias.name == "*":
                self.tree.import_decls.append(
                    ImportDecl(scope, None, module, "*", stmt.level, stmt.lineno)
                )
                continue
            bound = alias.asname or alias.name
            self._bind(scope, bound, BindingKind.IMPORT, stmt)
            self.tree.import_decls.append(
                ImportDecl(scope, bound, module, alias.name, stmt.level, stmt.lineno)
            )

    # -- expressions ----------------------------------------------------

    def _visit_expr(self, node: ast.expr, scope: Scope) -> None:
        if isinstance(node, ast.Lambda):
            self._visit_defaults(node.args, scope)
            qname = f"{scope.name}.{synthetic_name('lambda', node)}"
            entity = EntityRef(qname, EntityKind.LAMBDA, self.module.path, span=_span(node))
            lam_scope = self._new_scope(ScopeKind.LAMBDA, qname, node, scope, entity)
            self._bind_params(node.args, lam_scope)
            self._visit_expr(node.body, lam_scope)
        elif isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp, ast.DictComp)):
            self._visit_comprehension(node, scope)
        elif isinstance(node, ast.NamedExpr):
            self._visit_expr(node.value, scope)
            bind_scope = scope
            while bind_scope.kind is ScopeKind.COMPREHENSION:
                assert bind_scope.parent is not None
                bind_scope = bind_scope.parent
            self._bind_target(node.target, bind_scope, BindingKind.ASSIGN)
        else:
            for child in ast.iter_child_nodes(node):
                if isinstance(child, ast.expr):
                    self._visit_expr(child, scope)
                elif isinstance(child, ast.keyword):
                    self._visit_expr(child.value, scope)
                elif isinstance(child, ast.comprehension):  # pragma: no cover
                    pass

    def _visit_comprehension(self, node: ast.expr, scope: Scope) -> None:
        label = _COMP_LABEL[type(node)]
        generators = node.generators  # type: ignore[attr-defined]
        # The first iterable is evaluated in the enclosing scope.
        self._visit_expr(generators[0].iter, scope)
        qname = f"{scope.name}.{synthetic_name(label, node)}"
        comp_scope = self._new_scope(ScopeKind.COMPREHENSION, qname, node, scope)
        for i, gen in enumerate(generators):
            if i > 0:
                self._visit_expr(gen.iter, comp_scope)
            self._bind_target(gen.target, comp_scope, BindingKind.COMPREHENSION)
            for cond in gen.ifs:
                self._visit_expr(cond, comp_scope)
        if isinstance(node, ast.DictComp):
            self._visit_expr(node.key, comp_scope)
            self._visit_expr(node.value, comp_scope)
        else:
            self._visit_expr(node.elt, comp_scope)  # type: ignore[attr-defined]

    # -- binding targets -------------------------------------------------

    def _bind_target(self, target: ast.expr, scope: Scope, kind: BindingKind) -> None:
        if isinstance(target, ast.Name):
            self._bind(scope, target.id, kind, target)
        elif isinstance(target, (ast.Tuple, ast.List)):
            for element in target.elts:
                self._bind_target(element, scope, kind)
        elif isinstance(target, ast.Starred):
            self._bind_target(target.value, scope, kind)
        else:
            self._visit_target_exprs(target, scope)

    def _visit_target_exprs(self, target: ast.expr, scope: Scope) -> None:
        # Attribute/subscript targets bind nothing but their receivers are
        # ordinary expressions (may contain lambdas, walrus, calls).
        for child in ast.iter_child_nodes(target):
            if isinstance(child, ast.expr):
                self._visit_expr(child, scope)

    def _bind_pattern(self, pattern: ast.AST, scope: Scope) -> None:
        if isinstance(pattern, ast.MatchAs) and pattern.name:
            self._bind(scope, pattern.name, BindingKind.ASSIGN, pattern)
        elif isinstance(pattern, ast.MatchStar) and pattern.name:
            self._bind(scope, pattern.name, BindingKind.ASSIGN, pattern)
        elif isinstance(pattern, ast.MatchMapping) and pattern.rest:
            self._bind(scope, pattern.rest, BindingKind.ASSIGN, pattern)
        for child in ast.iter_child_nodes(pattern):
            self._bind_pattern(child, scope)

    def _bind_params(self, args: ast.arguments, scope: Scope) -> None:
        params = list(args.posonlyargs) + list(args.args) + list(args.kwonlyargs)
        if args.vararg:
            params.append(args.vararg)
        if args.kwarg:
            params.append(args.kwarg)
        for arg in params:
            self._bind(scope, arg.arg, BindingKind.PARAM, arg)

    def _visit_defaults(self, args: ast.arguments, scope: Scope) -> None:
        for default in list(args.defaults) + [d for d in args.kw_defaults if d]:
            self._visit_expr(default, scope)
