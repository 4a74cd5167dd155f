"""Assignment-graph construction: flow edges from value producers to consumers.

Each binding site, parameter, return slot, class attribute slot, dict slot,
and call-result slot becomes a node.  Syntactically evident flows (plain and
chained assignments, defaults, returns and yields, decorator application,
constant-key dict stores, loop/with/comprehension element flows) are edges;
flows that depend on propagated values (argument-to-parameter, attribute and
subscript access, except-as bindings) are recorded as pending sites that the
solver turns into edges as the fixpoint reveals receivers and callees.
"""

from __future__ import annotations

import ast
from dataclasses import dataclass, field

from ..config import BUILTIN_NAMES, MODULE_DUNDERS
from ..errors import Diagnostics
from ..model import EntityKind, EntityRef, external_ref
from ..frontend.imports import ImportBinding, ImportTable, PackageIndex
from ..frontend.parsing import Opaque, SourceModule
from ..frontend.scopes import Binding, BindingKind, Scope, ScopeKind, ScopeTree
from .values import (
    UNKNOWN,
    AbstractValue,
    ClassObj,
    DictObj,
    ExternalSym,
    FunctionObj,
    InstanceOf,
    ModuleObj,
    SuperObj,
)


@dataclass(frozen=True)
class Producer:
    """Where an expression's values come from: graph nodes plus direct seeds."""

    nodes: tuple[str, ...] = ()
    values: frozenset = frozenset()

    @staticmethod
    def empty() -> "Producer":
        return _EMPTY

    @staticmethod
    def of_node(node: str) -> "Producer":
        return Producer(nodes=(node,))

    @staticmethod
    def of_values(*values: AbstractValue) -> "Producer":
        return Producer(values=frozenset(values))

    @staticmethod
    def union(producers: list["Producer"]) -> "Producer":
        nodes: list[str] = []
        values: set = set()
        for p in producers:
            for n in p.nodes:
                if n not in nodes:
                    nodes.append(n)
            values |= p.values
        return Producer(tuple(nodes), frozenset(values))


_EMPTY = Producer()
_UNKNOWN_PRODUCER = Producer(values=frozenset([UNKNOWN]))


@dataclass
class FuncInfo:
    entity: EntityRef
    qname: str
    params: list[str]
    kwonly: set[str]
    vararg: str | None
    kwarg: str | None
    owner_class: str | None = None
    method_kind: str = "plain"  # plain | static | classmethod


@dataclass
class CallSite:
    id: str
    module: str
    line: int
    scope: Scope
    callee_node: str
    pos_args: tuple[Producer, ...]
    kw_args: dict[str, Producer]
    has_star: bool
    result_node: str


@dataclass
class AttrSite:
    id: str
    access: str  # load | store
    receiver: Producer
    attr: str
    scope: Scope
    line: int
    module: str = ""
    load_node: str | None = None
    value: Producer | None = None
    in_callee: bool = False


@dataclass
class SubscriptSite:
    id: str
    access: str  # load | store
    receiver: Producer
    key: str | None  # constant string key, else None
    scope: Scope
    line: int
    module: str = ""
    load_node: str | None = None
    value: Producer | None = None


@dataclass
class RaiseSite:
    producer: Producer
    scope: Scope
    line: int


@dataclass
class ExceptSite:
    producer: Producer
    scope: Scope
    line: int
    alias_node: str | None = None


@dataclass
class DecoratorRecord:
    site_id: str
    decorated: EntityRef
    dec_producer: Producer
    fallback: Producer
    result_node: str
    scope: Scope
    line: int


@dataclass
class ImportRecord:
    binding: ImportBinding
    scope: Scope
    line: int


@dataclass
class ClassRecord:
    entity: EntityRef
    qname: str
    base_slots: list[str]
    scope: Scope
    line: int


@dataclass
class SiteTable:
    """Everything the solver and extractor need beyond raw flow edges."""

    calls: dict[str, CallSite] = field(default_factory=dict)
    attrs: dict[str, AttrSite] = field(default_factory=dict)
    subscripts: dict[str, SubscriptSite] = field(default_factory=dict)
    raises: list[RaiseSite] = field(default_factory=list)
    excepts: list[ExceptSite] = field(default_factory=list)
    decorators: list[DecoratorRecord] = field(default_factory=list)
    imports: list[ImportRecord] = field(default_factory=list)
    classes: dict[str, ClassRecord] = field(default_factory=dict)
    funcs: dict[str, FuncInfo] = field(default_factory=dict)


class AssignmentGraph:
    """Finite flow graph over named nodes with an initial seed map."""

    def __init__(self) -> None:
        self.nodes: set[str] = set()
        self.edges: dict[str, set[str]] = {}
        self.seeds: dict[str, set[AbstractValue]] = {}
        self.sites = SiteTable()
        # dict allocation site -> its slot nodes, for computed-key loads
        self.dict_slots: dict[str, set[str]] = {}

    def ensure(self, node: str) -> str:
        self.nodes.add(node)
        return node

    def dict_slot_node(self, dict_site: str, key: str | None) -> str:
        node = self.ensure(dict_slot(dict_site, key))
        self.dict_slots.setdefault(dict_site, set()).add(node)
        return node

    def add_edge(self, producer: str, consumer: str) -> bool:
        self.ensure(producer)
        self.ensure(consumer)
        consumers = self.edges.setdefault(producer, set())
        if consumer in consumers:
            return False
        consumers.add(consumer)
        return True

    def add_seed(self, node: str, value: AbstractValue) -> bool:
        self.ensure(node)
        seeded = self.seeds.setdefault(node, set())
        if value in seeded:
            return False
        seeded.add(value)
        return True

    def flow(self, producer: Producer, consumer: str) -> None:
        self.ensure(consumer)
        for node in producer.nodes:
            self.add_edge(node, consumer)
        for value in producer.values:
            self.add_seed(consumer, value)


def binding_node(binding: Binding) -> str:
    """Graph node for a binding; class-scope names double as attribute slots."""
    scope = binding.scope
    if scope.kind is ScopeKind.CLASS:
        return f"attr:{scope.name}:{binding.name}"
    return f"var:{scope.name}:{binding.name}"


def attr_slot(class_qname: str, attr: str) -> str:
    return f"attr:{class_qname}:{attr}"


def var_node(scope_qname: str, name: str) -> str:
    return f"var:{scope_qname}:{name}"


def ret_node(func_qname: str) -> str:
    return f"ret:{func_qname}"


def dict_slot(dict_site: str, key: str | None) -> str:
    return f"dict:{dict_site}:k={key}" if key is not None else f"dict:{dict_site}:*"


def build_assignment_graph(
    modules: dict[str, SourceModule],
    scope_trees: dict[str, ScopeTree],
    imports: ImportTable,
    diagnostics: Diagnostics | None = None,
) -> AssignmentGraph:
    """Build the initial flow graph for a whole project."""
    builder = _GraphBuilder(modules, scope_trees, imports, diagnostics or Diagnostics())
    return builder.build()


class _GraphBuilder:
    def __init__(
        self,
        modules: dict[str, SourceModule],
        scope_trees: dict[str, ScopeTree],
        imports: ImportTable,
        diagnostics: Diagnostics,
    ) -> None:
        self.modules = modules
        self.trees = scope_trees
        self.imports = imports
        self.index = PackageIndex(modules)
        self.diag = diagnostics
        self.graph = AssignmentGraph()
        self.current_module = ""

    def build(self) -> AssignmentGraph:
        self._expand_star_imports()
        self._seed_import_aliases()
        for name in sorted(self.modules):
            self.current_module = name
            tree = self.trees[name]
            try:
                for stmt in self.modules[name].tree.body:
                    self._visit_stmt(stmt, tree.module_scope)
            except RecursionError:
                # Flows found so far in this module remain valid.
                self.diag.warn(
                    f"{self.modules[name].path}: expression nesting too deep, "
                    "module partially analyzed",
                    "deep_nesting",
                )
        for binding in self.imports.bindings + self.imports.star_imports:
            self.graph.sites.imports.append(
                ImportRecord(binding, binding.decl.scope, binding.decl.line)
            )
        return self.graph

    # -- imports ---------------------------------------------------------

    def _expand_star_imports(self) -> None:
        for star in self.imports.star_imports:
            if star.bound_module is None or star.bound_module not in self.trees:
                continue  # external star imports contribute nothing
            source_scope = self.trees[star.bound_module].module_scope
            target_scope = star.decl.scope
            for name in sorted(source_scope.bindings):
                if name.startswith("_"):
                    continue
                source_binding = source_scope.bindings[name]
                if name not in target_scope.bindings:
                    target_scope.bindings[name] = Binding(
                        name, BindingKind.IMPORT, target_scope,
                        star.decl.line, 0, source_binding.entity,
                    )
                self.graph.add_edge(
                    binding_node(source_binding),
                    binding_node(target_scope.bindings[name]),
                )

    def _seed_import_aliases(self) -> None:
        for b in self.imports.bindings:
            assert b.alias is not None
            scope_binding = b.decl.scope.bindings.get(b.alias)
            if scope_binding is None:
                continue
            node = self.graph.ensure(binding_node(scope_binding))
            if b.bound_module is not None:
                self.graph.add_seed(node, ModuleObj(self.index.module_entity(b.bound_module)))
            elif b.bound_member is not None and not b.unresolved:
                src_module, member = b.bound_member
                src_scope = self.trees[src_module].module_scope
                member_binding = src_scope.bindings.get(member)
                if member_binding is not None:
                    self.graph.add_edge(binding_node(member_binding), node)
            elif b.target.is_external and not b.unresolved:
                name = (
                    b.decl.module.split(".")[0]
                    if b.decl.binds_prefix
                    else b.target.qualified_name
                )
                kind = EntityKind.MODULE if b.decl.member is None else EntityKind.UNKNOWN
                self.graph.add_seed(node, ExternalSym(external_ref(name, kind)))
            else:
                self.graph.add_seed(node, UNKNOWN)

    # -- shared helpers ----------------------------------------------------

    def _site_id(self, node: ast.AST) -> str:
        end_line = getattr(node, "end_lineno", node.lineno)
        end_col = getattr(node, "end_col_offset", node.col_offset)
        return (
            f"{self.current_module}:{node.lineno}:{node.col_offset}"
            f":{end_line}:{end_col}"
        )

    def _enclosing_class(self, scope: Scope) -> EntityRef | None:
        walker: Scope | None = scope
        while walker is not None:
            if walker.kind is ScopeKind.CLASS:
                return walker.entity
            walker = walker.parent
        return None

    # -- statements ----------------------------------------------------------

    def _visit_stmt(self, stmt: ast.stmt, scope: Scope) -> None:
        if isinstance(stmt, Opaque):
            return
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            self._handle_function(stmt, scope)
        elif isinstance(stmt, ast.ClassDef):
            self._handle_class(stmt, scope)
        elif isinstance(stmt, ast.Return):
            producer = self._eval(stmt.value, scope) if stmt.value else Producer.empty()
            if scope.kind in (ScopeKind.FUNCTION, ScopeKind.LAMBDA):
                self.graph.flow(producer, ret_node(scope.name))
        elif isinstance(stmt, ast.Assign):
            whole, elements = self._eval_assign_value(stmt.value, scope)
            for target in stmt.targets:
                self._assign_target(target, whole, elements, scope)
        elif isinstance(stmt, ast.AnnAssign):
            if stmt.value is not None:
                whole, elements = self._eval_assign_value(stmt.value, scope)
                self._assign_target(stmt.target, whole, elements, scope)
        elif isinstance(stmt, ast.AugAssign):
            producer = self._eval(stmt.value, scope)
            self._assign_target(stmt.target, producer, None, scope)
        elif isinstance(stmt, (ast.For, ast.AsyncFor)):
            iter_producer = self._eval(stmt.iter, scope)
            self._assign_target(stmt.target, iter_producer, None, scope)
            for inner in stmt.body + stmt.orelse:
                self._visit_stmt(inner, scope)
        elif isinstance(stmt, (ast.With, ast.AsyncWith)):
            for item in stmt.items:
                producer = self._eval(item.context_expr, scope)
                if item.optional_vars is not None:
                    self._assign_target(item.optional_vars, producer, None, scope)
            for inner in stmt.body:
                self._visit_stmt(inner, scope)
        elif isinstance(stmt, ast.Raise):
            self._handle_raise(stmt, scope)
        elif isinstance(stmt, (ast.Try, getattr(ast, "TryStar", ast.Try))):
            for inner in stmt.body:
                self._visit_stmt(inner, scope)
            for handler in stmt.handlers:
                self._handle_except(handler, scope)
            for inner in stmt.orelse + stmt.finalbody:
                self._visit_stmt(inner, scope)
        elif isinstance(stmt, (ast.Import, ast.ImportFrom)):
            pass  # bindings seeded up front, records appended at build end
        elif isinstance(stmt, (ast.Global, ast.Nonlocal, ast.Pass, ast.Break, ast.Continue)):
            pass
        elif isinstance(stmt, ast.Expr):
            self._eval(stmt.value, scope)
        elif isinstance(stmt, ast.Assert):
            self._eval(stmt.test, scope)
            if stmt.msg is not None:
                self._eval(stmt.msg, scope)
        elif isinstance(stmt, ast.Delete):
            for target in stmt.targets:
                for child in ast.iter_child_nodes(target):
                    if isinstance(child, ast.expr):
                        self._eval(child, scope)
        elif isinstance(stmt, ast.Match):
            self._eval(stmt.subject, scope)
            for case in stmt.cases:
                self._eval_pattern(case.pattern, scope)
                if case.guard is not None:
                    self._eval(case.guard, scope)
                for inner in case.body:
                    self._visit_stmt(inner, scope)
        else:
            for child in ast.iter_child_nodes(stmt):
                if isinstance(child, ast.stmt):
                    self._visit_stmt(child, scope)
                elif isinstance(child, ast.expr):
                    self._eval(child, scope)

    def _handle_function(
        self, node: ast.FunctionDef | ast.AsyncFunctionDef, scope: Scope
    ) -> None:
        fn_scope = self.trees[self.current_module].scope_for(node)
        entity = fn_scope.entity
        assert entity is not None
        qname = fn_scope.name

        method_kind = _method_kind(node)
        owner = self._enclosing_class(scope) if scope.kind is ScopeKind.CLASS else None
        info = FuncInfo(
            entity,
            qname,
            params=[a.arg for a in list(node.args.posonlyargs) + list(node.args.args)],
            kwonly={a.arg for a in node.args.kwonlyargs},
            vararg=node.args.vararg.arg if node.args.vararg else None,
            kwarg=node.args.kwarg.arg if node.args.kwarg else None,
            owner_class=owner.qualified_name if owner else None,
            method_kind=method_kind,
        )
        self.graph.sites.funcs[qname] = info
        self.graph.ensure(ret_node(qname))
        for param in info.params + sorted(info.kwonly):
            self.graph.ensure(var_node(qname, param))

        self._flow_defaults(node.args, scope, qname)

        if owner is not None and info.params:
            if method_kind == "plain":
                self.graph.add_seed(var_node(qname, info.params[0]), InstanceOf(owner))
            elif method_kind == "classmethod":
                self.graph.add_seed(var_node(qname, info.params[0]), ClassObj(owner))

        produced = self._apply_decorators(
            node.decorator_list, Producer.of_values(FunctionObj(entity)), entity, scope
        )
        target_binding = scope.lookup(node.name)
        if target_binding is not None:
            self.graph.flow(produced, binding_node(target_binding))

        for inner in node.body:
            self._visit_stmt(inner, fn_scope)

    def _handle_class(self, node: ast.ClassDef, scope: Scope) -> None:
        cls_scope = self.trees[self.current_module].scope_for(node)
        entity = cls_scope.entity
        assert entity is not None
        qname = cls_scope.name

        base_slots: list[str] = []
        for i, base in enumerate(node.bases):
            producer = self._eval(base, scope)
            slot = self.graph.ensure(f"base:{qname}:{i}")
            self.graph.flow(producer, slot)
            base_slots.append(slot)
        for kw in node.keywords:
            self._eval(kw.value, scope)
        self.graph.sites.classes[qname] = ClassRecord(
            entity, qname, base_slots, scope, node.lineno
        )

        produced = self._apply_decorators(
            node.decorator_list, Producer.of_values(ClassObj(entity)), entity, scope
        )
        target_binding = scope.lookup(node.name)
        if target_binding is not None:
            self.graph.flow(produced, binding_node(target_binding))

        for inner in node.body:
            self._visit_stmt(inner, cls_scope)

    def _apply_decorators(
        self,
        decorators: list[ast.expr],
        initial: Producer,
        decorated: EntityRef,
        scope: Scope,
    ) -> Producer:
        current = initial
        for dec in reversed(decorators):
            dec_producer = self._eval(dec, scope)
            site = self._site_id(dec)
            callee = self.graph.ensure(f"fn:{site}")
            result = self.graph.ensure(f"res:{site}")
            self.graph.flow(dec_producer, callee)
            self.graph.sites.calls[site] = CallSite(
                site, self.current_module, dec.lineno, scope,
                callee, (current,), {}, False, result,
            )
            self.graph.sites.decorators.append(
                DecoratorRecord(site, decorated, dec_producer, current, result, scope, dec.lineno)
            )
            current = Producer.of_node(result)
        return current

    def _flow_defaults(self, args: ast.arguments, scope: Scope, fn_qname: str) -> None:
        positional = list(args.posonlyargs) + list(args.args)
        defaults = list(args.defaults)
        # Defaults align with the tail of the positional parameter list.
        for param, default in zip(positional[len(positional) - len(defaults):], defaults):
            self.graph.flow(self._eval(default, scope), var_node(fn_qname, param.arg))
        for param, default in zip(args.kwonlyargs, args.kw_defaults):
            if default is not None:
                self.graph.flow(self._eval(default, scope), var_node(fn_qname, param.arg))

    def _eval_pattern(self, pattern: ast.AST, scope: Scope) -> None:
        # Value and class patterns reference names; capture targets were
        # bound by the scope pass and receive no flow (match values are
        # opaque to the abstract domain).
        if isinstance(pattern, ast.MatchValue):
            self._eval(pattern.value, scope)
        elif isinstance(pattern, ast.MatchClass):
            self._eval(pattern.cls, scope)
        for child in ast.iter_child_nodes(pattern):
            if isinstance(child, ast.pattern):
                self._eval_pattern(child, scope)

    def _handle_raise(self, stmt: ast.Raise, scope: Scope) -> None:
        if stmt.exc is None:
            return
        if isinstance(stmt.exc, ast.Call):
            self._eval(stmt.exc, scope)
            # The raised class is whatever the call's callee evaluates to.
            producer = Producer.of_node(f"fn:{self._site_id(stmt.exc)}")
        else:
            producer = self._eval(stmt.exc, scope)
        self.graph.sites.raises.append(RaiseSite(producer, scope, stmt.lineno))
        if stmt.cause is not None:
            self._eval(stmt.cause, scope)

    def _handle_except(self, handler: ast.ExceptHandler, scope: Scope) -> None:
        alias_node = None
        if handler.type is not None:
            producer = self._eval(handler.type, scope)
            if handler.name:
                alias_binding = scope.lookup(handler.name)
                if alias_binding is not None:
                    alias_node = self.graph.ensure(binding_node(alias_binding))
            self.graph.sites.excepts.append(
                ExceptSite(producer, scope, handler.lineno, alias_node)
            )
        for inner in handler.body:
            self._visit_stmt(inner, scope)

    # -- assignment targets ---------------------------------------------------

    def _eval_assign_value(
        self, value: ast.expr, scope: Scope
    ) -> tuple[Producer, list[Producer] | None]:
        """Evaluate an assignment RHS, keeping per-element producers for
        literal tuples/lists so equal-arity unpacking stays precise."""
        if isinstance(value, (ast.Tuple, ast.List)) and not any(
            isinstance(e, ast.Starred) for e in value.elts
        ):
            elements = [self._eval(e, scope) for e in value.elts]
            return Producer.union(elements), elements
        return self._eval(value, scope), None

    def _assign_target(
        self,
        target: ast.expr,
        producer: Producer,
        elements: list[Producer] | None,
        scope: Scope,
    ) -> None:
        if isinstance(target, ast.Name):
            binding = scope.lookup(target.id)
            if binding is not None:
                self.graph.flow(producer, binding_node(binding))
        elif isinstance(target, (ast.Tuple, ast.List)):
            plain = [e for e in target.elts if not isinstance(e, ast.Starred)]
            if elements is not None and len(plain) == len(target.elts) == len(elements):
                for sub_target, sub_producer in zip(target.elts, elements):
                    self._assign_target(sub_target, sub_producer, None, scope)
            else:
                for sub_target in target.elts:
                    self._assign_target(sub_target, producer, None, scope)
        elif isinstance(target, ast.Starred):
            self._assign_target(target.value, producer, None, scope)
        elif isinstance(target, ast.Attribute):
            receiver = self._eval(target.value, scope)
            site = self._site_id(target)
            self.graph.sites.attrs[site] = AttrSite(
                site, "store", receiver, target.attr, scope, target.lineno,
                module=self.current_module, value=producer,
            )
        elif isinstance(target, ast.Subscript):
            receiver = self._eval(target.value, scope)
            key = _constant_key(target.slice)
            if key is None:
                self._eval(target.slice, scope)
            site = self._site_id(target)
            self.graph.sites.subscripts[site] = SubscriptSite(
                site, "store", receiver, key, scope, target.lineno,
                module=self.current_module, value=producer,
            )

    # -- expressions --------------------------------------------------------

    def _eval(self, node: ast.expr, scope: Scope) -> Producer:
        if isinstance(node, ast.Name):
            return self._eval_name(node, scope)
        if isinstance(node, ast.Attribute):
            return self._eval_attribute(node, scope, in_callee=False)
        if isinstance(node, ast.Call):
            return self._eval_call(node, scope)
        if isinstance(node, ast.Lambda):
            return self._eval_lambda(node, scope)
        if isinstance(node, ast.Dict):
            return self._eval_dict(node, scope)
        if isinstance(node, (ast.Tuple, ast.List, ast.Set)):
            return Producer.union([self._eval(e, scope) for e in node.elts])
        if isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp)):
            return self._eval_comprehension(node, scope)
        if isinstance(node, ast.DictComp):
            return self._eval_dictcomp(node, scope)
        if isinstance(node, ast.IfExp):
            self._eval(node.test, scope)
            return Producer.union([self._eval(node.body, scope), self._eval(node.orelse, scope)])
        if isinstance(node, ast.BoolOp):
            return Producer.union([self._eval(v, scope) for v in node.values])
        if isinstance(node, ast.NamedExpr):
            producer = self._eval(node.value, scope)
            self._assign_target(node.target, producer, None, scope)
            return producer
        if isinstance(node, ast.Await):
            return self._eval(node.value, scope)
        if isinstance(node, ast.Yield):
            if node.value is not None and scope.kind in (ScopeKind.FUNCTION, ScopeKind.LAMBDA):
                self.graph.flow(self._eval(node.value, scope), ret_node(scope.name))
            elif node.value is not None:
                self._eval(node.value, scope)
            return Producer.empty()
        if isinstance(node, ast.YieldFrom):
            # Delegated elements: the iterable's element values are already
            # what its producer carries under the element-flow approximation.
            producer = self._eval(node.value, scope)
            if scope.kind in (ScopeKind.FUNCTION, ScopeKind.LAMBDA):
                self.graph.flow(producer, ret_node(scope.name))
            return Producer.empty()
        if isinstance(node, ast.Starred):
            return self._eval(node.value, scope)
        if isinstance(node, ast.Subscript):
            return self._eval_subscript(node, scope)
        if isinstance(node, ast.Constant):
            return Producer.empty()
        # BinOp, UnaryOp, Compare, JoinedStr, FormattedValue, Slice, ...:
        # evaluate children for their side effects on the site table.
        for child in ast.iter_child_nodes(node):
            if isinstance(child, ast.expr):
                self._eval(child, scope)
        return Producer.empty()

    def _eval_name(self, node: ast.Name, scope: Scope) -> Producer:
        binding = scope.lookup(node.id)
        if binding is not None:
            return Producer.of_node(self.graph.ensure(binding_node(binding)))
        if node.id in BUILTIN_NAMES:
            return Producer.of_values(ExternalSym(external_ref(node.id)))
        if node.id in MODULE_DUNDERS:
            return Producer.empty()
        return _UNKNOWN_PRODUCER

    def _eval_attribute(self, node: ast.Attribute, scope: Scope, in_callee: bool) -> Producer:
        receiver = self._eval(node.value, scope)
        site = self._site_id(node)
        load_node = self.graph.ensure(f"attrload:{site}")
        self.graph.sites.attrs[site] = AttrSite(
            site, "load", receiver, node.attr, scope, node.lineno,
            module=self.current_module, load_node=load_node, in_callee=in_callee,
        )
        return Producer.of_node(load_node)

    def _eval_call(self, node: ast.Call, scope: Scope) -> Producer:
        if (
            isinstance(node.func, ast.Name)
            and node.func.id == "super"
            and not node.args
            and scope.lookup("super") is None
        ):
            owner = self._enclosing_class(scope)
            if owner is not None:
                return Producer.of_values(SuperObj(owner))

        if isinstance(node.func, ast.Attribute):
            func_producer = self._eval_attribute(node.func, scope, in_callee=True)
        else:
            func_producer = self._eval(node.func, scope)

        site = self._site_id(node)
        callee = self.graph.ensure(f"fn:{site}")
        result = self.graph.ensure(f"res:{site}")
        self.graph.flow(func_producer, callee)

        pos_args: list[Producer] = []
        has_star = False
        for arg in node.args:
            if isinstance(arg, ast.Starred):
                has_star = True
                self._eval(arg.value, scope)
            else:
                pos_args.append(self._eval(arg, scope))
        kw_args: dict[str, Producer] = {}
        for kw in node.keywords:
            if kw.arg is None:
                self._eval(kw.value, scope)
            else:
                kw_args[kw.arg] = self._eval(kw.value, scope)

        self.graph.sites.calls[site] = CallSite(
            site, self.current_module, node.lineno, scope,
            callee, tuple(pos_args), kw_args, has_star, result,
        )
        return Producer.of_node(result)

    def _eval_lambda(self, node: ast.Lambda, scope: Scope) -> Producer:
        lam_scope = self.trees[self.current_module].scope_for(node)
        entity = lam_scope.entity
        assert entity is not None
        qname = lam_scope.name
        info = FuncInfo(
            entity,
            qname,
            params=[a.arg for a in list(node.args.posonlyargs) + list(node.args.args)],
            kwonly={a.arg for a in node.args.kwonlyargs},
            vararg=node.args.vararg.arg if node.args.vararg else None,
            kwarg=node.args.kwarg.arg if node.args.kwarg else None,
        )
        self.graph.sites.funcs[qname] = info
        self._flow_defaults(node.args, scope, qname)
        self.graph.flow(self._eval(node.body, lam_scope), ret_node(qname))
        return Producer.of_values(FunctionObj(entity))

    def _eval_dict(self, node: ast.Dict, scope: Scope) -> Producer:
        site = self._site_id(node)
        for key, value in zip(node.keys, node.values):
            producer = self._eval(value, scope)
            if key is None:  # **spread
                continue
            const = _constant_key(key)
            if const is None:
                self._eval(key, scope)
            self.graph.flow(producer, self.graph.dict_slot_node(site, const))
        return Producer.of_values(DictObj(site))

    def _eval_dictcomp(self, node: ast.DictComp, scope: Scope) -> Producer:
        comp_scope = self.trees[self.current_module].scope_for(node)
        self._flow_generators(node.generators, scope, comp_scope)
        self._eval(node.key, comp_scope)
        site = self._site_id(node)
        value_producer = self._eval(node.value, comp_scope)
        self.graph.flow(value_producer, self.graph.dict_slot_node(site, None))
        return Producer.of_values(DictObj(site))

    def _eval_comprehension(self, node: ast.expr, scope: Scope) -> Producer:
        comp_scope = self.trees[self.current_module].scope_for(node)
        self._flow_generators(node.generators, scope, comp_scope)  # type: ignore[attr-defined]
        return self._eval(node.elt, comp_scope)  # type: ignore[attr-defined]

    def _flow_generators(
        self, generators: list[ast.comprehension], outer: Scope, comp_scope: Scope
    ) -> None:
        for i, gen in enumerate(generators):
            iter_scope = outer if i == 0 else comp_scope
            producer = self._eval(gen.iter, iter_scope)
            self._assign_target(gen.target, producer, None, comp_scope)
            for cond in gen.ifs:
                self._eval(cond, comp_scope)

    def _eval_subscript(self, node: ast.Subscript, scope: Scope) -> Producer:
        receiver = self._eval(node.value, scope)
        key = _constant_key(node.slice)
        if key is None:
            self._eval(node.slice, scope)
        site = self._site_id(node)
        load_node = self.graph.ensure(f"subload:{site}")
        # Sequence elements are already the receiver's values under the
        # element-flow approximation; dict slots are wired in by the solver.
        self.graph.flow(receiver, load_node)
        self.graph.sites.subscripts[site] = SubscriptSite(
            site, "load", receiver, key, scope, node.lineno,
            module=self.current_module, load_node=load_node,
        )
        return Producer.of_node(load_node)


def _constant_key(node: ast.expr) -> str | None:
    if isinstance(node, ast.Constant) and isinstance(node.value, str):
        return node.value
    return None


def _method_kind(node: ast.FunctionDef | ast.AsyncFunctionDef) -> str:
    for dec in node.decorator_list:
        if isinstance(dec, ast.Name):
            if dec.id == "staticmethod":
                return "static"
            if dec.id == "classmethod":
                return "classmethod"
    return "plain"
