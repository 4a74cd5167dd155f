"""Iterated resolution: propagate, derive new flows, repeat to a fixpoint.

Argument-to-parameter flow, attribute and subscript access, and except-as
bindings all depend on which values reach a receiver or callee, so the
solver alternates worklist propagation with a derivation step that turns
newly visible values into new edges and seeds.  Value sets, the edge set,
and the class tables only ever grow, so every derivation is re-examined
only when its inputs actually changed, and the loop terminates.

Decorators whose callee never resolves to project code are modeled as
identity in a final phase, keeping the decorated name callable without
fabricating flows through decorators we can see.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..config import DEFAULT_HIGHER_ORDER
from ..errors import Diagnostics, FixpointBudgetError
from ..model import EdgeKind, EntityKind, EntityRef, external_ref
from ..frontend.parsing import SourceModule
from ..frontend.scopes import ScopeKind, ScopeTree
from .assignment import (
    AssignmentGraph,
    AttrSite,
    CallSite,
    Producer,
    SubscriptSite,
    attr_slot,
    ret_node,
    var_node,
)
from .fixpoint import propagate_worklist
from .mro import ClassInfo, Hierarchy
from .values import (
    EXTERNAL_DEPTH_LIMIT,
    AbstractValue,
    BoundMethodObj,
    ClassObj,
    DictObj,
    ExternalSym,
    FunctionObj,
    InstanceOf,
    ModuleObj,
    SuperObj,
    ValueSet,
    sorted_values,
)

# Each solve round can resolve at least one more link in a chain of
# value-dependent discoveries, so the round budget scales with the number
# of sites; exceeding it means non-monotone behavior, i.e. a bug.
_MIN_SOLVE_ROUNDS = 100


def _solve_round_budget(graph: AssignmentGraph) -> int:
    sites = graph.sites
    total = len(sites.calls) + len(sites.attrs) + len(sites.subscripts)
    return _MIN_SOLVE_ROUNDS + 2 * total


@dataclass
class ResolutionResult:
    graph: AssignmentGraph
    values: dict[str, ValueSet]
    hierarchy: Hierarchy
    diagnostics: Diagnostics
    instance_attrs: dict[tuple[str, str], EntityRef] = field(default_factory=dict)


def producer_values(producer: Producer, values) -> set:
    out = set(producer.values)
    for node in producer.nodes:
        out |= values.get(node, frozenset())
    return out


def _producer_size(producer: Producer, values) -> int:
    # Monotone change detector: grows iff some contributing set grew.
    return len(producer.values) + sum(len(values.get(n, ())) for n in producer.nodes)


def solve(
    graph: AssignmentGraph,
    modules: dict[str, SourceModule],
    scope_trees: dict[str, ScopeTree],
    diagnostics: Diagnostics | None = None,
    max_iters: int = 1000,
) -> ResolutionResult:
    diag = diagnostics if diagnostics is not None else Diagnostics()
    solver = _Solver(graph, modules, scope_trees, diag, max_iters)
    return solver.run()


class _Solver:
    def __init__(
        self,
        graph: AssignmentGraph,
        modules: dict[str, SourceModule],
        scope_trees: dict[str, ScopeTree],
        diag: Diagnostics,
        max_iters: int,
    ) -> None:
        self.graph = graph
        self.modules = modules
        self.trees = scope_trees
        self.diag = diag
        self.max_iters = max_iters
        self.instance_attrs: dict[tuple[str, str], EntityRef] = {}
        self.identity_applied: set[str] = set()
        # Computed-key subscript loads subscribed per dict allocation site.
        self.computed_loads: dict[str, set[str]] = {}
        # Change guards: last processed input state per site.
        self.site_state: dict[str, tuple] = {}
        self.values: dict[str, set[AbstractValue]] = {}
        self.dirty: set[str] = set()
        self.class_scopes = {
            scope.name: scope
            for tree in scope_trees.values()
            for scope in tree.all_scopes()
            if scope.kind is ScopeKind.CLASS
        }

    def run(self) -> ResolutionResult:
        self.values = {
            node: set(self.graph.seeds.get(node, ())) for node in self.graph.nodes
        }
        initial = sorted(node for node, vals in self.values.items() if vals)
        propagate_worklist(self.graph, self.values, initial, self.max_iters)

        hierarchy = self._build_static_hierarchy()
        last_version: tuple[int, int] | None = None
        budget = _solve_round_budget(self.graph)
        for _ in range(budget):
            self._refresh_hierarchy(hierarchy)
            version = self._hierarchy_version(hierarchy)
            self.dirty = set()
            self._derive(hierarchy)
            if self.dirty:
                propagate_worklist(
                    self.graph, self.values, sorted(self.dirty), self.max_iters
                )
                last_version = version
                continue
            if version != last_version:
                # Class tables changed without new flows (e.g. a fresh
                # instance-attribute entity); guards must see the new version.
                last_version = version
                continue
            if self._apply_decorator_identities():
                propagate_worklist(
                    self.graph, self.values, sorted(self.dirty), self.max_iters
                )
                continue
            frozen = {n: frozenset(v) for n, v in self.values.items()}
            for node in self.graph.nodes:
                frozen.setdefault(node, frozenset())
            return ResolutionResult(
                self.graph, frozen, hierarchy, self.diag, self.instance_attrs
            )
        raise FixpointBudgetError(
            f"resolution did not stabilize within {budget} rounds"
        )

    # -- mutation helpers --------------------------------------------------

    def _add_edge(self, producer_node: str, consumer: str) -> None:
        if self.graph.add_edge(producer_node, consumer):
            self.values.setdefault(producer_node, set())
            self.values.setdefault(consumer, set())
            self.dirty.add(producer_node)

    def _add_seed(self, node: str, value: AbstractValue) -> None:
        self.graph.ensure(node)
        if self.graph.add_seed(node, value):
            self.values.setdefault(node, set()).add(value)
            self.dirty.add(node)

    def _flow(self, producer: Producer, consumer: str) -> None:
        self.graph.ensure(consumer)
        for node in producer.nodes:
            self._add_edge(node, consumer)
        for value in producer.values:
            self._add_seed(consumer, value)

    # -- hierarchy ---------------------------------------------------------

    def _build_static_hierarchy(self) -> Hierarchy:
        """Everything that cannot change during solving: module members,
        class-body attributes, method kinds."""
        hierarchy = Hierarchy()
        hierarchy.module_names = set(self.modules)
        for name, tree in self.trees.items():
            scope = tree.module_scope
            hierarchy.module_members[name] = {
                bind_name: binding.entity
                for bind_name, binding in scope.bindings.items()
                if binding.entity is not None
            }
            if scope.entity is not None:
                hierarchy.module_entities[name] = scope.entity

        for qname, record in self.graph.sites.classes.items():
            info = ClassInfo(record.entity)
            scope = self.class_scopes.get(qname)
            if scope is not None:
                info.attrs = {
                    bind_name: binding.entity
                    for bind_name, binding in scope.bindings.items()
                    if binding.entity is not None
                }
            for func in self.graph.sites.funcs.values():
                if func.owner_class == qname:
                    info.method_kinds[func.entity.qualified_name.rsplit(".", 1)[-1]] = (
                        func.method_kind
                    )
            hierarchy.classes[qname] = info
        return hierarchy

    def _refresh_hierarchy(self, hierarchy: Hierarchy) -> None:
        """Re-read base slots and instance attributes; both only grow."""
        bases_total_before = sum(len(i.bases) for i in hierarchy.classes.values())
        for qname, record in self.graph.sites.classes.items():
            info = hierarchy.classes[qname]
            bases: list[EntityRef] = []
            for slot in record.base_slots:
                for value in sorted_values(self.values.get(slot, frozenset())):
                    if isinstance(value, (ClassObj, ExternalSym)):
                        bases.append(value.entity)
            info.bases = bases
        for (cls_qname, attr), entity in self.instance_attrs.items():
            info = hierarchy.classes.get(cls_qname)
            if info is not None and attr not in info.attrs:
                info.attrs[attr] = entity
        if sum(len(i.bases) for i in hierarchy.classes.values()) != bases_total_before:
            hierarchy._mro_cache.clear()
            hierarchy.mro_failures.clear()

    def _hierarchy_version(self, hierarchy: Hierarchy) -> tuple[int, int]:
        total_bases = sum(len(info.bases) for info in hierarchy.classes.values())
        return (total_bases, len(self.instance_attrs))

    # -- derivation --------------------------------------------------------

    def _derive(self, hierarchy: Hierarchy) -> None:
        version = self._hierarchy_version(hierarchy)
        sites = self.graph.sites
        for site_id in sorted(sites.calls):
            site = sites.calls[site_id]
            state = (len(self.values.get(site.callee_node, ())), version)
            if self.site_state.get(site_id) == state:
                continue
            self.site_state[site_id] = state
            self._derive_call(site, hierarchy)
        for site_id in sorted(sites.attrs):
            site = sites.attrs[site_id]
            state = (_producer_size(site.receiver, self.values), version)
            if self.site_state.get(site_id) == state:
                continue
            self.site_state[site_id] = state
            if site.access == "load":
                self._derive_attr_load(site, hierarchy)
            else:
                self._derive_attr_store(site, hierarchy)
        for site_id in sorted(sites.subscripts):
            site = sites.subscripts[site_id]
            state = (_producer_size(site.receiver, self.values),)
            if self.site_state.get(site_id) == state:
                continue
            self.site_state[site_id] = state
            self._derive_subscript(site)
        for index, site in enumerate(sites.excepts):
            if site.alias_node is None:
                continue
            key = f"except:{index}"
            state = (_producer_size(site.producer, self.values),)
            if self.site_state.get(key) == state:
                continue
            self.site_state[key] = state
            for value in sorted_values(producer_values(site.producer, self.values)):
                if isinstance(value, ClassObj):
                    self._add_seed(site.alias_node, InstanceOf(value.entity))

    def _derive_call(self, site: CallSite, hierarchy: Hierarchy) -> None:
        for value in sorted_values(self.values.get(site.callee_node, frozenset())):
            if isinstance(value, FunctionObj):
                self._bind_args(site, value.entity, shift=0)
                self._add_edge(ret_node(value.entity.qualified_name), site.result_node)
            elif isinstance(value, BoundMethodObj):
                info = self.graph.sites.funcs.get(value.func.qualified_name)
                if info is not None and info.params:
                    self._add_seed(var_node(info.qname, info.params[0]), value.receiver)
                self._bind_args(site, value.func, shift=1)
                self._add_edge(ret_node(value.func.qualified_name), site.result_node)
            elif isinstance(value, ClassObj):
                self._add_seed(site.result_node, InstanceOf(value.entity))
                init = hierarchy.init_method(value.entity)
                if init is not None:
                    _, init_entity = init
                    info = self.graph.sites.funcs.get(init_entity.qualified_name)
                    if info is not None and info.params:
                        self._add_seed(
                            var_node(info.qname, info.params[0]), InstanceOf(value.entity)
                        )
                    self._bind_args(site, init_entity, shift=1)

    def _bind_args(self, site: CallSite, func: EntityRef, shift: int) -> None:
        info = self.graph.sites.funcs.get(func.qualified_name)
        if info is None:
            return
        for i, producer in enumerate(site.pos_args):
            index = i + shift
            if index < len(info.params):
                self._flow(producer, var_node(info.qname, info.params[index]))
            elif info.vararg is not None:
                # Element-flow approximation: extras become *args elements.
                self._flow(producer, var_node(info.qname, info.vararg))
        for name, producer in site.kw_args.items():
            if name in info.params or name in info.kwonly:
                self._flow(producer, var_node(info.qname, name))
            elif info.kwarg is not None:
                self._flow(producer, var_node(info.qname, info.kwarg))

    def _derive_attr_load(self, site: AttrSite, hierarchy: Hierarchy) -> None:
        assert site.load_node is not None
        for value in sorted_values(producer_values(site.receiver, self.values)):
            if isinstance(value, (InstanceOf, SuperObj)):
                cls = value.cls
                found = hierarchy.find_attribute(
                    cls, site.attr, skip_first=isinstance(value, SuperObj)
                )
                if found is None:
                    continue
                def_class, entity = found
                if entity.kind is EntityKind.FUNCTION:
                    kind = hierarchy.method_kind(def_class, site.attr)
                    if kind == "static":
                        self._add_seed(site.load_node, FunctionObj(entity))
                    elif kind == "classmethod":
                        self._add_seed(
                            site.load_node, BoundMethodObj(entity, ClassObj(cls))
                        )
                    else:
                        self._add_seed(
                            site.load_node, BoundMethodObj(entity, InstanceOf(cls))
                        )
                else:
                    self._add_edge(
                        attr_slot(def_class.qualified_name, site.attr), site.load_node
                    )
            elif isinstance(value, ClassObj):
                found = hierarchy.find_attribute(value.entity, site.attr)
                if found is None:
                    continue
                def_class, entity = found
                if entity.kind is EntityKind.FUNCTION:
                    kind = hierarchy.method_kind(def_class, site.attr)
                    if kind == "classmethod":
                        self._add_seed(
                            site.load_node, BoundMethodObj(entity, ClassObj(value.entity))
                        )
                    else:
                        self._add_seed(site.load_node, FunctionObj(entity))
                else:
                    self._add_edge(
                        attr_slot(def_class.qualified_name, site.attr), site.load_node
                    )
            elif isinstance(value, ModuleObj):
                self._module_attr_load(value, site)
            elif isinstance(value, ExternalSym):
                name = value.entity.qualified_name
                if name.count(".") < EXTERNAL_DEPTH_LIMIT:
                    self._add_seed(
                        site.load_node, ExternalSym(external_ref(f"{name}.{site.attr}"))
                    )

    def _module_attr_load(self, value: ModuleObj, site: AttrSite) -> None:
        assert site.load_node is not None
        module_name = value.entity.qualified_name
        tree = self.trees.get(module_name)
        if tree is not None and site.attr in tree.module_scope.bindings:
            self._add_edge(var_node(module_name, site.attr), site.load_node)
        submodule = f"{module_name}.{site.attr}"
        if submodule in self.trees:
            entity = self.trees[submodule].module_scope.entity
            if entity is not None:
                self._add_seed(site.load_node, ModuleObj(entity))
        elif any(name.startswith(submodule + ".") for name in self.trees):
            self._add_seed(
                site.load_node,
                ModuleObj(EntityRef(submodule, EntityKind.MODULE, submodule.replace(".", "/"))),
            )

    def _derive_attr_store(self, site: AttrSite, hierarchy: Hierarchy) -> None:
        assert site.value is not None
        for value in sorted_values(producer_values(site.receiver, self.values)):
            if isinstance(value, (InstanceOf, ClassObj)):
                cls = value.cls if isinstance(value, InstanceOf) else value.entity
                slot = attr_slot(cls.qualified_name, site.attr)
                self.graph.ensure(slot)
                self._flow(site.value, slot)
                key = (cls.qualified_name, site.attr)
                if key not in self.instance_attrs:
                    info = hierarchy.classes.get(cls.qualified_name)
                    if info is None or site.attr not in info.attrs:
                        self.instance_attrs[key] = EntityRef(
                            f"{cls.qualified_name}.{site.attr}",
                            EntityKind.ATTRIBUTE,
                            cls.file,
                        )
            elif isinstance(value, ModuleObj):
                module_name = value.entity.qualified_name
                tree = self.trees.get(module_name)
                if tree is not None and site.attr in tree.module_scope.bindings:
                    self._flow(site.value, var_node(module_name, site.attr))

    def _derive_subscript(self, site: SubscriptSite) -> None:
        for value in sorted_values(producer_values(site.receiver, self.values)):
            if not isinstance(value, DictObj):
                continue
            if site.access == "store":
                assert site.value is not None
                slot = self.graph.dict_slot_node(value.site, site.key)
                self._flow(site.value, slot)
                self._link_slot_to_computed_loads(value.site, slot)
            else:
                assert site.load_node is not None
                if site.key is not None:
                    for slot_key in (site.key, None):
                        slot = self.graph.dict_slot_node(value.site, slot_key)
                        self._link_slot_to_computed_loads(value.site, slot)
                        self._add_edge(slot, site.load_node)
                else:
                    # Computed key: subscribe to every slot, present and future.
                    subscribers = self.computed_loads.setdefault(value.site, set())
                    if site.load_node not in subscribers:
                        subscribers.add(site.load_node)
                        for slot in sorted(self.graph.dict_slots.get(value.site, ())):
                            self._add_edge(slot, site.load_node)

    def _link_slot_to_computed_loads(self, dict_site: str, slot: str) -> None:
        for load_node in sorted(self.computed_loads.get(dict_site, ())):
            self._add_edge(slot, load_node)

    def _apply_decorator_identities(self) -> bool:
        """Model still-unresolved decorators as identity so the decorated
        name stays callable; runs only once per decorator site."""
        changed = False
        for record in self.graph.sites.decorators:
            if record.site_id in self.identity_applied:
                continue
            site = self.graph.sites.calls[record.site_id]
            callee_values = self.values.get(site.callee_node, frozenset())
            internal = any(
                isinstance(v, (FunctionObj, ClassObj, BoundMethodObj))
                for v in callee_values
            )
            if internal:
                continue
            self.identity_applied.add(record.site_id)
            self._flow(record.fallback, record.result_node)
            changed = True
        return changed


# -- post-fixpoint edge resolution -------------------------------------------


def resolve_call(
    site: CallSite,
    values: dict[str, ValueSet],
    hierarchy: Hierarchy,
    higher_order: dict[str, tuple[int | str, ...]] | None = None,
) -> set[tuple[EntityRef, EdgeKind]]:
    """Edge targets for one call site given the final fixpoint values.

    Unknown callees produce nothing: silence is sound, fabrication is not.
    """
    table = higher_order if higher_order is not None else DEFAULT_HIGHER_ORDER
    out: set[tuple[EntityRef, EdgeKind]] = set()
    for value in values.get(site.callee_node, frozenset()):
        if isinstance(value, FunctionObj):
            out.add((value.entity, EdgeKind.CALL))
        elif isinstance(value, BoundMethodObj):
            out.add((value.func, EdgeKind.CALL))
        elif isinstance(value, ClassObj):
            out.add((value.entity, EdgeKind.INSTANTIATE))
            init = hierarchy.init_method(value.entity)
            if init is not None:
                out.add((init[1], EdgeKind.CALL))
        elif isinstance(value, ExternalSym):
            out.add((value.entity, EdgeKind.CALL))
            spec = table.get(value.entity.qualified_name)
            if spec:
                out |= _higher_order_targets(site, spec, values)
    return out


def _higher_order_targets(
    site: CallSite,
    spec: tuple[int | str, ...],
    values: dict[str, ValueSet],
) -> set[tuple[EntityRef, EdgeKind]]:
    out: set[tuple[EntityRef, EdgeKind]] = set()
    for position in spec:
        if isinstance(position, int):
            if position >= len(site.pos_args):
                continue
            producer = site.pos_args[position]
        else:
            if position not in site.kw_args:
                continue
            producer = site.kw_args[position]
        for value in producer_values(producer, values):
            if isinstance(value, FunctionObj):
                out.add((value.entity, EdgeKind.CALL))
            elif isinstance(value, BoundMethodObj):
                out.add((value.func, EdgeKind.CALL))
    return out


def resolve_attribute(
    site: AttrSite,
    values: dict[str, ValueSet],
    hierarchy: Hierarchy,
) -> set[EntityRef]:
    """Defining entities an attribute access refers to (empty when unknown)."""
    out: set[EntityRef] = set()
    for value in producer_values(site.receiver, values):
        if isinstance(value, (InstanceOf, SuperObj)):
            found = hierarchy.find_attribute(
                value.cls, site.attr, skip_first=isinstance(value, SuperObj)
            )
            if found is not None:
                out.add(found[1])
        elif isinstance(value, ClassObj):
            found = hierarchy.find_attribute(value.entity, site.attr)
            if found is not None:
                out.add(found[1])
        elif isinstance(value, ModuleObj):
            module_name = value.entity.qualified_name
            member = hierarchy.module_member(module_name, site.attr)
            if member is not None:
                out.add(member)
            else:
                submodule = f"{module_name}.{site.attr}"
                if submodule in hierarchy.module_entities:
                    out.add(hierarchy.module_entities[submodule])
        elif isinstance(value, ExternalSym):
            name = value.entity.qualified_name
            if name.count(".") < EXTERNAL_DEPTH_LIMIT:
                out.add(external_ref(f"{name}.{site.attr}"))
    return out
