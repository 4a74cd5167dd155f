"""C3 linearization and the project-wide class/module lookup tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import CyclicHierarchyError, InconsistentHierarchyError
from ..model import EntityKind, EntityRef


def c3_linearize(
    cls: EntityRef,
    bases: Sequence[EntityRef],
    hierarchy: Mapping[str, Sequence[EntityRef]],
) -> list[EntityRef]:
    """Standard C3 linearization of ``cls`` given its direct bases.

    ``hierarchy`` maps class qualified names to their ordered base lists;
    classes absent from it (external bases) linearize as leaves.  Raises
    InconsistentHierarchyError when no merge exists and CyclicHierarchyError
    on inheritance cycles.
    """
    memo: dict[str, list[EntityRef]] = {}
    in_progress: set[str] = set()

    def linearize(c: EntityRef, c_bases: Sequence[EntityRef]) -> list[EntityRef]:
        key = c.qualified_name
        if key in memo:
            return memo[key]
        if key in in_progress:
            raise CyclicHierarchyError(f"inheritance cycle through {key}")
        in_progress.add(key)
        tails = [linearize(b, hierarchy.get(b.qualified_name, ())) for b in c_bases]
        result = [c] + _merge(c.qualified_name, tails + [list(c_bases)])
        in_progress.discard(key)
        memo[key] = result
        return result

    return linearize(cls, bases)


def _merge(cls_name: str, sequences: list[list[EntityRef]]) -> list[EntityRef]:
    seqs = [list(s) for s in sequences if s]
    result: list[EntityRef] = []
    while True:
        seqs = [s for s in seqs if s]
        if not seqs:
            return result
        candidate = None
        for seq in seqs:
            head = seq[0]
            if any(head in other[1:] for other in seqs):
                continue
            candidate = head
            break
        if candidate is None:
            heads = tuple(sorted({s[0].qualified_name for s in seqs}))
            raise InconsistentHierarchyError(cls_name, heads)
        result.append(candidate)
        for seq in seqs:
            if seq and seq[0] == candidate:
                del seq[0]


@dataclass
class ClassInfo:
    entity: EntityRef
    bases: list[EntityRef] = field(default_factory=list)
    # attribute name -> defining entity (methods, class vars, instance slots)
    attrs: dict[str, EntityRef] = field(default_factory=dict)
    method_kinds: dict[str, str] = field(default_factory=dict)  # plain|static|classmethod


@dataclass
class Hierarchy:
    """Name-lookup context: classes with their MROs plus module members.

    ``resolve_call`` and ``resolve_attribute`` consult this for method
    resolution along the C3 order and for module attribute lookups.
    """

    classes: dict[str, ClassInfo] = field(default_factory=dict)
    module_members: dict[str, dict[str, EntityRef]] = field(default_factory=dict)
    module_names: set[str] = field(default_factory=set)
    module_entities: dict[str, EntityRef] = field(default_factory=dict)
    mro_failures: dict[str, str] = field(default_factory=dict)
    _mro_cache: dict[str, list[EntityRef]] = field(default_factory=dict)

    def class_bases(self) -> dict[str, list[EntityRef]]:
        return {name: info.bases for name, info in self.classes.items()}

    def mro(self, cls: EntityRef) -> list[EntityRef]:
        key = cls.qualified_name
        cached = self._mro_cache.get(key)
        if cached is not None:
            return cached
        info = self.classes.get(key)
        bases = info.bases if info is not None else []
        try:
            order = c3_linearize(cls, bases, self.class_bases())
        except (InconsistentHierarchyError, CyclicHierarchyError) as exc:
            # Extraction should not die on a broken hierarchy: fall back to
            # left-to-right depth-first order and remember why.
            self.mro_failures[key] = str(exc)
            order = self._dfs_order(cls)
        self._mro_cache[key] = order
        return order

    def _dfs_order(self, cls: EntityRef) -> list[EntityRef]:
        seen: set[str] = set()
        order: list[EntityRef] = []

        def walk(c: EntityRef) -> None:
            if c.qualified_name in seen:
                return
            seen.add(c.qualified_name)
            order.append(c)
            info = self.classes.get(c.qualified_name)
            for base in info.bases if info else ():
                walk(base)

        walk(cls)
        return order

    def find_attribute(
        self, cls: EntityRef, name: str, skip_first: bool = False
    ) -> tuple[EntityRef, EntityRef] | None:
        """(defining class, entity) for ``name`` along the MRO, or None."""
        order = self.mro(cls)
        if skip_first:
            order = order[1:]
        for klass in order:
            info = self.classes.get(klass.qualified_name)
            if info is not None and name in info.attrs:
                return klass, info.attrs[name]
        return None

    def method_kind(self, cls: EntityRef, name: str) -> str:
        info = self.classes.get(cls.qualified_name)
        if info is None:
            return "plain"
        return info.method_kinds.get(name, "plain")

    def module_member(self, module: str, name: str) -> EntityRef | None:
        return self.module_members.get(module, {}).get(name)

    def add_instance_attr(self, cls: EntityRef, name: str, entity: EntityRef) -> None:
        info = self.classes.get(cls.qualified_name)
        if info is not None and name not in info.attrs:
            info.attrs[name] = entity

    def init_method(self, cls: EntityRef) -> tuple[EntityRef, EntityRef] | None:
        """Defining (class, entity) of the initializer along the MRO."""
        found = self.find_attribute(cls, "__init__")
        if found is None:
            return None
        _, entity = found
        if entity.kind is not EntityKind.FUNCTION:
            return None
        return found
