"""The abstract value domain propagated over the assignment graph.

Values form a finite universe per project: functions, classes, instances,
modules, dict allocation sites, bound methods, external symbols (capped in
dotted depth so attribute chains cannot grow without bound), and a single
Unknown that marks genuinely unresolvable producers and never yields edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..model import EntityRef

# External attribute chains like a.b.c.d... stop growing past this depth.
EXTERNAL_DEPTH_LIMIT = 8


@dataclass(frozen=True)
class FunctionObj:
    entity: EntityRef


@dataclass(frozen=True)
class ClassObj:
    entity: EntityRef


@dataclass(frozen=True)
class InstanceOf:
    cls: EntityRef


@dataclass(frozen=True)
class ModuleObj:
    entity: EntityRef


@dataclass(frozen=True)
class ExternalSym:
    entity: EntityRef


@dataclass(frozen=True)
class SuperObj:
    """Proxy produced by a zero-argument super() call inside a method of cls."""

    cls: EntityRef


@dataclass(frozen=True)
class DictObj:
    """A dict allocation site; its slots live in the assignment graph."""

    site: str


@dataclass(frozen=True)
class BoundMethodObj:
    """A method looked up on an instance or class: carries the receiver."""

    func: EntityRef
    receiver: "AbstractValue"


class _Unknown:
    __slots__ = ()
    _instance: "_Unknown | None" = None

    def __new__(cls) -> "_Unknown":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNKNOWN"


UNKNOWN = _Unknown()

AbstractValue = Union[
    FunctionObj,
    ClassObj,
    InstanceOf,
    ModuleObj,
    ExternalSym,
    SuperObj,
    DictObj,
    BoundMethodObj,
    _Unknown,
]

ValueSet = frozenset


def value_sort_key(value: AbstractValue) -> tuple[str, str]:
    """Stable ordering for deterministic iteration over value sets."""
    if isinstance(value, FunctionObj):
        return ("function", value.entity.qualified_name)
    if isinstance(value, ClassObj):
        return ("class", value.entity.qualified_name)
    if isinstance(value, InstanceOf):
        return ("instance", value.cls.qualified_name)
    if isinstance(value, ModuleObj):
        return ("module", value.entity.qualified_name)
    if isinstance(value, ExternalSym):
        return ("external", value.entity.qualified_name)
    if isinstance(value, SuperObj):
        return ("super", value.cls.qualified_name)
    if isinstance(value, DictObj):
        return ("dict", value.site)
    if isinstance(value, BoundMethodObj):
        return ("bound", value.func.qualified_name + "@" + value_sort_key(value.receiver)[1])
    return ("unknown", "")


def sorted_values(values) -> list[AbstractValue]:
    return sorted(values, key=value_sort_key)
