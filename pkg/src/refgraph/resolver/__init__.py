"""Flow-insensitive reference resolution over an assignment graph."""

from .assignment import AssignmentGraph, CallSite, build_assignment_graph
from .fixpoint import propagate_fixpoint
from .mro import Hierarchy, c3_linearize
from .resolution import ResolutionResult, resolve_attribute, resolve_call, solve
from .values import (
    UNKNOWN,
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
)

__all__ = [
    "AbstractValue",
    "AssignmentGraph",
    "BoundMethodObj",
    "CallSite",
    "ClassObj",
    "DictObj",
    "ExternalSym",
    "FunctionObj",
    "Hierarchy",
    "InstanceOf",
    "ModuleObj",
    "ResolutionResult",
    "SuperObj",
    "UNKNOWN",
    "ValueSet",
    "build_assignment_graph",
    "c3_linearize",
    "propagate_fixpoint",
    "resolve_attribute",
    "resolve_call",
    "solve",
]
