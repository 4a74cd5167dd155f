"""Least-fixpoint propagation of value sets along flow edges.

Plain monotone set-union propagation: a value reaches a node exactly when
some seeded node carrying it can reach that node along flow edges.  The
result is the unique least fixpoint, so neither the worklist discipline nor
the node visitation order can change the outcome.
"""

from __future__ import annotations

from collections import deque
from typing import TYPE_CHECKING, Iterable

from ..errors import FixpointBudgetError
from .values import AbstractValue, ValueSet

if TYPE_CHECKING:  # pragma: no cover
    from .assignment import AssignmentGraph


def propagate_fixpoint(
    graph: "AssignmentGraph", max_iters: int = 1000
) -> dict[str, ValueSet]:
    """Propagate seeds to a least fixpoint; maps every node to its ValueSet.

    ``max_iters`` scales the processing budget (``max_iters * |nodes|`` node
    visits).  Monotone propagation converges well inside that, so exceeding
    it raises FixpointBudgetError: an implementation bug, not a property of
    the input.
    """
    if max_iters < 1:
        raise ValueError("max_iters must be positive")
    values: dict[str, set[AbstractValue]] = {
        node: set(graph.seeds.get(node, ())) for node in graph.nodes
    }
    seeded = sorted(node for node, vals in values.items() if vals)
    propagate_worklist(graph, values, seeded, max_iters)
    return {node: frozenset(vals) for node, vals in values.items()}


def propagate_worklist(
    graph: "AssignmentGraph",
    values: dict[str, set[AbstractValue]],
    dirty: Iterable[str],
    max_iters: int = 1000,
) -> None:
    """Flush the value sets of ``dirty`` nodes through the flow edges,
    updating ``values`` in place to the least fixpoint of the current graph."""
    worklist = deque(dirty)
    queued = set(worklist)
    budget = max_iters * max(1, len(graph.nodes))
    visits = 0
    while worklist:
        node = worklist.popleft()
        queued.discard(node)
        visits += 1
        if visits > budget:
            raise FixpointBudgetError(
                f"no convergence within {budget} node visits "
                f"({len(graph.nodes)} nodes, max_iters={max_iters})"
            )
        outgoing = values.get(node)
        if not outgoing:
            continue
        for consumer in graph.edges.get(node, ()):
            target = values.setdefault(consumer, set())
            if outgoing <= target:
                continue
            target |= outgoing
            if consumer not in queued:
                queued.add(consumer)
                worklist.append(consumer)
