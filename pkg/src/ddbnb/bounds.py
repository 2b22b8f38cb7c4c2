"""Completion bounds derived from a compiled relaxed diagram."""

from __future__ import annotations

from .model import INF, NEG_INF
from .diagram import Diagram, Node


def compute_local_bounds(dd: Diagram) -> None:
    """Annotate every node with the best completion value inside the diagram.

    ``locb(u)`` is the longest u->terminal path. Nodes with no surviving path
    to the terminal (pruned, or all descendants pruned) keep ``-inf`` and stay
    unmarked; their completions are not represented in this diagram.
    """
    if dd.terminal is None:
        return
    dd.terminal.locb = 0
    dd.terminal.marked = True
    for node in dd.iter_nodes_bottom_up():
        if not node.marked:
            continue
        base = node.locb
        for parent, _, value in node.arcs:
            cand = base + value
            if cand > parent.locb:
                parent.locb = cand
            parent.marked = True


def combined_bound(node: Node, best_known) -> float:
    """Tightest sound completion bound for a cutset node.

    The rough bound alone decides nodes it can already close; otherwise the
    diagram-local bound sharpens it.
    """
    if node.value_top + node.rub <= best_known:
        return node.rub
    return min(node.rub, node.locb)
