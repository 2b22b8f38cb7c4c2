"""Decision-diagram compilation: exact, restricted and relaxed passes.

A diagram is compiled layer by layer from a root subproblem. Each layer goes
through the same pipeline:

1. prune nodes the expansion cache already covers (dominated or useless),
2. prune nodes whose rough completion bound cannot beat the incumbent,
3. if the surviving layer is wider than allowed, shrink it: a restricted
   diagram drops the lowest-value nodes, a relaxed diagram merges them into a
   single covering node,
4. expand the survivors.

Pruned nodes stay in the layer (flagged) so the threshold pass can still read
them; they do not count toward the width and are never expanded. All states of
the last layer are merged into a single terminal.
"""

from __future__ import annotations

import time
from typing import Callable, Iterator, Optional

from .model import INF, NEG_INF, Problem, Relaxation, State

RESTRICTED = "restricted"
RELAXED = "relaxed"

FRONTIER = "frontier"
LAST_EXACT_LAYER = "lel"


class CompileTimeout(Exception):
    """A compile pass ran past its deadline."""


class Node:
    """One diagram node: a state at a depth plus the best path into it."""

    __slots__ = (
        "state", "depth", "value_top", "best_arc", "arcs", "exact",
        "cache_pruned", "recycled_theta", "rub_pruned", "rub",
        "in_cutset", "locb", "marked", "theta",
    )

    def __init__(self, state: State, depth: int):
        self.state = state
        self.depth = depth
        self.value_top = NEG_INF
        self.best_arc = None  # (parent, decision, value) of the best inbound arc
        self.arcs = []  # all inbound arcs as (parent, decision, value)
        self.exact = True
        self.cache_pruned = False
        self.recycled_theta = None
        self.rub_pruned = False
        self.rub = INF  # completion bound in maximization space
        self.in_cutset = False
        self.locb = NEG_INF
        self.marked = False
        self.theta = INF

    @property
    def pruned(self) -> bool:
        return self.cache_pruned or self.rub_pruned

    def __repr__(self) -> str:  # debugging aid only
        return f"Node(depth={self.depth}, state={self.state!r}, value={self.value_top})"


class Diagram:
    """A compiled decision diagram rooted at an arbitrary subproblem."""

    def __init__(self, problem: Problem, root: Node, root_depth: int, mode: str):
        self.problem = problem
        self.root = root
        self.root_depth = root_depth
        self.n_vars = problem.n_variables
        self.mode = mode
        self.layers: list[list[Node]] = []  # variable layers, root layer first
        self.terminal: Optional[Node] = None
        self.shrunk = False  # True once any layer was restricted or relaxed

    @property
    def is_exact(self) -> bool:
        """True when no layer was shrunk; prunings do not cost exactness."""
        return not self.shrunk

    def best_value(self):
        return self.terminal.value_top if self.terminal is not None else NEG_INF

    def best_path(self) -> tuple[Optional[list[int]], bool]:
        """Decisions along the maximum-value path and whether they form a
        genuine solution (every node feeding the path is exact)."""
        if self.terminal is None:
            return None, False
        decisions = []
        all_exact = True
        node = self.terminal
        while node.best_arc is not None:
            parent, decision, _ = node.best_arc
            decisions.append(decision)
            if not parent.exact:
                all_exact = False
            node = parent
        decisions.reverse()
        return decisions, all_exact

    def iter_nodes_bottom_up(self) -> Iterator[Node]:
        if self.terminal is not None:
            yield self.terminal
        for layer in reversed(self.layers):
            yield from layer

    def path_suffix_to(self, node: Node) -> list[int]:
        """Decisions from the diagram root down to ``node`` along its best path."""
        decisions = []
        while node.best_arc is not None:
            parent, decision, _ = node.best_arc
            decisions.append(decision)
            node = parent
        decisions.reverse()
        return decisions

    def to_dot(self) -> str:
        """GraphViz rendering; relaxed nodes dashed, pruned nodes grayed."""
        ids: dict[int, str] = {}
        lines = ["digraph dd {", "  rankdir=TB;", "  node [shape=box];"]

        def fmt(x):
            if x == INF:
                return "inf"
            if x == NEG_INF:
                return "-inf"
            return str(x)

        def declare(node: Node, name: str):
            ids[id(node)] = name
            label = f"{node.state!r}\\nv={fmt(node.value_top)}\\ntheta={fmt(node.theta)}"
            attrs = [f'label="{label}"']
            if not node.exact:
                attrs.append("style=dashed")
            if node.pruned:
                attrs.append("color=gray")
            lines.append(f"  {name} [{', '.join(attrs)}];")

        for i, layer in enumerate(self.layers):
            for k, node in enumerate(layer):
                declare(node, f"n{i}_{k}")
        if self.terminal is not None:
            declare(self.terminal, "t")
        for layer in self.layers:
            for node in layer:
                for parent, decision, value in node.arcs:
                    lines.append(
                        f"  {ids[id(parent)]} -> {ids[id(node)]} "
                        f'[label="{decision}:{fmt(value)}"];'
                    )
        if self.terminal is not None:
            for parent, decision, value in self.terminal.arcs:
                lines.append(
                    f"  {ids[id(parent)]} -> t [label=\"{decision}:{fmt(value)}\"];"
                )
        lines.append("}")
        return "\n".join(lines)


def _add_arc(layer: dict, state: State, depth: int, parent: Node,
             decision: int, value: int) -> None:
    node = layer.get(state)
    total = parent.value_top + value
    if node is None:
        node = Node(state, depth)
        node.value_top = total
        node.best_arc = (parent, decision, value)
        node.exact = parent.exact
        layer[state] = node
    else:
        if total > node.value_top:
            node.value_top = total
            node.best_arc = (parent, decision, value)
        if not parent.exact:
            node.exact = False
    node.arcs.append((parent, decision, value))


def _shrink_layer(problem: Problem, relaxation: Optional[Relaxation],
                  layer_dict: dict, live: list[Node], width: int, mode: str,
                  depth: int, best_known, use_rough_bound: bool) -> list[Node]:
    """Reduce ``live`` to at most ``width`` nodes, mutating ``layer_dict``.

    Nodes are ranked by (value, state order); the lowest-ranked ones are
    dropped (restricted) or merged into one covering node (relaxed).
    """
    order = sorted(live, key=lambda nd: (nd.value_top, problem.state_key(nd.state)))
    if mode == RESTRICTED:
        for node in order[: len(live) - width]:
            del layer_dict[node.state]
        return order[len(live) - width:]

    count = len(live) - width + 1
    merged, keep = order[:count], order[count:]
    mstate = relaxation.merge([nd.state for nd in merged])
    mu = Node(mstate, depth)
    mu.exact = False
    for nd in merged:
        del layer_dict[nd.state]
        for parent, decision, value in nd.arcs:
            rv = relaxation.relax_arc_value(value, mstate)
            mu.arcs.append((parent, decision, rv))
            total = parent.value_top + rv
            if total > mu.value_top:
                mu.value_top = total
                mu.best_arc = (parent, decision, rv)

    existing = layer_dict.get(mstate)
    if existing is None:
        layer_dict[mstate] = mu
        if use_rough_bound:
            mu.rub = problem.rough_bound(mstate, depth)
            if mu.value_top + mu.rub <= best_known:
                mu.rub_pruned = True
                return keep
        keep.append(mu)
        return keep

    # The merged state already exists in this layer (it may even be one of the
    # survivors, or a node pruned earlier in this pass). Fuse instead of
    # inserting a duplicate state.
    existing.exact = False
    existing.arcs.extend(mu.arcs)
    if mu.value_top > existing.value_top:
        existing.value_top = mu.value_top
        existing.best_arc = mu.best_arc
        if existing.cache_pruned and existing.value_top > existing.recycled_theta:
            # no longer covered by the cached threshold; re-evaluate
            existing.cache_pruned = False
            existing.recycled_theta = None
            if use_rough_bound:
                existing.rub = problem.rough_bound(existing.state, depth)
                if existing.value_top + existing.rub <= best_known:
                    existing.rub_pruned = True
                else:
                    keep.append(existing)
            else:
                keep.append(existing)
        elif existing.rub_pruned and existing.value_top + existing.rub > best_known:
            existing.rub_pruned = False
            keep.append(existing)
    return keep


def compile_diagram(problem: Problem, relaxation: Optional[Relaxation],
                    root_state: State, root_depth: int, root_value: int, *,
                    mode: str = RELAXED,
                    width: Optional[Callable[[int], int]] = None,
                    best_known=NEG_INF,
                    cache=None,
                    use_rough_bound: bool = True,
                    stats=None,
                    deadline: Optional[float] = None) -> Diagram:
    """Compile a diagram for the subproblem rooted at ``root_state``.

    ``width`` maps a depth to the maximum layer width; ``None`` compiles the
    exact diagram. ``best_known`` is the incumbent value used for bound
    pruning, and ``cache`` (if given) is consulted for already-covered states
    on every layer below the root.
    """
    if mode == RELAXED and width is not None and relaxation is None:
        raise ValueError("relaxed compilation requires a relaxation")
    n = problem.n_variables
    root = Node(root_state, root_depth)
    root.value_top = root_value
    dd = Diagram(problem, root, root_depth, mode)
    current: dict[State, Node] = {root_state: root}

    for depth in range(root_depth, n):
        if deadline is not None and time.monotonic() > deadline:
            raise CompileTimeout()
        live = []
        for node in current.values():
            if cache is not None and depth > root_depth:
                theta = cache.prune_threshold(depth, node.state, node.value_top)
                if theta is not None:
                    node.cache_pruned = True
                    node.recycled_theta = theta
                    if stats is not None:
                        stats.cache_compile_hits += 1
                    continue
            if use_rough_bound:
                node.rub = problem.rough_bound(node.state, depth)
                if node.value_top + node.rub <= best_known:
                    node.rub_pruned = True
                    if stats is not None:
                        stats.rub_prunes += 1
                    continue
            live.append(node)

        max_width = width(depth) if width is not None else None
        if max_width is not None and len(live) > max_width:
            live = _shrink_layer(problem, relaxation, current, live, max_width,
                                 mode, depth, best_known, use_rough_bound)
            dd.shrunk = True

        dd.layers.append(list(current.values()))
        nxt: dict[State, Node] = {}
        for node in live:
            if stats is not None:
                stats.dd_nodes_expanded += 1
            for decision in problem.domain(node.state, depth):
                child = problem.transition(node.state, depth, decision)
                value = problem.transition_value(node.state, depth, decision)
                _add_arc(nxt, child, depth + 1, node, decision, value)
        current = nxt

    candidates = list(current.values())
    if root_depth == n:
        dd.layers.append(candidates)
        dd.terminal = root
    elif len(candidates) == 1:
        dd.terminal = candidates[0]
    elif candidates:
        # several last-layer states: collapse them into one relaxed terminal
        terminal = Node(None, n)
        terminal.exact = False
        for nd in candidates:
            terminal.arcs.extend(nd.arcs)
            if nd.value_top > terminal.value_top:
                terminal.value_top = nd.value_top
                terminal.best_arc = nd.best_arc
        dd.terminal = terminal
    return dd


def extract_cutset(dd: Diagram, policy: str) -> tuple[list[Node], int]:
    """Pick the exact cutset to enqueue and the deepest depth whose thresholds
    may be written back to the cache.

    Returns ``([], n_vars)`` for an exact diagram: nothing needs re-expansion.
    The last-exact-layer policy falls back to the frontier when the only fully
    exact layer is the root layer itself.
    """
    n = dd.n_vars
    if not dd.shrunk:
        return [], n

    if policy == LAST_EXACT_LAYER:
        deepest_depth, deepest_live = dd.root_depth, None
        rows = [(dd.root_depth + i, layer) for i, layer in enumerate(dd.layers)]
        if dd.terminal is not None:
            rows.append((n, [dd.terminal]))
        for depth, layer in rows:
            live = [u for u in layer if not u.pruned]
            if all(u.exact for u in live):
                deepest_depth, deepest_live = depth, live
        if deepest_depth > dd.root_depth:
            for node in deepest_live:
                node.in_cutset = True
            return deepest_live, deepest_depth
        # degenerate: no progress past the root, use the frontier instead

    frontier: set[Node] = set()
    children = dd.layers[1:] + ([[dd.terminal]] if dd.terminal is not None else [])
    for layer in children:
        for node in layer:
            if node.exact:
                continue
            for parent, _, _ in node.arcs:
                if parent.exact:
                    frontier.add(parent)
    ordered = [u for layer in dd.layers for u in layer if u in frontier]
    for node in ordered:
        node.in_cutset = True
    return ordered, n
