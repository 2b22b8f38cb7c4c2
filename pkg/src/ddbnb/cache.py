"""Expansion-threshold cache shared across branch-and-bound iterations.

The cache maps ``(depth, state)`` to a threshold ``theta`` plus an
``expanded`` flag. Any later path reaching that state with accumulated value
below ``theta`` is provably useless: either a better prefix already exists in
the open fringe, or every completion from there was shown to stay at or under
the incumbent. A path arriving exactly at ``theta`` is also useless when the
stored entry says the state was already expanded at that value.
"""

from __future__ import annotations

from typing import Hashable, Iterator, Optional

from .model import INF, NEG_INF
from .diagram import Diagram

State = Hashable


class ExpansionCache:
    """Per-depth hash maps of state -> (theta, expanded)."""

    def __init__(self, n_variables: int):
        self._by_depth: list[dict[State, tuple[float, bool]]] = [
            {} for _ in range(n_variables + 1)
        ]
        self._floor = 0  # depths below this were garbage collected
        self.size = 0
        self.peak_size = 0
        self.inserts = 0
        self.gc_removed = 0

    def __len__(self) -> int:
        return self.size

    def lookup(self, depth: int, state: State) -> Optional[tuple[float, bool]]:
        return self._by_depth[depth].get(state)

    def items(self) -> Iterator[tuple[int, State, float, bool]]:
        """Yield (depth, state, theta, expanded) for every stored entry."""
        for depth, bucket in enumerate(self._by_depth):
            for state, (theta, expanded) in bucket.items():
                yield depth, state, theta, expanded

    def prune_threshold(self, depth: int, state: State, value) -> Optional[float]:
        """Threshold justifying a compile-time prune of this node, or None."""
        entry = self._by_depth[depth].get(state)
        if entry is not None and value <= entry[0]:
            return entry[0]
        return None

    def fringe_skip(self, depth: int, state: State, value) -> bool:
        """True when a popped subproblem is already covered and must be dropped."""
        entry = self._by_depth[depth].get(state)
        if entry is None:
            return False
        theta, expanded = entry
        return value < theta or (value == theta and expanded)

    def put(self, depth: int, state: State, theta, expanded: bool) -> None:
        bucket = self._by_depth[depth]
        if state not in bucket:
            self.size += 1
            if self.size > self.peak_size:
                self.peak_size = self.size
        bucket[state] = (theta, expanded)
        self.inserts += 1

    def drop_below(self, depth: int) -> int:
        """Remove every entry shallower than ``depth``; returns removal count."""
        removed = 0
        for d in range(self._floor, min(depth, len(self._by_depth))):
            removed += len(self._by_depth[d])
            self._by_depth[d].clear()
        if depth > self._floor:
            self._floor = depth
        self.size -= removed
        self.gc_removed += removed
        return removed

    def evict(self, fraction: float, rng) -> int:
        """Randomly drop a fraction of entries (stress hook; always safe)."""
        keys = [(d, s) for d, bucket in enumerate(self._by_depth) for s in bucket]
        k = int(len(keys) * fraction)
        for d, s in rng.sample(keys, k):
            del self._by_depth[d][s]
        self.size -= k
        return k


def compute_thresholds(dd: Diagram, cache: Optional[ExpansionCache],
                       best_known, write_depth_limit: int) -> None:
    """Bottom-up threshold pass over a relaxed diagram.

    Every node's ``theta`` becomes the largest prefix value for which the
    subtree below it is still known to be useless, given the incumbent value
    the diagram was compiled against. Exact nodes at or above
    ``write_depth_limit`` are persisted to the cache; cutset members are
    stored with ``expanded=False`` since they sit in the fringe unexplored.
    """
    terminal = dd.terminal
    if terminal is not None and not terminal.in_cutset:
        _, genuine = dd.best_path()
        if genuine:
            # that path's value becomes (or is already beaten by) the
            # incumbent, so prefixes reaching the terminal at or under it
            # are dominated; without this seed, exact chains into the
            # terminal would propagate an unsound +inf threshold
            terminal.theta = terminal.value_top

    for node in dd.iter_nodes_bottom_up():
        if node.cache_pruned:
            node.theta = node.recycled_theta
        elif node.rub_pruned:
            # -inf certifies the state infeasible for any prefix
            node.theta = INF if node.rub == NEG_INF else best_known - node.rub
        elif node.in_cutset:
            if node.value_top + node.locb <= best_known:
                # local bound filtered this node out of the fringe
                if node.locb != NEG_INF:
                    cand = best_known - node.locb
                    if cand < node.theta:
                        node.theta = cand
            else:
                node.theta = node.value_top
        if (cache is not None and node.exact and not node.cache_pruned
                and node.depth <= write_depth_limit):
            # a cache-pruned node keeps its stored entry: this compile did not
            # expand it, so it may not flip the entry's expanded flag (the
            # fringe subproblem that wrote it may still be pending)
            cache.put(node.depth, node.state, node.theta,
                      expanded=not node.in_cutset)
        theta = node.theta
        if theta != INF:
            for parent, _, value in node.arcs:
                cand = theta - value
                if cand < parent.theta:
                    parent.theta = cand
