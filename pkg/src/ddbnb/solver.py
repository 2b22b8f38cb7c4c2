"""Branch-and-bound driver alternating restricted and relaxed diagrams."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .model import INF, NEG_INF, Problem, Relaxation, Sense, to_maximization
from .diagram import (FRONTIER, RELAXED, RESTRICTED, CompileTimeout, Diagram,
                      compile_diagram, extract_cutset)
from .bounds import combined_bound, compute_local_bounds
from .cache import ExpansionCache, compute_thresholds

OPTIMAL = "optimal"
TIME_LIMIT = "time_limit"


@dataclass
class SolverConfig:
    width_factor: int = 1
    width_policy: str = "fixed"  # "fixed" or "dynamic"
    #: explicit width override: a constant or a depth->width callable
    width: Union[int, Callable[[int], int], None] = None
    cutset: str = FRONTIER  # "frontier" or "lel"
    use_cache: bool = True
    cache_gc: bool = True
    use_rough_bound: bool = True
    time_limit: Optional[float] = None
    #: keep references to the first restricted/relaxed diagram (for dumps)
    capture_first_dd: bool = False
    #: test hook called as on_pop(pop_count, cache) right after each pop
    on_pop: Optional[Callable[[int, Optional[ExpansionCache]], None]] = None


@dataclass
class SolveStats:
    pops: int = 0
    dd_nodes_expanded: int = 0
    restricted_compiled: int = 0
    relaxed_compiled: int = 0
    rub_prunes: int = 0
    cache_compile_hits: int = 0
    cache_fringe_skips: int = 0
    bound_skips: int = 0
    width_escalations: int = 0
    fringe_peak: int = 0
    cache_inserts: int = 0
    cache_entries_peak: int = 0
    cache_entries_final: int = 0
    cache_gc_removed: int = 0
    wall_ms: int = 0
    #: (dd_nodes_expanded when found, reported objective) per incumbent update
    incumbent_trace: list = field(default_factory=list)


@dataclass
class SolveResult:
    status: str
    objective: Union[int, float, None]
    bound: Union[int, float, None]
    gap_pct: float
    assignment: Optional[list[int]]
    stats: SolveStats
    first_restricted: Optional[Diagram] = None
    first_relaxed: Optional[Diagram] = None

    def to_dict(self) -> dict:
        s = self.stats
        return {
            "status": self.status,
            "objective": self.objective,
            "bound": self.bound,
            "gap_pct": self.gap_pct,
            "assignment": self.assignment,
            "pops": s.pops,
            "dd_nodes_expanded": s.dd_nodes_expanded,
            "fringe_peak": s.fringe_peak,
            "cache_entries_peak": s.cache_entries_peak,
            "cache_inserts": s.cache_inserts,
            "cache_compile_hits": s.cache_compile_hits,
            "cache_fringe_skips": s.cache_fringe_skips,
            "cache_gc_removed": s.cache_gc_removed,
            "incumbent_trace": list(s.incumbent_trace),
            "wall_ms": s.wall_ms,
        }


class _Fringe:
    """Max-priority queue on value+bound with lazy deletion.

    Ties prefer deeper nodes, then insertion order. One live entry per
    (depth, state); a push only supersedes when it strictly improves the value.
    """

    def __init__(self):
        self._heap: list = []
        self._live: dict = {}  # (depth, state) -> (seq, value, ub)
        self._seq = 0
        self._depth_counts: dict[int, int] = {}
        self.peak = 0

    def __len__(self) -> int:
        return len(self._live)

    def push(self, depth, state, value, ub, path) -> bool:
        key = (depth, state)
        cur = self._live.get(key)
        if cur is not None and cur[1] >= value:
            return False
        if cur is None:
            self._depth_counts[depth] = self._depth_counts.get(depth, 0) + 1
        self._seq += 1
        self._live[key] = (self._seq, value, ub)
        heapq.heappush(self._heap, (-(value + ub), -depth, self._seq, state, path))
        if len(self._live) > self.peak:
            self.peak = len(self._live)
        return True

    def pop(self):
        while self._heap:
            _, neg_depth, seq, state, path = heapq.heappop(self._heap)
            depth = -neg_depth
            key = (depth, state)
            cur = self._live.get(key)
            if cur is None or cur[0] != seq:
                continue  # superseded by a better push
            del self._live[key]
            left = self._depth_counts[depth] - 1
            if left:
                self._depth_counts[depth] = left
            else:
                del self._depth_counts[depth]
            return depth, state, cur[1], cur[2], path
        return None

    def min_depth(self) -> Optional[int]:
        return min(self._depth_counts) if self._depth_counts else None

    def best_bound(self):
        if not self._live:
            return NEG_INF
        return max(value + ub for _, value, ub in self._live.values())


def _path_to_list(path) -> list[int]:
    out = []
    while path is not None:
        path, decision = path
        out.append(decision)
    out.reverse()
    return out


def _make_width(config: SolverConfig, n: int) -> Callable[[int], int]:
    if config.width is not None:
        if callable(config.width):
            return config.width
        w = max(1, int(config.width))
        return lambda depth: w
    alpha = config.width_factor
    if config.width_policy == "dynamic":
        return lambda depth: max(1, n * (depth + 1) * alpha)
    fixed = max(1, n * alpha)
    return lambda depth: fixed


def _replay(work: Problem, decisions: list[int], claimed) -> None:
    """Verify a claimed incumbent by replaying it through the model."""
    if len(decisions) != work.n_variables:
        raise AssertionError("incumbent has wrong length")
    state = work.root_state()
    value = work.root_value()
    for var, decision in enumerate(decisions):
        if all(decision != d for d in work.domain(state, var)):
            raise AssertionError(f"incumbent decision x{var}={decision} infeasible")
        value += work.transition_value(state, var, decision)
        state = work.transition(state, var, decision)
    if value != claimed:
        raise AssertionError(f"incumbent replays to {value}, claimed {claimed}")


def solve(problem: Problem, relaxation: Relaxation,
          config: Optional[SolverConfig] = None) -> SolveResult:
    """Solve ``problem`` to proven optimality (or until the time limit)."""
    config = config or SolverConfig()
    sense = problem.objective_sense
    denom = problem.value_denominator
    work = to_maximization(problem)
    n = work.n_variables
    width_fn = _make_width(config, n)
    stats = SolveStats()
    cache = ExpansionCache(n) if config.use_cache else None
    start = time.monotonic()
    deadline = start + config.time_limit if config.time_limit is not None else None

    def report(v):
        if v == NEG_INF or v == INF:
            return None
        x = -v if sense is Sense.MINIMIZE else v
        if denom != 1:
            x = x // denom if x % denom == 0 else x / denom
        return x

    best_value = NEG_INF
    best_assignment: Optional[list[int]] = None
    status = OPTIMAL
    first_restricted: Optional[Diagram] = None
    first_relaxed: Optional[Diagram] = None

    def accept(prefix_path, suffix: list[int], claimed) -> None:
        nonlocal best_value, best_assignment
        decisions = _path_to_list(prefix_path) + suffix
        _replay(work, decisions, claimed)
        best_value = claimed
        best_assignment = decisions
        stats.incumbent_trace.append((stats.dd_nodes_expanded, report(claimed)))

    fringe = _Fringe()
    fringe.push(0, work.root_state(), work.root_value(), INF, None)

    while True:
        if deadline is not None and time.monotonic() > deadline:
            status = TIME_LIMIT
            break
        popped = fringe.pop()
        if popped is None:
            break
        depth, state, value, ub, path = popped
        stats.pops += 1
        if config.on_pop is not None:
            config.on_pop(stats.pops, cache)
        if cache is not None and config.cache_gc:
            fringe_min = fringe.min_depth()
            first_active = depth if fringe_min is None else min(depth, fringe_min)
            cache.drop_below(first_active)
        if value + ub <= best_value:
            stats.bound_skips += 1
            continue
        if cache is not None and cache.fringe_skip(depth, state, value):
            stats.cache_fringe_skips += 1
            continue

        try:
            restricted = compile_diagram(
                work, relaxation, state, depth, value,
                mode=RESTRICTED, width=width_fn, best_known=best_value,
                cache=cache, use_rough_bound=config.use_rough_bound,
                stats=stats, deadline=deadline)
            stats.restricted_compiled += 1
            if first_restricted is None and config.capture_first_dd:
                first_restricted = restricted
            if restricted.best_value() > best_value:
                suffix, _ = restricted.best_path()
                accept(path, suffix, restricted.best_value())
            if restricted.is_exact:
                continue  # the restricted diagram covered this subproblem fully

            frozen_lb = best_value
            relaxed, cutset, write_limit = _compile_relaxed_with_cutset(
                work, relaxation, state, depth, value, width_fn, frozen_lb,
                cache, config, stats, deadline)
        except CompileTimeout:
            fringe.push(depth, state, value, ub, path)
            status = TIME_LIMIT
            break
        stats.relaxed_compiled += 1
        if first_relaxed is None and config.capture_first_dd:
            first_relaxed = relaxed
        compute_local_bounds(relaxed)
        if cache is not None:
            compute_thresholds(relaxed, cache, frozen_lb, write_limit)
        for node in cutset:
            node_ub = combined_bound(node, frozen_lb)
            if node.value_top + node_ub > frozen_lb:
                sub_path = path
                for decision in relaxed.path_suffix_to(node):
                    sub_path = (sub_path, decision)
                fringe.push(node.depth, node.state, node.value_top, node_ub,
                            sub_path)
        if relaxed.best_value() > best_value:
            suffix, all_exact = relaxed.best_path()
            if all_exact:
                # the relaxed diagram's longest path is a genuine solution
                accept(path, suffix, relaxed.best_value())

    stats.fringe_peak = fringe.peak
    if cache is not None:
        stats.cache_inserts = cache.inserts
        stats.cache_entries_peak = cache.peak_size
        stats.cache_entries_final = cache.size
        stats.cache_gc_removed = cache.gc_removed
    stats.wall_ms = int((time.monotonic() - start) * 1000)

    if status == OPTIMAL:
        bound_internal = best_value
        gap = 0.0
    else:
        bound_internal = max(fringe.best_bound(), best_value)
        gap = _gap_pct(best_value, bound_internal)

    return SolveResult(
        status=status,
        objective=report(best_value),
        bound=report(bound_internal),
        gap_pct=gap,
        assignment=best_assignment,
        stats=stats,
        first_restricted=first_restricted,
        first_relaxed=first_relaxed,
    )


def _compile_relaxed_with_cutset(work, relaxation, state, depth, value,
                                 width_fn, frozen_lb, cache, config, stats,
                                 deadline):
    """Compile the relaxed diagram, widening it whenever the cutset degrades
    to the diagram root (re-enqueueing the root would make no progress)."""
    current_width = width_fn
    while True:
        relaxed = compile_diagram(
            work, relaxation, state, depth, value,
            mode=RELAXED, width=current_width, best_known=frozen_lb,
            cache=cache, use_rough_bound=config.use_rough_bound,
            stats=stats, deadline=deadline)
        cutset, write_limit = extract_cutset(relaxed, config.cutset)
        if not any(node is relaxed.root for node in cutset):
            return relaxed, cutset, write_limit
        stats.width_escalations += 1
        prev = current_width
        current_width = lambda d, _prev=prev: _prev(d) * 2


def _gap_pct(best_value, bound) -> float:
    if best_value == NEG_INF or bound == INF or bound == NEG_INF:
        return 100.0
    if bound == 0:
        return 0.0 if best_value == 0 else 100.0
    return (bound - best_value) / abs(bound) * 100.0
