"""Traveling salesman with time windows, minimizing travel distance.

Customers are numbered 1..n-1 (0 is the depot). Variable j picks the j-th
customer visited. State = (location set, time, must-visit set, may-visit set)
with the sets as bitmasks; exact states have a single location and an empty
may-visit set, merged states widen all four components.
"""

from __future__ import annotations

import numpy as np

from ..model import INF, Problem, Relaxation, Sense
from . import kernels
from .io import TsptwInstance


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Tsptw(Problem):
    objective_sense = Sense.MINIMIZE

    def __init__(self, inst: TsptwInstance):
        self.inst = inst
        n = inst.n
        self.dist = inst.distances
        self.windows = inst.windows
        self.horizon = inst.horizon
        # cheapest way to arrive anywhere, used by the completion bound
        cheapest_in = [
            min(inst.distances[j][i] for j in range(n) if j != i) if n > 1 else 0
            for i in range(n)
        ]
        self._cheapest_in = np.asarray(cheapest_in, dtype=np.int64)
        self._latest = np.asarray([l for _, l in inst.windows], dtype=np.int64)

    @property
    def n_variables(self) -> int:
        return self.inst.n - 1

    def root_state(self):
        full = (1 << self.inst.n) - 1
        return (1, 0, full & ~1, 0)

    def _min_leg(self, loc_mask: int, customer: int) -> int:
        row = self.dist
        return min(row[i][customer] for i in _bits(loc_mask))

    def domain(self, state, var):
        loc, now, must, maybe = state
        last = var == self.n_variables - 1
        allow_maybe = must.bit_count() < self.n_variables - var
        for c in range(1, self.inst.n):
            bit = 1 << c
            if not (must & bit or (allow_maybe and maybe & bit)):
                continue
            arrival = now + self._min_leg(loc, c)
            if arrival > self.windows[c][1]:
                continue
            if last:
                start = max(arrival, self.windows[c][0])
                if start + self.dist[c][0] > self.horizon:
                    continue
            yield c

    def transition(self, state, var, decision):
        loc, now, must, maybe = state
        bit = 1 << decision
        start = max(now + self._min_leg(loc, decision), self.windows[decision][0])
        return (bit, start, must & ~bit, maybe & ~bit)

    def transition_value(self, state, var, decision):
        loc, now, _, _ = state
        leg = self._min_leg(loc, decision)
        if var == self.n_variables - 1:
            leg += self.dist[decision][0]
        return leg

    def _mask_bools(self, mask: int) -> np.ndarray:
        n = self.inst.n
        return np.fromiter(((mask >> i) & 1 for i in range(n)), np.bool_, count=n)

    def rough_bound(self, state, var):
        loc, now, must, maybe = state
        need = (self.n_variables - var) - must.bit_count()
        if need < 0:
            return INF
        bound = kernels.tsptw_completion_bound(
            self._mask_bools(must), self._mask_bools(maybe), need, now,
            self._cheapest_in, self._latest, int(self._cheapest_in[0]),
            self.horizon)
        return INF if bound < 0 else int(bound)


class TsptwRelaxation(Relaxation):
    def merge(self, states):
        loc = 0
        now = None
        must_all = ~0
        seen = 0
        for s_loc, s_now, s_must, s_maybe in states:
            loc |= s_loc
            now = s_now if now is None else min(now, s_now)
            must_all &= s_must
            seen |= s_must | s_maybe
        return (loc, now, must_all, seen & ~must_all)


def build(inst: TsptwInstance):
    return Tsptw(inst), TsptwRelaxation()
