"""Pigment sequencing: single machine, one item per period, unit demands
with deadlines, minimizing changeover plus stocking costs.

Time runs backwards: variable k fixes period H-1-k, so the machine item of
the chronologically *next* period is already known. State = (machine item or
-1, per-item count of still-unserved demands). The r-th remaining demand of
an item is served by its r-th remaining production, so producing item i in
period p serves i's latest unserved demand and stocks it for (due - p)
periods.
"""

from __future__ import annotations

import numpy as np

from ..model import INF, Problem, Relaxation, Sense
from . import kernels
from .io import PspInstance


class PigmentSequencing(Problem):
    objective_sense = Sense.MINIMIZE

    def __init__(self, inst: PspInstance):
        self.inst = inst
        n = inst.n_items
        self.n_items = n
        self.horizon = inst.n_periods
        self.changeover = inst.changeover
        self.stocking = inst.stocking
        # due[i] = ascending demand periods of item i
        self.due = tuple(
            tuple(p for p in range(self.horizon) if inst.demand[p][i])
            for i in range(n)
        )
        self._due_flat = np.asarray(
            [p for dues in self.due for p in dues] or [0], dtype=np.int64
        )
        starts, offset = [], 0
        for dues in self.due:
            starts.append(offset)
            offset += len(dues)
        self._due_start = np.asarray(starts, dtype=np.int64)
        self._stock_arr = np.asarray(inst.stocking, dtype=np.int64)
        # item switching graph for the completion bound, cheapest direction
        self._sym_change = np.asarray(
            [
                [min(inst.changeover[i][j], inst.changeover[j][i]) for j in range(n)]
                for i in range(n)
            ],
            dtype=np.int64,
        )
        self._mst_memo: dict[int, int] = {}

    @property
    def n_variables(self) -> int:
        return self.horizon

    def root_state(self):
        return (-1, tuple(len(d) for d in self.due))

    def domain(self, state, var):
        period = self.horizon - 1 - var
        _, remaining = state
        for item in range(self.n_items):
            r = remaining[item]
            if r > 0 and period <= self.due[item][r - 1]:
                yield item
        if sum(remaining) < period + 1:
            yield -1  # idle, only when the earlier periods can still fit demand

    def transition(self, state, var, decision):
        machine, remaining = state
        if decision == -1:
            return state
        rem = list(remaining)
        rem[decision] -= 1
        return (decision, tuple(rem))

    def transition_value(self, state, var, decision):
        if decision == -1:
            return 0
        machine, remaining = state
        period = self.horizon - 1 - var
        due = self.due[decision][remaining[decision] - 1]
        cost = self.stocking[decision] * (due - period)
        if machine >= 0:
            cost += self.changeover[decision][machine]
        return cost

    def _mst(self, remaining) -> int:
        mask = 0
        for i, r in enumerate(remaining):
            if r > 0:
                mask |= 1 << i
        hit = self._mst_memo.get(mask)
        if hit is None:
            active = np.fromiter(
                ((mask >> i) & 1 for i in range(self.n_items)),
                np.bool_, count=self.n_items)
            hit = int(kernels.prim_mst(self._sym_change, active))
            self._mst_memo[mask] = hit
        return hit

    def rough_bound(self, state, var):
        _, remaining = state
        p_max = self.horizon - 1 - var
        if sum(remaining) > p_max + 1:
            return INF
        rem_arr = np.fromiter(remaining, np.int64, count=self.n_items)
        stock = int(kernels.psp_stock_bound(
            rem_arr, p_max, self._due_flat, self._due_start, self._stock_arr))
        return stock + self._mst(remaining)


class PspRelaxation(Relaxation):
    def merge(self, states):
        n = len(states[0][1])
        merged = tuple(min(s[1][i] for s in states) for i in range(n))
        return (-1, merged)


def build(inst: PspInstance):
    return PigmentSequencing(inst), PspRelaxation()
