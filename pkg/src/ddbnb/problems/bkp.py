"""Bounded knapsack: maximize value under a weight budget, each item
available in a limited quantity. State = remaining capacity."""

from __future__ import annotations

from ..model import Problem, Relaxation, Sense
from .io import BkpInstance


class BoundedKnapsack(Problem):
    objective_sense = Sense.MAXIMIZE

    def __init__(self, inst: BkpInstance):
        self.inst = inst
        self.values = inst.values
        self.weights = inst.weights
        self.quantities = inst.quantities
        suffix = [0] * (inst.n + 1)
        for j in range(inst.n - 1, -1, -1):
            suffix[j] = suffix[j + 1] + inst.values[j] * inst.quantities[j]
        # taking every remaining item at full quantity, capacity ignored
        self._suffix_profit = suffix

    @property
    def n_variables(self) -> int:
        return self.inst.n

    def root_state(self):
        return self.inst.capacity

    def domain(self, state, var):
        w = self.weights[var]
        top = self.quantities[var] if w == 0 else min(self.quantities[var], state // w)
        return range(top + 1)

    def transition(self, state, var, decision):
        return state - decision * self.weights[var]

    def transition_value(self, state, var, decision):
        return decision * self.values[var]

    def rough_bound(self, state, var):
        return self._suffix_profit[var]


class BkpRelaxation(Relaxation):
    """Keep the largest remaining capacity; every packing stays feasible."""

    def merge(self, states):
        return max(states)


def build(inst: BkpInstance):
    return BoundedKnapsack(inst), BkpRelaxation()
