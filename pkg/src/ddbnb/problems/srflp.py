"""Single-row facility layout: order departments on a line minimizing
traffic-weighted centroid distances.

All values are kept doubled so they stay integral (the constant part
sum C_ij*(L_i+L_j)/2 may be half-integral); results are reported halved via
``value_denominator``. State = (must-place set, may-place set, cut vector)
where cut[i] is the accumulated traffic from placed departments into i.
"""

from __future__ import annotations

import numpy as np

from ..model import Problem, Relaxation, Sense
from . import kernels
from .io import SrflpInstance


class Srflp(Problem):
    objective_sense = Sense.MINIMIZE
    value_denominator = 2

    def __init__(self, inst: SrflpInstance):
        self.inst = inst
        n = inst.n
        self.n = n
        self.lengths = inst.lengths
        self.traffic = inst.traffic
        self._lengths_arr = np.asarray(inst.lengths, dtype=np.int64)
        self._traffic_arr = np.asarray(inst.traffic, dtype=np.int64)
        self._root_value = sum(
            inst.traffic[i][j] * (inst.lengths[i] + inst.lengths[j])
            for i in range(n) for j in range(i + 1, n)
        )

    @property
    def n_variables(self) -> int:
        return self.n

    def root_state(self):
        return ((1 << self.n) - 1, 0, (0,) * self.n)

    def root_value(self) -> int:
        return self._root_value

    def domain(self, state, var):
        must, maybe, _ = state
        allow_maybe = must.bit_count() < self.n - var
        for dept in range(self.n):
            bit = 1 << dept
            if must & bit or (allow_maybe and maybe & bit):
                yield dept

    def transition(self, state, var, decision):
        must, maybe, cuts = state
        bit = 1 << decision
        must2 = must & ~bit
        maybe2 = maybe & ~bit
        alive = must2 | maybe2
        row = self.traffic[decision]
        cuts2 = tuple(
            cuts[i] + row[i] if (alive >> i) & 1 else 0 for i in range(self.n)
        )
        return (must2, maybe2, cuts2)

    def _mask_bools(self, mask: int) -> np.ndarray:
        return np.fromiter(((mask >> i) & 1 for i in range(self.n)),
                           np.bool_, count=self.n)

    def transition_value(self, state, var, decision):
        must, maybe, cuts = state
        n_must = must.bit_count()
        if (must >> decision) & 1:
            k = self.n - var - n_must
        else:
            k = self.n - var - 1 - n_must
        base = kernels.srflp_place_cost(
            np.asarray(cuts, dtype=np.int64), self._mask_bools(must),
            self._mask_bools(maybe), decision, k)
        return 2 * self.lengths[decision] * int(base)

    def rough_bound(self, state, var):
        must, maybe, cuts = state
        p_need = (self.n - var) - must.bit_count()
        bound = kernels.srflp_completion_bound(
            np.asarray(cuts, dtype=np.int64), self._mask_bools(must),
            self._mask_bools(maybe), self._lengths_arr, self._traffic_arr,
            p_need)
        return 2 * int(bound)


class SrflpRelaxation(Relaxation):
    def merge(self, states):
        n = len(states[0][2])
        must = ~0
        seen = 0
        for s_must, s_maybe, _ in states:
            must &= s_must
            seen |= s_must | s_maybe
        cuts = []
        for i in range(n):
            vals = [s[2][i] for s in states if ((s[0] | s[1]) >> i) & 1]
            cuts.append(min(vals) if vals else 0)
        return (must, seen & ~must, tuple(cuts))


def build(inst: SrflpInstance):
    return Srflp(inst), SrflpRelaxation()
