"""Random pigment-sequencing instance generator.

Demands are placed one at a time at uniformly random free (period, item)
slots, rejecting (permanently) any slot that would make the instance
infeasible: a prefix of periods 0..t can hold at most t+1 demands. Costs are
scaled by ``rho``: stocking ~ U[rho*5000, rho*15000], changeover ~
U[(1-rho)*5000, (1-rho)*15000] symmetric with a zero diagonal.
"""

from __future__ import annotations

import random

from .io import PspInstance

#: (items, periods, density, rho) grid with 5 replicates each
GRID_ITEMS = (5, 7, 10)
GRID_PERIODS = (50, 100, 150, 200)
GRID_DENSITIES = (0.9, 0.95, 1.0)
GRID_RHOS = (0.001, 0.01, 0.1)
GRID_REPLICATES = 5


def grid_configs():
    combo = 0
    for items in GRID_ITEMS:
        for periods in GRID_PERIODS:
            for density in GRID_DENSITIES:
                for rho in GRID_RHOS:
                    for rep in range(GRID_REPLICATES):
                        yield combo, rep, items, periods, density, rho
                    combo += 1


def derive_seed(base_seed: int, combo: int, replicate: int) -> int:
    return base_seed * 1_000_003 + combo * 101 + replicate


def generate_psp(items: int, periods: int, density: float, rho: float,
                 seed: int) -> PspInstance:
    if not (0 < density <= 1):
        raise ValueError("density must be in (0, 1]")
    if items < 1 or periods < 1:
        raise ValueError("items and periods must be >= 1")
    rng = random.Random(seed)

    stock_lo, stock_hi = round(rho * 5000), round(rho * 15000)
    change_lo, change_hi = round((1 - rho) * 5000), round((1 - rho) * 15000)
    stocking = tuple(rng.randint(stock_lo, stock_hi) for _ in range(items))
    changeover = [[0] * items for _ in range(items)]
    for i in range(items):
        for j in range(i + 1, items):
            c = rng.randint(change_lo, change_hi)
            changeover[i][j] = changeover[j][i] = c

    target = int(density * periods)
    demand = [[0] * items for _ in range(periods)]
    per_period = [0] * periods

    def fits(period: int) -> bool:
        # after adding here, every prefix 0..t must still hold <= t+1 demands
        cum = sum(per_period[: period])
        for t in range(period, periods):
            cum += per_period[t]
            if cum + 1 > t + 1:
                return False
        return True

    pool = [(p, i) for p in range(periods) for i in range(items)]
    placed = 0
    while placed < target:
        if not pool:
            raise RuntimeError("ran out of feasible demand slots")
        p, i = pool.pop(rng.randrange(len(pool)))
        if fits(p):
            demand[p][i] = 1
            per_period[p] += 1
            placed += 1
        # an infeasible slot stays infeasible: demands only accumulate

    return PspInstance(
        changeover=tuple(tuple(row) for row in changeover),
        stocking=stocking,
        demand=tuple(tuple(row) for row in demand),
    )
