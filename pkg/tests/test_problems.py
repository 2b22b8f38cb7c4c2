"""Model semantics per problem family, relaxation validity, bound admissibility."""

import itertools
import random

import pytest

from ddbnb.diagram import RELAXED, compile_diagram
from ddbnb.model import NEG_INF, Sense, to_maximization
from ddbnb.problems import build_model
from ddbnb.problems.io import BkpInstance, PspInstance, TsptwInstance
from ddbnb.solver import SolverConfig, solve
import oracles
from instance_factory import random_bkp, random_psp, random_srflp, random_tsptw

REF = BkpInstance(capacity=15, values=(2, 3, 6, 6, 1), weights=(4, 6, 4, 2, 5),
                  quantities=(1, 1, 2, 2, 1))


def replay(model, decisions):
    """Accumulated objective after walking decisions through a model."""
    state = model.root_state()
    value = model.root_value()
    for var, d in enumerate(decisions):
        assert d in set(model.domain(state, var)), (var, d)
        value += model.transition_value(state, var, d)
        state = model.transition(state, var, d)
    return value


def completion_value(work, relax, state, depth):
    """Best exact completion from a state, in maximization space."""
    dd = compile_diagram(work, relax, state, depth, 0, mode=RELAXED,
                         width=None, use_rough_bound=False)
    return dd.best_value()


# ---------------------------------------------------------------------------
# bounded knapsack


def test_bkp_transition_example():
    prob, _ = build_model("bkp", REF)
    assert prob.transition(15, 0, 1) == 11
    assert prob.transition_value(15, 0, 1) == 2
    assert list(prob.domain(15, 2)) == [0, 1, 2]
    assert list(prob.domain(5, 2)) == [0, 1]  # capacity truncates quantity
    assert list(prob.domain(3, 0)) == [0]


def test_bkp_zero_weight_item_is_unconstrained_by_capacity():
    inst = BkpInstance(capacity=1, values=(5, 1), weights=(0, 1),
                       quantities=(2, 1))
    prob, relax = build_model("bkp", inst)
    assert list(prob.domain(0, 0)) == [0, 1, 2]
    res = solve(prob, relax, SolverConfig())
    assert res.objective == 11


def test_bkp_replay_matches_direct_evaluation():
    rng = random.Random("bkp-replay")
    for seed in range(10):
        inst = random_bkp(seed)
        prob, _ = build_model("bkp", inst)
        for _ in range(20):
            counts = [rng.randint(0, q) for q in inst.quantities]
            expected = oracles.bkp_value(inst, counts)
            if expected is None:
                continue  # overweight vector, outside the model's domains
            assert replay(prob, counts) == expected


# ---------------------------------------------------------------------------
# travelling salesman with time windows

TINY_TSPTW = TsptwInstance(
    distances=(
        (0, 3, 4, 5),
        (3, 0, 2, 4),
        (4, 2, 0, 3),
        (5, 4, 3, 0),
    ),
    windows=((0, 50), (0, 10), (0, 10), (0, 10)),
)


def test_tsptw_every_feasible_permutation_replays_to_oracle_value():
    for seed in range(8):
        inst = random_tsptw(seed, max_customers=5)
        prob, _ = build_model("tsptw", inst)
        for order in itertools.permutations(range(1, inst.n)):
            expected = oracles.tsptw_value(inst, order)
            if expected is None:
                continue
            assert replay(prob, list(order)) == expected, (seed, order)


def test_tsptw_domain_enforces_windows():
    inst = TsptwInstance(
        distances=TINY_TSPTW.distances,
        windows=((0, 50), (0, 2), (0, 10), (0, 10)),
    )
    prob, _ = build_model("tsptw", inst)
    root = prob.root_state()
    # customer 1 closes at 2 < distance 3: unreachable as the first stop
    assert 1 not in set(prob.domain(root, 0))


def test_tsptw_final_leg_respects_horizon():
    inst = TsptwInstance(
        distances=TINY_TSPTW.distances,
        windows=((0, 9), (0, 10), (0, 10), (0, 10)),
    )
    prob, _ = build_model("tsptw", inst)
    # at the last stage only customers able to return by t=9 remain
    state = (1 << 2, 6, 1 << 3, 0)  # at customer 2 at t=6, must still visit 3
    assert list(prob.domain(state, 2)) == []  # 6 + d(2,3)=3 + d(3,0)=5 > 9


def test_tsptw_last_leg_value_includes_depot_return():
    prob, _ = build_model("tsptw", TINY_TSPTW)
    state = (1 << 2, 5, 1 << 3, 0)
    assert prob.transition_value(state, 2, 3) == 3 + 5  # leg 2->3 plus 3->0


def test_tsptw_merged_state_uses_cheapest_location():
    prob, _ = build_model("tsptw", TINY_TSPTW)
    merged_loc = (1 << 1) | (1 << 3)  # could be at customer 1 or 3
    state = (merged_loc, 0, 1 << 2, 0)
    # leg to customer 2: min(d(1,2)=2, d(3,2)=3) = 2
    assert prob.transition_value(state, 1, 2) == 2


def test_tsptw_waiting_at_window_start():
    inst = TsptwInstance(
        distances=TINY_TSPTW.distances,
        windows=((0, 50), (8, 20), (0, 20), (0, 20)),
    )
    prob, _ = build_model("tsptw", inst)
    state = prob.transition(prob.root_state(), 0, 1)
    assert state == (1 << 1, 8, (1 << 2) | (1 << 3), 0)  # waits until t=8


def test_tsptw_infeasible_instance_reports_none():
    inst = TsptwInstance(
        distances=TINY_TSPTW.distances,
        windows=((0, 5), (0, 10), (0, 10), (0, 10)),  # horizon too short
    )
    assert oracles.brute_tsptw(inst) is None
    prob, relax = build_model("tsptw", inst)
    res = solve(prob, relax, SolverConfig())
    assert res.status == "optimal"
    assert res.objective is None


# ---------------------------------------------------------------------------
# pigment sequencing

TINY_PSP = PspInstance(
    changeover=((0, 4), (7, 0)),
    stocking=(3, 5),
    demand=((0, 1), (0, 0), (1, 0)),  # item 1 due period 0, item 0 due period 2
)


def test_psp_due_table():
    prob, _ = build_model("psp", TINY_PSP)
    assert prob.due == ((2,), (0,))
    demand = ((0, 1), (1, 0), (0, 1))
    prob2, _ = build_model("psp", PspInstance(
        changeover=TINY_PSP.changeover, stocking=TINY_PSP.stocking,
        demand=demand))
    assert prob2.due == ((1,), (0, 2))


def test_psp_stage_maps_to_reverse_period():
    prob, _ = build_model("psp", TINY_PSP)
    root = prob.root_state()
    assert root == (-1, (1, 1))
    # stage 0 is period 2; only item 0 is due then, idle also fits
    assert list(prob.domain(root, 0)) == [0, -1]


def test_psp_idle_blocked_when_remaining_fills_every_period():
    demand = ((1, 0), (0, 1), (1, 0))  # three demands, three periods
    inst = PspInstance(changeover=TINY_PSP.changeover,
                       stocking=TINY_PSP.stocking, demand=demand)
    prob, _ = build_model("psp", inst)
    assert -1 not in set(prob.domain(prob.root_state(), 0))


def test_psp_changeover_paid_across_idle_gap():
    prob, _ = build_model("psp", TINY_PSP)
    # periods 2,1,0 produce: item0, idle, item1
    total = replay(prob, [0, -1, 1])
    assert total == TINY_PSP.changeover[1][0]


def test_psp_stocking_cost_for_early_production():
    demand = ((0, 0), (0, 0), (1, 0))  # item 0 due period 2
    inst = PspInstance(changeover=((0, 1), (1, 0)), stocking=(3, 5),
                       demand=demand)
    prob, _ = build_model("psp", inst)
    # stage 2 is period 0: produced two periods before its due date
    assert replay(prob, [-1, -1, 0]) == 6
    assert replay(prob, [-1, 0, -1]) == 3
    assert replay(prob, [0, -1, -1]) == 0  # stage 0 is period 2: just in time


def test_psp_replay_matches_plan_evaluator():
    for seed in range(8):
        inst = random_psp(seed)
        prob, _ = build_model("psp", inst)
        H = inst.n_periods

        found = []

        def walk(state, var, decisions):
            if len(found) >= 40:
                return
            if var == H:
                found.append(list(decisions))
                return
            for d in prob.domain(state, var):
                decisions.append(d)
                walk(prob.transition(state, var, d), var + 1, decisions)
                decisions.pop()

        walk(prob.root_state(), 0, [])
        assert found
        for decisions in found:
            plan = [decisions[H - 1 - p] for p in range(H)]
            expected = oracles.psp_plan_value(inst, plan)
            assert expected is not None, (seed, plan)
            assert replay(prob, decisions) == expected, (seed, plan)


# ---------------------------------------------------------------------------
# single-row facility layout


def test_srflp_every_permutation_replays_to_doubled_direct_cost():
    for seed in range(6):
        inst = random_srflp(seed, max_depts=5)
        prob, _ = build_model("srflp", inst)
        for perm in itertools.permutations(range(inst.n)):
            assert replay(prob, list(perm)) == oracles.srflp_value_doubled(inst, perm)


def test_srflp_reports_halved_objective():
    inst = random_srflp(2)
    prob, relax = build_model("srflp", inst)
    res = solve(prob, relax, SolverConfig())
    doubled = oracles.brute_srflp_doubled(inst)
    assert res.objective == (doubled // 2 if doubled % 2 == 0 else doubled / 2)


def test_srflp_halved_report_is_exact_for_odd_doubles():
    # two departments with odd traffic*lengths force a half-integral objective
    from ddbnb.problems.io import SrflpInstance
    inst = SrflpInstance(lengths=(1, 2), traffic=((0, 1), (1, 0)))
    prob, relax = build_model("srflp", inst)
    res = solve(prob, relax, SolverConfig())
    assert res.objective == 1.5  # traffic * (L0 + L1) / 2 = 3/2


def test_srflp_oracle_incremental_matches_direct_formula():
    for seed in range(6):
        inst = random_srflp(seed, max_depts=5)
        best = min(oracles.srflp_value_doubled(inst, p)
                   for p in itertools.permutations(range(inst.n)))
        assert oracles.brute_srflp_doubled(inst) == best


# ---------------------------------------------------------------------------
# relaxation validity and bound admissibility (shared properties)

FAMILIES = [
    ("bkp", lambda s: random_bkp(s, max_items=6)),
    ("tsptw", lambda s: random_tsptw(s, max_customers=5)),
    ("psp", random_psp),
    ("srflp", lambda s: random_srflp(s, max_depts=5)),
]


def sample_layer_states(work, relax, rng):
    """States grouped by depth from an exact compile, for property checks."""
    dd = compile_diagram(work, relax, work.root_state(), 0, work.root_value(),
                         mode=RELAXED, width=None, use_rough_bound=False)
    layers = []
    for i, layer in enumerate(dd.layers):
        if i == 0 or not layer:
            continue
        states = [n.state for n in layer]
        rng.shuffle(states)
        layers.append((i, states[:4]))
    return layers


@pytest.mark.parametrize("family,gen", FAMILIES)
def test_merged_states_cover_their_members(family, gen):
    rng = random.Random(f"merge-{family}")
    for seed in range(5):
        prob, relax = build_model(family, gen(seed))
        work = to_maximization(prob)
        for depth, states in sample_layer_states(work, relax, rng):
            if len(states) < 2:
                continue
            merged = relax.merge(states)
            merged_completion = completion_value(work, relax, merged, depth)
            for s in states:
                member = completion_value(work, relax, s, depth)
                assert merged_completion >= member, (family, seed, depth, s)


@pytest.mark.parametrize("family,gen", FAMILIES)
def test_rough_bound_is_admissible(family, gen):
    rng = random.Random(f"rub-{family}")
    for seed in range(5):
        prob, relax = build_model(family, gen(seed))
        work = to_maximization(prob)
        for depth, states in sample_layer_states(work, relax, rng):
            for s in states:
                rub = work.rough_bound(s, depth)
                exact = completion_value(work, relax, s, depth)
                assert rub >= exact, (family, seed, depth, s)
                if rub == NEG_INF:
                    # -inf certifies infeasibility, it must never lie
                    assert exact == NEG_INF, (family, seed, depth, s)
