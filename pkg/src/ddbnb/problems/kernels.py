"""Numeric kernels behind the bundled models' bound computations.

Each kernel exists twice: a loop formulation compiled with numba's ``@njit``
and a vectorized pure-numpy fallback. The active implementation is picked at
import time: numba when importable, unless ``DDBNB_NUMBA=0`` forces the numpy
path. ``backends()`` exposes every available implementation so tests and the
benchmark can compare them.

All kernels take plain numpy arrays (models convert their bitset states to
boolean membership arrays) and return python-friendly int64 scalars. A return
value of -1 from the TSPTW kernel means "no feasible completion".
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via DDBNB_NUMBA=0 instead
    njit = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and os.environ.get("DDBNB_NUMBA", "1") != "0"

_HUGE = np.int64(np.iinfo(np.int64).max // 4)


# ---------------------------------------------------------------------------
# loop formulations (numba-compatible)
# ---------------------------------------------------------------------------

def _tsptw_bound_loops(in_must, in_maybe, need, now, cheapest_in, latest,
                       return_leg, horizon):
    n = cheapest_in.shape[0]
    total = 0
    n_cand = 0
    cand = np.empty(n, np.int64)
    for i in range(n):
        reachable = now + cheapest_in[i] <= latest[i]
        if in_must[i]:
            if not reachable:
                return -1
            total += cheapest_in[i]
        elif in_maybe[i] and reachable:
            cand[n_cand] = cheapest_in[i]
            n_cand += 1
    if n_cand < need:
        return -1
    if need > 0:
        picked = np.sort(cand[:n_cand])
        for k in range(need):
            total += picked[k]
    total += return_leg
    if now + total > horizon:
        return -1
    return total


def _psp_stock_bound_loops(remaining, p_max, due_flat, due_start, stock):
    n = remaining.shape[0]
    total = 0
    for i in range(n):
        r = remaining[i]
        if r == 0:
            continue
        slot = p_max
        base = due_start[i]
        for k in range(r - 1, -1, -1):
            d = due_flat[base + k]
            if d < slot:
                slot = d
            total += stock[i] * (d - slot)
            slot -= 1
    return total


def _prim_mst_loops(weights, active):
    n = weights.shape[0]
    first = -1
    count = 0
    for i in range(n):
        if active[i]:
            count += 1
            if first < 0:
                first = i
    if count <= 1:
        return 0
    dist = np.empty(n, np.int64)
    done = np.zeros(n, np.bool_)
    for i in range(n):
        dist[i] = weights[first, i] if active[i] else _HUGE
    done[first] = True
    dist[first] = _HUGE
    total = 0
    for _ in range(count - 1):
        best = -1
        best_d = _HUGE
        for i in range(n):
            if active[i] and not done[i] and dist[i] < best_d:
                best_d = dist[i]
                best = i
        total += best_d
        done[best] = True
        dist[best] = _HUGE
        for i in range(n):
            if active[i] and not done[i] and weights[best, i] < dist[i]:
                dist[i] = weights[best, i]
    return total


def _srflp_place_cost_loops(cuts, in_m, in_p, dept, k):
    n = cuts.shape[0]
    total = 0
    n_cand = 0
    cand = np.empty(n, np.int64)
    for i in range(n):
        if i == dept:
            continue
        if in_m[i]:
            total += cuts[i]
        elif in_p[i]:
            cand[n_cand] = cuts[i]
            n_cand += 1
    if k > 0:
        picked = np.sort(cand[:n_cand])
        for t in range(k):
            total += picked[t]
    return total


def _srflp_completion_bound_loops(cuts, in_m, in_p, lengths, traffic, p_need):
    n = cuts.shape[0]
    n_m = 0
    n_p = 0
    for i in range(n):
        if in_m[i]:
            n_m += 1
        elif in_p[i]:
            n_p += 1
    m = n_m + p_need
    if m <= 1:
        return 0

    p_cuts = np.empty(n_p, np.int64)
    p_lens = np.empty(n_p, np.int64)
    j = 0
    for i in range(n):
        if in_p[i] and not in_m[i]:
            p_cuts[j] = cuts[i]
            p_lens[j] = lengths[i]
            j += 1
    p_cuts = np.sort(p_cuts)
    p_lens = np.sort(p_lens)

    # ordering bound: schedule (cut, length) pairs by decreasing cut density;
    # optional departments contribute their smallest cuts paired with their
    # shortest lengths in opposite order
    pair_c = np.empty(m, np.int64)
    pair_l = np.empty(m, np.int64)
    j = 0
    for i in range(n):
        if in_m[i]:
            pair_c[j] = cuts[i]
            pair_l[j] = lengths[i]
            j += 1
    for t in range(p_need):
        pair_c[j] = p_cuts[p_need - 1 - t]
        pair_l[j] = p_lens[t]
        j += 1
    ratio = np.empty(m, np.float64)
    for i in range(m):
        ratio[i] = -(pair_c[i] / pair_l[i])
    order = np.argsort(ratio)
    lb_cut = 0
    acc_len = 0
    for t in range(m):
        i = order[t]
        lb_cut += pair_c[i] * acc_len
        acc_len += pair_l[i]

    # edge bound: pair the smallest traffics with the fewest separating lengths
    m_idx = np.empty(n_m, np.int64)
    j = 0
    for i in range(n):
        if in_m[i]:
            m_idx[j] = i
            j += 1
    p_idx = np.empty(n_p, np.int64)
    j = 0
    for i in range(n):
        if in_p[i] and not in_m[i]:
            p_idx[j] = i
            j += 1

    pool = np.empty(m * (m - 1) // 2, np.int64)
    pos = 0
    for a in range(n_m):
        for b in range(a + 1, n_m):
            pool[pos] = traffic[m_idx[a], m_idx[b]]
            pos += 1
    if p_need > 0:
        mp = np.empty(n_m * n_p, np.int64)
        j = 0
        for a in range(n_m):
            for b in range(n_p):
                mp[j] = traffic[m_idx[a], p_idx[b]]
                j += 1
        mp = np.sort(mp)
        for t in range(n_m * p_need):
            pool[pos] = mp[t]
            pos += 1
        pp = np.empty(n_p * (n_p - 1) // 2, np.int64)
        j = 0
        for a in range(n_p):
            for b in range(a + 1, n_p):
                pp[j] = traffic[p_idx[a], p_idx[b]]
                j += 1
        pp = np.sort(pp)
        for t in range(p_need * (p_need - 1) // 2):
            pool[pos] = pp[t]
            pos += 1
    pool = np.sort(pool)

    lv = np.empty(m, np.int64)
    for t in range(n_m):
        lv[t] = lengths[m_idx[t]]
    for t in range(p_need):
        lv[n_m + t] = p_lens[t]
    lv = np.sort(lv)
    lpre = np.empty(m + 1, np.int64)
    lpre[0] = 0
    for t in range(m):
        lpre[t + 1] = lpre[t] + lv[t]

    lb_edge = 0
    pos = 0
    for k in range(1, m):
        gsum = 0
        for t in range(k):
            gsum += pool[pos + t]
        pos += k
        lb_edge += gsum * lpre[m - 1 - k]
    return lb_cut + lb_edge


# ---------------------------------------------------------------------------
# vectorized numpy fallbacks
# ---------------------------------------------------------------------------

def _tsptw_bound_numpy(in_must, in_maybe, need, now, cheapest_in, latest,
                       return_leg, horizon):
    reachable = now + cheapest_in <= latest
    if np.any(in_must & ~reachable):
        return -1
    total = int(cheapest_in[in_must].sum())
    cand = cheapest_in[in_maybe & reachable]
    if cand.size < need:
        return -1
    if need > 0:
        total += int(np.partition(cand, need - 1)[:need].sum())
    total += int(return_leg)
    if now + total > horizon:
        return -1
    return total


def _psp_stock_bound_numpy(remaining, p_max, due_flat, due_start, stock):
    total = 0
    n = remaining.shape[0]
    for i in range(n):
        r = int(remaining[i])
        if r == 0:
            continue
        dues = due_flat[due_start[i]: due_start[i] + r]
        # latest free production slot per demand: slot_j = j + min(cap, min_{j'>=j}(due_j' - j'))
        shifted = dues - np.arange(r, dtype=np.int64)
        run_min = np.minimum.accumulate(shifted[::-1])[::-1]
        slots = np.arange(r, dtype=np.int64) + np.minimum(run_min, p_max - r + 1)
        total += int(stock[i]) * int((dues - slots).sum())
    return total


def _prim_mst_numpy(weights, active):
    idx = np.flatnonzero(active)
    if idx.size <= 1:
        return 0
    sub = weights[np.ix_(idx, idx)]
    k = idx.size
    done = np.zeros(k, bool)
    done[0] = True
    dist = sub[0].copy()
    dist[0] = _HUGE
    total = 0
    for _ in range(k - 1):
        masked = np.where(done, _HUGE, dist)
        j = int(masked.argmin())
        total += int(masked[j])
        done[j] = True
        dist = np.where(done, _HUGE, np.minimum(dist, sub[j]))
    return total


def _srflp_place_cost_numpy(cuts, in_m, in_p, dept, k):
    keep = np.arange(cuts.shape[0]) != dept
    total = int(cuts[in_m & keep].sum())
    if k > 0:
        cand = cuts[in_p & ~in_m & keep]
        total += int(np.partition(cand, k - 1)[:k].sum())
    return total


def _srflp_completion_bound_numpy(cuts, in_m, in_p, lengths, traffic, p_need):
    p_only = in_p & ~in_m
    n_m = int(in_m.sum())
    n_p = int(p_only.sum())
    m = n_m + p_need
    if m <= 1:
        return 0
    p_cuts = np.sort(cuts[p_only])
    p_lens = np.sort(lengths[p_only])

    pair_c = np.concatenate([cuts[in_m], p_cuts[:p_need][::-1]])
    pair_l = np.concatenate([lengths[in_m], p_lens[:p_need]])
    order = np.argsort(-(pair_c / pair_l))
    c_sorted = pair_c[order]
    l_sorted = pair_l[order]
    acc = np.concatenate([[0], np.cumsum(l_sorted)[:-1]])
    lb_cut = int((c_sorted * acc).sum())

    m_idx = np.flatnonzero(in_m)
    p_idx = np.flatnonzero(p_only)
    parts = []
    if n_m > 1:
        mm = traffic[np.ix_(m_idx, m_idx)]
        parts.append(mm[np.triu_indices(n_m, 1)])
    if p_need > 0:
        if n_m > 0:
            mp = np.sort(traffic[np.ix_(m_idx, p_idx)].ravel())
            parts.append(mp[: n_m * p_need])
        if n_p > 1:
            pp_all = traffic[np.ix_(p_idx, p_idx)][np.triu_indices(n_p, 1)]
            parts.append(np.sort(pp_all)[: p_need * (p_need - 1) // 2])
    pool = np.sort(np.concatenate(parts)) if parts else np.empty(0, np.int64)

    lv = np.sort(np.concatenate([lengths[m_idx], p_lens[:p_need]]))
    lpre = np.concatenate([[0], np.cumsum(lv)])
    lb_edge = 0
    pos = 0
    for k in range(1, m):
        lb_edge += int(pool[pos: pos + k].sum()) * int(lpre[m - 1 - k])
        pos += k
    return lb_cut + lb_edge


_LOOP_KERNELS = {
    "tsptw_completion_bound": _tsptw_bound_loops,
    "psp_stock_bound": _psp_stock_bound_loops,
    "prim_mst": _prim_mst_loops,
    "srflp_place_cost": _srflp_place_cost_loops,
    "srflp_completion_bound": _srflp_completion_bound_loops,
}

_NUMPY_KERNELS = {
    "tsptw_completion_bound": _tsptw_bound_numpy,
    "psp_stock_bound": _psp_stock_bound_numpy,
    "prim_mst": _prim_mst_numpy,
    "srflp_place_cost": _srflp_place_cost_numpy,
    "srflp_completion_bound": _srflp_completion_bound_numpy,
}

_JITTED = (
    {name: njit(cache=True)(fn) for name, fn in _LOOP_KERNELS.items()}
    if HAVE_NUMBA
    else None
)

_ACTIVE = _JITTED if USE_NUMBA else _NUMPY_KERNELS

ACTIVE_BACKEND = "numba" if USE_NUMBA else "numpy"


def backends() -> dict[str, dict]:
    """Every importable backend, keyed by name."""
    out = {"numpy": _NUMPY_KERNELS}
    if _JITTED is not None:
        out["numba"] = _JITTED
    return out


tsptw_completion_bound = _ACTIVE["tsptw_completion_bound"]
psp_stock_bound = _ACTIVE["psp_stock_bound"]
prim_mst = _ACTIVE["prim_mst"]
srflp_place_cost = _ACTIVE["srflp_place_cost"]
srflp_completion_bound = _ACTIVE["srflp_completion_bound"]
