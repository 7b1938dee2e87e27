"""Hot numerical kernels: numba-jitted loops with a pure-NumPy fallback.

Two kernels dominate runtime: statevector gate application (inside every
objective training loop) and the exact transportation simplex (inside every
circuit-distance evaluation during acquisition search).  Both are compiled
with numba by default; set ``QNAS_NO_NUMBA=1`` to run the plain NumPy/Python
implementations instead.  ``benchmarks/bench_backends.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("QNAS_NO_NUMBA", "0").strip().lower() not in ("1", "true", "yes")

if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        numba = None
        USE_NUMBA = False
else:
    numba = None

_threads = os.environ.get("QNAS_THREADS")
if USE_NUMBA and _threads:
    numba.set_num_threads(max(1, int(_threads)))


# ---------------------------------------------------------------------------
# statevector kernels (in-place on a 1-D complex state)
# ---------------------------------------------------------------------------

def _apply_1q_impl(state, u00, u01, u10, u11, stride):
    dim = state.shape[0]
    step = 2 * stride
    for base in range(0, dim, step):
        for off in range(stride):
            i0 = base + off
            i1 = i0 + stride
            a0 = state[i0]
            a1 = state[i1]
            state[i0] = u00 * a0 + u01 * a1
            state[i1] = u10 * a0 + u11 * a1


def _apply_2q_impl(state, u, mask_hi, mask_lo):
    dim = state.shape[0]
    for i in range(dim):
        if (i & mask_hi) == 0 and (i & mask_lo) == 0:
            i01 = i | mask_lo
            i10 = i | mask_hi
            i11 = i10 | mask_lo
            a0 = state[i]
            a1 = state[i01]
            a2 = state[i10]
            a3 = state[i11]
            state[i] = u[0, 0] * a0 + u[0, 1] * a1 + u[0, 2] * a2 + u[0, 3] * a3
            state[i01] = u[1, 0] * a0 + u[1, 1] * a1 + u[1, 2] * a2 + u[1, 3] * a3
            state[i10] = u[2, 0] * a0 + u[2, 1] * a1 + u[2, 2] * a2 + u[2, 3] * a3
            state[i11] = u[3, 0] * a0 + u[3, 1] * a1 + u[3, 2] * a2 + u[3, 3] * a3


def _apply_1q_numpy(state, u00, u01, u10, u11, stride):
    dim = state.shape[0]
    v = state.reshape(dim // (2 * stride), 2, stride)
    a0 = v[:, 0, :].copy()
    a1 = v[:, 1, :]
    v[:, 0, :] = u00 * a0 + u01 * a1
    v[:, 1, :] = u10 * a0 + u11 * a1


def _apply_2q_numpy(state, u, mask_hi, mask_lo):
    dim = state.shape[0]
    idx = np.arange(dim)
    base = idx[(idx & mask_hi) == 0]
    base = base[(base & mask_lo) == 0]
    rows = np.stack([base, base | mask_lo, base | mask_hi, base | mask_hi | mask_lo])
    state[rows] = u @ state[rows]


# ---------------------------------------------------------------------------
# exact transportation simplex (u-v method, Bland pivoting)
# ---------------------------------------------------------------------------

def _transport_simplex_impl(cost, supply, demand, max_iter):
    """Solve min <Z, cost> s.t. Z >= 0, Z 1 = supply, Z^T 1 = demand.

    Supplies and demands must balance.  Returns (flow, status) with status 0
    on optimality and 1 if the iteration cap was hit.
    """
    m = supply.shape[0]
    n = demand.shape[0]
    flow = np.zeros((m, n))
    basic = np.zeros((m, n), np.uint8)

    # Northwest-corner initial basis: a staircase of exactly m + n - 1 cells.
    a = supply.copy()
    b = demand.copy()
    i = 0
    j = 0
    while True:
        t = a[i] if a[i] < b[j] else b[j]
        flow[i, j] = t
        basic[i, j] = 1
        a[i] -= t
        b[j] -= t
        if i == m - 1 and j == n - 1:
            break
        if a[i] <= 0.0 and i < m - 1:
            i += 1
        elif j < n - 1:
            j += 1
        else:
            i += 1

    u = np.zeros(m)
    v = np.zeros(n)
    u_set = np.zeros(m, np.uint8)
    v_set = np.zeros(n, np.uint8)
    parent = np.zeros(m + n, np.int64)
    seen = np.zeros(m + n, np.uint8)
    queue = np.zeros(m + n, np.int64)
    # Node path buffer for cycle extraction (alternates row, col, row, ...).
    path = np.zeros(m + n + 2, np.int64)
    eps = 1e-9

    for _ in range(max_iter):
        # Duals from the basis tree, rooted at row 0.
        u_set[:] = 0
        v_set[:] = 0
        u[0] = 0.0
        u_set[0] = 1
        remaining = m + n - 1
        while remaining > 0:
            progressed = False
            for r in range(m):
                for c in range(n):
                    if basic[r, c] == 1:
                        if u_set[r] == 1 and v_set[c] == 0:
                            v[c] = cost[r, c] - u[r]
                            v_set[c] = 1
                            remaining -= 1
                            progressed = True
                        elif v_set[c] == 1 and u_set[r] == 0:
                            u[r] = cost[r, c] - v[c]
                            u_set[r] = 1
                            remaining -= 1
                            progressed = True
            if not progressed:
                # Disconnected basis cannot happen with a staircase start and
                # pivots that keep a spanning tree; bail out defensively.
                return flow, 1

        # Bland entering rule: first cell (row-major) with negative reduced cost.
        ei = -1
        ej = -1
        for r in range(m):
            for c in range(n):
                if basic[r, c] == 0 and cost[r, c] - u[r] - v[c] < -eps:
                    ei = r
                    ej = c
                    break
            if ei >= 0:
                break
        if ei < 0:
            return flow, 0

        # Unique tree path from row node ei to column node (m + ej).
        seen[:] = 0
        head = 0
        tail = 0
        queue[tail] = ei
        tail += 1
        seen[ei] = 1
        parent[ei] = -1
        target = m + ej
        while head < tail:
            node = queue[head]
            head += 1
            if node == target:
                break
            if node < m:
                for c in range(n):
                    if basic[node, c] == 1 and seen[m + c] == 0:
                        seen[m + c] = 1
                        parent[m + c] = node
                        queue[tail] = m + c
                        tail += 1
            else:
                r0 = node - m
                for r in range(m):
                    if basic[r, r0] == 1 and seen[r] == 0:
                        seen[r] = 1
                        parent[r] = node
                        queue[tail] = r
                        tail += 1
        # Path nodes from target back to ei.
        plen = 0
        node = target
        while node != -1:
            path[plen] = node
            plen += 1
            node = parent[node]
        # Cycle cells: entering (ei, ej) gets +, then alternate along the path.
        # path[plen-1] == ei, path[0] == m+ej; walk from ei towards m+ej.
        theta = np.inf
        li = m
        lj = n
        sign = -1
        for p in range(plen - 1, 0, -1):
            n1 = path[p]
            n2 = path[p - 1]
            if n1 < m:
                r, c = n1, n2 - m
            else:
                r, c = n2, n1 - m
            if sign < 0:
                f = flow[r, c]
                if f < theta - 1e-15 or (f < theta + 1e-15 and r * n + c < li * n + lj):
                    theta = f
                    li = r
                    lj = c
            sign = -sign
        # Pivot.
        sign = -1
        flow[ei, ej] += theta
        for p in range(plen - 1, 0, -1):
            n1 = path[p]
            n2 = path[p - 1]
            if n1 < m:
                r, c = n1, n2 - m
            else:
                r, c = n2, n1 - m
            flow[r, c] += sign * theta
            sign = -sign
        basic[ei, ej] = 1
        basic[li, lj] = 0
        flow[li, lj] = 0.0

    return flow, 1


if USE_NUMBA:
    apply_1q = numba.njit(cache=True)(_apply_1q_impl)
    apply_2q = numba.njit(cache=True)(_apply_2q_impl)
    transport_simplex = numba.njit(cache=True)(_transport_simplex_impl)
else:
    apply_1q = _apply_1q_numpy
    apply_2q = _apply_2q_numpy
    transport_simplex = _transport_simplex_impl


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
