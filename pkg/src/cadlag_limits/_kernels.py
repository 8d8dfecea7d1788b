"""Compiled kernels for polyline matching under the max-norm in (t, z).

Both kernels take polylines as float arrays of shape (m, 2) holding
(time, value) vertices of scalar completed graphs.
"""

import numpy as np
from numba import njit

# interval slack; keeps exact corner contacts from being lost to rounding
_SLACK = 1e-12


@njit(cache=True, inline="always")
def _coord_interval(p, a, b, eps, lo, hi):
    d = b - a
    r = p - a
    if d == 0.0:
        if abs(r) > eps:
            return 2.0, -1.0
        return lo, hi
    l = (r - eps) / d
    h = (r + eps) / d
    if d < 0.0:
        l, h = h, l
    if l > lo:
        lo = l
    if h < hi:
        hi = h
    return lo, hi


@njit(cache=True)
def _free_interval(pt, pz, at, az, bt, bz, eps, eps_t):
    """Parameters s in [0, 1] with |p - (a + s (b - a))| <= (eps_t, eps) in (time, value)."""
    lo, hi = _coord_interval(pt, at, bt, eps_t, 0.0, 1.0)
    if lo > hi:
        return 2.0, -1.0
    lo, hi = _coord_interval(pz, az, bz, eps, lo, hi)
    if lo > hi + 2 * _SLACK:
        return 2.0, -1.0
    lo = max(0.0, lo - _SLACK)
    hi = min(1.0, hi + _SLACK)
    if lo > hi:
        return 2.0, -1.0
    return lo, hi


@njit(cache=True)
def frechet_decide(P, Q, eps, eps_t, budget=0):
    """Is there a monotone matching of polylines P and Q with time gaps <= eps_t
    and value gaps <= eps?  With eps_t = eps this decides Frechet distance <= eps.

    Free-space reachability (Alt and Godau) processed row by row; each row
    only visits the columns that the previous row could reach, so the cost
    is proportional to the width of the reachable corridor.

    Returns 1 (yes), 0 (no), or -1 when more than ``budget`` cells would be
    visited (``budget <= 0`` means no limit).
    """
    N = P.shape[0] - 1
    M = Q.shape[0] - 1
    if abs(P[0, 0] - Q[0, 0]) > eps_t or abs(P[0, 1] - Q[0, 1]) > eps:
        return 0
    if abs(P[N, 0] - Q[M, 0]) > eps_t or abs(P[N, 1] - Q[M, 1]) > eps:
        return 0
    visited = 0

    prev_lo = np.empty(M)
    prev_hi = np.empty(M)
    cur_lo = np.empty(M)
    cur_hi = np.empty(M)
    # column range of the previous row holding valid outputs
    p_first, p_last = 0, 0
    prev_lo[0], prev_hi[0] = 0.0, 0.0

    for i in range(N):
        c_first, c_last = -1, -1
        r_lo, r_hi = 2.0, -1.0
        j = p_first
        while j < M:
            if j > p_last and r_lo > r_hi:
                break
            if j <= p_last:
                s_lo, s_hi = prev_lo[j], prev_hi[j]
            else:
                s_lo, s_hi = 2.0, -1.0
            b_lo, b_hi = r_lo, r_hi
            s_open = s_lo <= s_hi
            b_open = b_lo <= b_hi

            # boundary s = 1: point P[i+1] against segment Q_j, as t-interval
            f_lo, f_hi = _free_interval(
                P[i + 1, 0], P[i + 1, 1], Q[j, 0], Q[j, 1], Q[j + 1, 0], Q[j + 1, 1], eps, eps_t
            )
            if b_open:
                u_lo, u_hi = f_lo, f_hi
            elif s_open:
                u_lo, u_hi = max(f_lo, s_lo), f_hi
            else:
                u_lo, u_hi = 2.0, -1.0

            # boundary t = 1: point Q[j+1] against segment P_i, as s-interval
            g_lo, g_hi = _free_interval(
                Q[j + 1, 0], Q[j + 1, 1], P[i, 0], P[i, 1], P[i + 1, 0], P[i + 1, 1], eps, eps_t
            )
            if s_open:
                r_lo, r_hi = g_lo, g_hi
            elif b_open:
                r_lo, r_hi = max(g_lo, b_lo), g_hi
            else:
                r_lo, r_hi = 2.0, -1.0

            if u_lo > u_hi:
                u_lo, u_hi = 2.0, -1.0
            if r_lo > r_hi:
                r_lo, r_hi = 2.0, -1.0
            cur_lo[j], cur_hi[j] = u_lo, u_hi
            if u_lo <= u_hi:
                if c_first < 0:
                    c_first = j
                c_last = j
            if i == N - 1 and j == M - 1:
                ok = (u_lo <= u_hi and u_hi >= 1.0) or (r_lo <= r_hi and r_hi >= 1.0)
                return 1 if ok else 0
            j += 1
        visited += j - p_first
        if budget > 0 and visited > budget:
            return -1
        if c_first < 0:
            return 0
        prev_lo, cur_lo = cur_lo, prev_lo
        prev_hi, cur_hi = cur_hi, prev_hi
        p_first, p_last = c_first, c_last
    return 0


@njit(cache=True)
def frechet_decide_banded(P, Q, eps, budget=0):
    """Frechet distance <= eps, trying narrow time corridors first.

    Shrinking the time tolerance shrinks the free space, so an accept in a
    corridor is an accept overall.  Nearly aligned long paths are then
    certified in time linear in their length instead of length times eps.
    Same return codes as ``frechet_decide``; ``budget`` applies to each pass.
    """
    w = 16.0 * (P[-1, 0] - P[0, 0]) / max(P.shape[0], Q.shape[0])
    while w < eps:
        r = frechet_decide(P, Q, eps, w, budget)
        if r != 0:
            return r
        w *= 4.0
    return frechet_decide(P, Q, eps, eps, budget)


@njit(cache=True)
def discrete_frechet(A, B):
    """Discrete Frechet distance between point sequences under the max-norm.

    Minimum over monotone couplings of the largest matched-pair distance
    (Eiter and Mannila), one row of the table kept at a time.
    """
    n = A.shape[0]
    m = B.shape[0]
    row = np.empty(m)
    new = np.empty(m)
    for j in range(m):
        c = max(abs(A[0, 0] - B[j, 0]), abs(A[0, 1] - B[j, 1]))
        row[j] = c if j == 0 else max(row[j - 1], c)
    for i in range(1, n):
        a0 = A[i, 0]
        a1 = A[i, 1]
        c = max(abs(a0 - B[0, 0]), abs(a1 - B[0, 1]))
        new[0] = max(row[0], c)
        for j in range(1, m):
            c = max(abs(a0 - B[j, 0]), abs(a1 - B[j, 1]))
            best = row[j - 1]
            if row[j] < best:
                best = row[j]
            if new[j - 1] < best:
                best = new[j - 1]
            new[j] = best if best > c else c
        row, new = new, row
    return row[m - 1]


@njit(cache=True)
def sample_polyline(P, m):
    """Sample every segment of P at m equally spaced points, sharing endpoints."""
    S = P.shape[0] - 1
    out = np.empty(((m - 1) * S + 1, P.shape[1]))
    k = 0
    for s in range(S):
        for r in range(m - 1):
            w = r / (m - 1)
            for c in range(P.shape[1]):
                out[k, c] = P[s, c] + w * (P[s + 1, c] - P[s, c])
            k += 1
    for c in range(P.shape[1]):
        out[k, c] = P[S, c]
    return out


@njit(cache=True)
def uniform_gap(x0, tx, vx, y0, ty, vy):
    """sup_t |x(t) - y(t)|_inf for step paths, by merging the jump times."""
    d = x0.shape[0]
    cx = x0.copy()
    cy = y0.copy()
    gap = 0.0
    for k in range(d):
        gap = max(gap, abs(cx[k] - cy[k]))
    i = 0
    j = 0
    nx = tx.shape[0]
    ny = ty.shape[0]
    while i < nx or j < ny:
        if j >= ny or (i < nx and tx[i] < ty[j]):
            cx[:] = vx[i]
            i += 1
        elif i >= nx or ty[j] < tx[i]:
            cy[:] = vy[j]
            j += 1
        else:
            cx[:] = vx[i]
            cy[:] = vy[j]
            i += 1
            j += 1
        for k in range(d):
            gap = max(gap, abs(cx[k] - cy[k]))
    return gap
