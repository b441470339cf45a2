"""Compiled lattice kernels.

A lattice is handled in factored form ``diag(scales) @ frame``: the frame is a
moderate float matrix and all the dynamic range of the Cartan flow lives in
``scales``.  Lattice vectors are always recomputed from their integer
coordinates with a compensated dot product, so cancellation in ``frame @ c``
(the resonant regime) costs no accuracy.
"""

import numpy as np
from numba import njit

_SPLITTER = 134217729.0  # 2**27 + 1
_MAX_COEF = 2.0**52
LLL_DELTA = 0.99
OK, FAIL_REDUCE, FAIL_OVERFLOW, FAIL_BUDGET = 0, 1, 2, 3


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


@njit(cache=True)
def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


@njit(cache=True)
def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(cache=True)
def dot2(row, c):
    """Compensated dot product of a float row with an integer vector."""
    s = 0.0
    e = 0.0
    for j in range(row.shape[0]):
        p, pe = _two_prod(row[j], float(c[j]))
        s, se = _two_sum(s, p)
        e += pe + se
    return s + e


@njit(cache=True)
def lattice_vector(frame, scales, c, out):
    for i in range(frame.shape[0]):
        out[i] = scales[i] * dot2(frame[i], c)


@njit(cache=True)
def _gram_schmidt(V, Bs, mu, nrm):
    n = V.shape[0]
    for i in range(n):
        for r in range(n):
            Bs[r, i] = V[r, i]
        for j in range(i):
            num = 0.0
            for r in range(n):
                num += V[r, i] * Bs[r, j]
            mu[i, j] = num / nrm[j]
            for r in range(n):
                Bs[r, i] -= mu[i, j] * Bs[r, j]
        s = 0.0
        for r in range(n):
            s += Bs[r, i] * Bs[r, i]
        nrm[i] = s


@njit(cache=True)
def lll_reduce(frame, scales, U, max_iter):
    """LLL-reduce the columns of ``diag(scales) frame U`` in place on ``U``.

    Returns False when the reduction does not converge or integer coordinates
    leave the exactly representable range.
    """
    n = U.shape[0]
    V = np.empty((n, n))
    Bs = np.empty((n, n))
    mu = np.zeros((n, n))
    nrm = np.empty(n)
    col = np.empty(n)
    for j in range(n):
        lattice_vector(frame, scales, U[:, j], col)
        V[:, j] = col
    k = 1
    it = 0
    while k < n:
        it += 1
        if it > max_iter:
            return False
        for j in range(k - 1, -1, -1):
            _gram_schmidt(V, Bs, mu, nrm)
            q = np.round(mu[k, j])
            if q != 0.0:
                for r in range(n):
                    U[r, k] -= np.int64(q) * U[r, j]
                    if abs(U[r, k]) > _MAX_COEF:
                        return False
                lattice_vector(frame, scales, U[:, k], col)
                V[:, k] = col
        _gram_schmidt(V, Bs, mu, nrm)
        if not nrm[k - 1] > 0.0:
            return False
        if nrm[k] >= (LLL_DELTA - mu[k, k - 1] ** 2) * nrm[k - 1]:
            k += 1
        else:
            for r in range(n):
                tmp = U[r, k]
                U[r, k] = U[r, k - 1]
                U[r, k - 1] = tmp
                tv = V[r, k]
                V[r, k] = V[r, k - 1]
                V[r, k - 1] = tv
            k = max(k - 1, 1)
    return True


@njit(cache=True)
def lll_reduce_staged(frame, scales, U, max_iter):
    """LLL along the path ``scales**s``, ``s`` from 0 to 1, warm-starting each stage.

    Jumping straight to a strongly skewed basis makes the first size
    reductions produce integer multipliers beyond 2**53; moving along the
    path in steps of at most ``e^8`` in skew keeps them small.
    """
    n = scales.shape[0]
    logs = np.log(scales)
    span = logs.max() - logs.min()
    steps = max(1, int(np.ceil(span / 8.0)))
    st = np.empty(n)
    for j in range(1, steps + 1):
        for i in range(n):
            st[i] = np.exp(logs[i] * j / steps)
        if not lll_reduce(frame, st, U, max_iter):
            return False
    return True


@njit(cache=True)
def enumerate_cube(frame, scales, U, out_c, out_v, start, max_candidates):
    """Append every nonzero lattice vector with all scaled coordinates in [-1, 1].

    ``U`` must hold a reduced basis.  Returns the new fill level of the output
    buffers, ``-1`` on overflow, ``-2`` when the candidate box is too large.
    """
    n = U.shape[0]
    R = np.empty((n, n))
    col = np.empty(n)
    for j in range(n):
        lattice_vector(frame, scales, U[:, j], col)
        R[:, j] = col
    Rinv = np.linalg.inv(R)
    bound = np.empty(n, dtype=np.int64)
    total = 1.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += abs(Rinv[i, j])
        b = np.floor(s * (1.0 + 1e-9) + 1e-9)
        bound[i] = np.int64(b)
        total *= 2.0 * b + 1.0
    if total > max_candidates:
        return -2
    a = np.empty(n, dtype=np.int64)
    for i in range(n):
        a[i] = -bound[i]
    c = np.empty(n, dtype=np.int64)
    v = np.empty(n)
    fill = start
    while True:
        nonzero = False
        for i in range(n):
            if a[i] != 0:
                nonzero = True
                break
        if nonzero:
            for r in range(n):
                acc = np.int64(0)
                for j in range(n):
                    acc += U[r, j] * a[j]
                c[r] = acc
            lattice_vector(frame, scales, c, v)
            inside = True
            for r in range(n):
                if abs(v[r]) > 1.0:
                    inside = False
                    break
            if inside:
                if fill >= out_c.shape[0]:
                    return -1
                out_c[fill] = c
                out_v[fill] = v
                fill += 1
        # odometer increment
        i = 0
        while i < n:
            a[i] += 1
            if a[i] <= bound[i]:
                break
            a[i] = -bound[i]
            i += 1
        if i == n:
            break
    return fill


@njit(cache=True)
def box_points_batch(frames, scales, out_c, out_v, out_s, max_iter, max_candidates):
    """Lattice points in the scaled unit cube for a batch of factored lattices.

    Returns ``(fill, where, kind)``: ``kind`` is ``OK``, ``FAIL_REDUCE``,
    ``FAIL_OVERFLOW`` or ``FAIL_BUDGET`` and ``where`` the failing sample.
    """
    S = frames.shape[0]
    n = frames.shape[1]
    fill = 0
    for s in range(S):
        U = np.eye(n, dtype=np.int64)
        if not lll_reduce_staged(frames[s], scales[s], U, max_iter):
            return fill, s, FAIL_REDUCE
        new = enumerate_cube(frames[s], scales[s], U, out_c, out_v, fill, max_candidates)
        if new < 0:
            return fill, s, FAIL_OVERFLOW if new == -1 else FAIL_BUDGET
        for r in range(fill, new):
            out_s[r] = s
        fill = new
    return fill, 0, OK


@njit(cache=True)
def flow_cells_scan(frame, t1s, t2s, half_x, half_z, out_c, out_v, out_cell, max_iter,
                    max_candidates):
    """Scan Cartan-flow cells of one lattice frame for points in the search box.

    Cell ``i`` pushes the frame by ``diag(e^-t1, e^-t2, e^(t1+t2))`` and looks for
    vectors with ``|x|, |y| <= half_x`` and ``|z| <= half_z``.  The reduced
    basis of each cell seeds the reduction of the next one.
    """
    n = frame.shape[0]
    U = np.eye(n, dtype=np.int64)
    row_start = U.copy()
    scales = np.empty(n)
    fill = 0
    prev_t1 = -1
    for i in range(t1s.shape[0]):
        t1 = t1s[i]
        t2 = t2s[i]
        if t1 != prev_t1:
            U[:, :] = row_start
        scales[0] = np.exp(-t1) / half_x
        scales[1] = np.exp(-t2) / half_x
        scales[2] = np.exp(t1 + t2) / half_z
        if not lll_reduce(frame, scales, U, max_iter):
            return fill, i, FAIL_REDUCE
        if t1 != prev_t1:
            row_start[:, :] = U
            prev_t1 = t1
        new = enumerate_cube(frame, scales, U, out_c, out_v, fill, max_candidates)
        if new < 0:
            return fill, i, FAIL_OVERFLOW if new == -1 else FAIL_BUDGET
        for r in range(fill, new):
            out_cell[r] = i
        fill = new
    return fill, 0, OK
