"""Compiled inner loops for the maximal operators.

Window sums come from double-double prefix sums: each prefix is kept as a
(hi, lo) pair built with an error-free two-sum, so a window difference is
accurate relative to the window itself rather than to the running total,
and a window of zeros is exactly zero.

Placements leaving the box are never evaluated.  Along an axis of ``m``
cells, a side-``k`` window that sticks out can be slid inward (k <= m) or
already covers the whole axis (k > m); either way a window inside the box
contains the same cell, has at least the same mass and the same measure.
So per axis only starts ``0..m-kk`` with ``kk = min(k, m)`` are needed.

The maximum over the placements containing a cell is a sliding-window
maximum computed with block prefix/suffix maxima (van Herk / Gil-Werman).
"""
import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _prefix(v, hi, lo):
    hi[0] = 0.0
    lo[0] = 0.0
    for i in range(v.shape[0]):
        s = hi[i] + v[i]
        bp = s - hi[i]
        err = (hi[i] - (s - bp)) + (v[i] - bp)
        hi[i + 1] = s
        lo[i + 1] = lo[i] + err


@njit(cache=True, nogil=True)
def _block_scans(a, n, width, pre, suf):
    for b0 in range(0, n, width):
        b1 = min(b0 + width, n)
        m = a[b0]
        pre[b0] = m
        for i in range(b0 + 1, b1):
            v = a[i]
            m = v if v > m else m
            pre[i] = m
        m = a[b1 - 1]
        suf[b1 - 1] = m
        for i in range(b1 - 2, b0 - 1, -1):
            v = a[i]
            m = v if v > m else m
            suf[i] = m


@njit(cache=True, nogil=True)
def containing_max(w, n, kk, m, out, pre, suf):
    """out[x] = max(w[lo..hi]), lo = max(0, x-kk+1), hi = min(x, n-1), x < m.

    ``w[:n]`` holds the in-box window values, ``n = m - kk + 1``.
    """
    _block_scans(w, n, kk, pre, suf)
    for x in range(m):
        lo = x - kk + 1
        if lo < 0:
            lo = 0
        hi = x if x < n - 1 else n - 1
        if lo // kk == hi // kk:
            # same block: lo is a block start or hi is the last entry
            out[x] = pre[hi] if lo % kk == 0 else suf[lo]
        else:
            u = suf[lo]
            v = pre[hi]
            out[x] = u if u > v else v


@njit(cache=True, nogil=True)
def forward_max(a, width, out, buf):
    # out[x] = max(a[x : x + width]) for every full window; buf needs 2*len(a)
    n = a.shape[0]
    pre = buf[:n]
    suf = buf[n:2 * n]
    _block_scans(a, n, width, pre, suf)
    for x in range(n - width + 1):
        u = suf[x]
        v = pre[x + width - 1]
        out[x] = u if u > v else v


@njit(cache=True, nogil=True)
def maximal_1d(g, k_lo, k_hi, coef, best):
    m = g.shape[0]
    hi = np.empty(m + 1)
    lo = np.empty(m + 1)
    _prefix(g, hi, lo)
    w = np.empty(m)
    out = np.empty(m)
    pre = np.empty(m)
    suf = np.empty(m)
    for k in range(k_lo, k_hi):
        kk = k if k < m else m
        n = m - kk + 1
        if kk == 1:
            w[:m] = g
        else:
            for s in range(n):
                v = (hi[s + kk] - hi[s]) + (lo[s + kk] - lo[s])
                w[s] = v if v > 0.0 else 0.0
        containing_max(w, n, kk, m, out, pre, suf)
        c = coef[k - 1]
        for x in range(m):
            v = c * out[x]
            if v > best[x]:
                best[x] = v


@njit(cache=True, nogil=True)
def _cube_sums(row_hi, row_lo, k1, k2, strips, column, col_hi, col_lo, sums):
    # sums[u, t] = mass of the k1 x k2 block starting at (u, t), all in-box starts
    m1 = row_hi.shape[0]
    m2 = row_hi.shape[1] - 1
    n1 = m1 - k1 + 1
    n2 = m2 - k2 + 1
    for i in range(m1):
        for t in range(n2):
            v = (row_hi[i, t + k2] - row_hi[i, t]) + (row_lo[i, t + k2] - row_lo[i, t])
            strips[i, t] = v if v > 0.0 else 0.0
    for t in range(n2):
        for i in range(m1):
            column[i] = strips[i, t]
        _prefix(column[:m1], col_hi, col_lo)
        for u in range(n1):
            v = (col_hi[u + k1] - col_hi[u]) + (col_lo[u + k1] - col_lo[u])
            sums[u, t] = v if v > 0.0 else 0.0


@njit(cache=True, nogil=True)
def maximal_2d(g, k_lo, k_hi, coef, best):
    m1, m2 = g.shape
    row_hi = np.empty((m1, m2 + 1))
    row_lo = np.empty((m1, m2 + 1))
    for i in range(m1):
        _prefix(g[i], row_hi[i], row_lo[i])
    strips = np.empty((m1, m2))
    col_hi = np.empty(m1 + 1)
    col_lo = np.empty(m1 + 1)
    sums = np.empty((m1, m2))
    partial = np.empty((m1, m2))
    span = max(m1, m2)
    column = np.empty(span)
    col_out = np.empty(span)
    pre = np.empty(span)
    suf = np.empty(span)
    for k in range(k_lo, k_hi):
        k1 = k if k < m1 else m1
        k2 = k if k < m2 else m2
        n1 = m1 - k1 + 1
        n2 = m2 - k2 + 1
        if k1 == 1 and k2 == 1:
            sums[:, :] = g
        else:
            _cube_sums(row_hi, row_lo, k1, k2, strips, column, col_hi, col_lo, sums)
        for u in range(n1):
            containing_max(sums[u], n2, k2, m2, partial[u], pre, suf)
        c = coef[k - 1]
        for j in range(m2):
            for u in range(n1):
                column[u] = partial[u, j]
            containing_max(column, n1, k1, m1, col_out, pre, suf)
            for i in range(m1):
                v = c * col_out[i]
                if v > best[i, j]:
                    best[i, j] = v
