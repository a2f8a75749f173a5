"""Pure numpy implementations of the optimizer hot kernels.

The compiled extension in ``_kernels.pyx`` provides the same five functions
with identical signatures and semantics; ``kernels.py`` picks whichever is
available at import time.  Keep the two files in lockstep.

Conventions shared by both backends:

* matrices are C-contiguous float64 arrays,
* masks are boolean/uint8 arrays of the same shape,
* a rotation move adds t at (i1, j1) and (i2, j2) and subtracts t at
  (i1, j2) and (i2, j1), which preserves all row and column sums.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def sum_xlogx(a: np.ndarray) -> float:
    """Sum of x*ln(x) over strictly positive entries (0 ln 0 = 0)."""
    arr = np.asarray(a, dtype=float)
    pos = arr[arr > 0]
    return float(np.sum(pos * np.log(pos)))


def norm_sq(a: np.ndarray) -> float:
    """Squared Frobenius norm."""
    arr = np.asarray(a, dtype=float)
    return float(np.sum(arr * arr))


def rotation_scores(grad: np.ndarray, can_gain: np.ndarray, can_lose: np.ndarray):
    """Best first-order rotation move under entry masks.

    Returns (score, i1, j1, i2, j2) maximizing the directional derivative
    grad[i1,j1] + grad[i2,j2] - grad[i1,j2] - grad[i2,j1] over moves whose
    gaining entries are allowed by can_gain and losing entries by can_lose,
    with i1 != i2 and j1 != j2.  Returns (-inf, -1, -1, -1, -1) when no
    admissible move exists.
    """
    G = np.asarray(grad, dtype=float)
    k = G.shape[0]
    gain = np.asarray(can_gain, dtype=bool)
    lose = np.asarray(can_lose, dtype=bool)
    # M[i, j1, j2]: profit from shifting mass into column j1 out of column
    # j2 within row i; admissible iff row i may gain at j1 and lose at j2.
    M = G[:, :, None] - G[:, None, :]
    ok = gain[:, :, None] & lose[:, None, :]
    M = np.where(ok, M, -np.inf)
    order = np.argsort(M, axis=0)
    top1_i = order[-1]
    top1_v = np.take_along_axis(M, top1_i[None], axis=0)[0]
    if k >= 2:
        top2_i = order[-2]
        top2_v = np.take_along_axis(M, top2_i[None], axis=0)[0]
    else:
        top2_i, top2_v = top1_i, np.full_like(top1_v, -np.inf)
    best = (-np.inf, -1, -1, -1, -1)
    for j1 in range(k):
        for j2 in range(k):
            if j1 == j2:
                continue
            a_v = top1_v[j1, j2]
            b_v = top1_v[j2, j1]
            if not (np.isfinite(a_v) and np.isfinite(b_v)):
                continue
            a_i = int(top1_i[j1, j2])
            b_i = int(top1_i[j2, j1])
            if a_i != b_i:
                score, i1, i2 = a_v + b_v, a_i, b_i
            else:
                score, i1, i2 = -np.inf, -1, -1
                if np.isfinite(top2_v[j1, j2]):
                    cand = top2_v[j1, j2] + b_v
                    if cand > score:
                        score, i1, i2 = cand, int(top2_i[j1, j2]), b_i
                if np.isfinite(top2_v[j2, j1]):
                    cand = a_v + top2_v[j2, j1]
                    if cand > score:
                        score, i1, i2 = cand, a_i, int(top2_i[j2, j1])
                if i1 < 0:
                    continue
            if score > best[0]:
                best = (float(score), i1, j1, i2, j2)
    return best


def _xlogx_vec(x: np.ndarray) -> np.ndarray:
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def line_f_values(
    entries: np.ndarray,
    i1: int,
    j1: int,
    i2: int,
    j2: int,
    ts: np.ndarray,
    d: float,
) -> np.ndarray:
    """Objective values along a rotation move, one per step size in ts.

    Only four entries change, so the entropy and norm sums are updated
    incrementally rather than recomputed from the full matrix.
    """
    arr = np.asarray(entries, dtype=float)
    k = arr.shape[0]
    t = np.asarray(ts, dtype=float)
    a = arr[i1, j1]
    b = arr[i2, j2]
    c = arr[i1, j2]
    e = arr[i2, j1]
    s0 = sum_xlogx(arr) - (_xlogx_vec(np.array([a, b, c, e])).sum())
    q0 = norm_sq(arr) - (a * a + b * b + c * c + e * e)
    s = (
        s0
        + _xlogx_vec(a + t)
        + _xlogx_vec(b + t)
        + _xlogx_vec(c - t)
        + _xlogx_vec(e - t)
    )
    q = q0 + (a + t) ** 2 + (b + t) ** 2 + (c - t) ** 2 + (e - t) ** 2
    arg = 1.0 - 2.0 / k + q / float(k * k)
    return np.log(k) - s / k + 0.5 * d * np.log(arg)


def sinkhorn_balance(a: np.ndarray, max_iters: int = 200, tol: float = 1e-12) -> np.ndarray:
    """Alternate row/column normalization toward a doubly stochastic matrix.

    The input must have strictly positive row and column sums.  Returns a
    fresh array; the input is never modified.
    """
    arr = np.array(a, dtype=float)
    for _ in range(max_iters):
        rows = arr.sum(axis=1)
        if np.any(rows <= 0):
            raise ValueError("sinkhorn needs positive row sums")
        arr /= rows[:, None]
        cols = arr.sum(axis=0)
        if np.any(cols <= 0):
            raise ValueError("sinkhorn needs positive column sums")
        arr /= cols[None, :]
        dev = max(
            float(np.max(np.abs(arr.sum(axis=1) - 1.0))),
            float(np.max(np.abs(arr.sum(axis=0) - 1.0))),
        )
        if dev < tol:
            break
    return arr
