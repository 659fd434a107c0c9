"""Search primitives over products of probability simplices."""

from itertools import combinations
import math

import numpy as np


def simplex_grid(d, m):
    """All points of the d-simplex whose coordinates are multiples of 1/m."""
    if d == 1:
        return np.ones((1, 1))
    pts = []
    for bars in combinations(range(m + d - 1), d - 1):
        prev = -1
        counts = []
        for b in bars:
            counts.append(b - prev - 1)
            prev = b
        counts.append(m + d - 2 - prev)
        pts.append(counts)
    return np.asarray(pts, dtype=float) / m


def simplex_grid_size(d, m):
    return math.comb(m + d - 1, d - 1)


def grid_resolution(d, budget, m_max):
    """Largest m <= m_max whose d-simplex grid has at most ``budget`` points."""
    m = 1
    while m < m_max and simplex_grid_size(d, m + 1) <= budget:
        m += 1
    return m


def dirichlet_rows(rng, size, shape):
    """``size`` random row-stochastic arrays of ``shape`` (rows uniform on the simplex)."""
    return rng.dirichlet(np.ones(shape[-1]), size=(size,) + tuple(shape[:-1]))


def _moves(blocks):
    out = []
    for b, blk in enumerate(blocks):
        rows, cols = blk.shape
        for r in range(rows):
            for i in range(cols):
                for j in range(cols):
                    if i != j:
                        out.append((b, r, i, j))
    return np.asarray(out, dtype=np.int64).reshape(-1, 4)


def compass_search(blocks, evaluate, step, tol, max_iter=2000):
    """Pattern search on a product of simplices.

    A move shifts up to ``step`` mass from entry j to entry i of one row of one
    block. Every move is evaluated in one batched call to ``evaluate``, which
    receives a list of arrays shaped (K, rows, cols) and returns K values
    (``-inf`` marks an infeasible point). The best strictly improving move is
    taken; when none improves, the step halves. Stops once step < tol.
    """
    blocks = [np.array(b, dtype=float) for b in blocks]
    moves = _moves(blocks)
    current = float(evaluate([b[None] for b in blocks])[0])
    it = 0
    if moves.size == 0:
        return blocks, current, it
    while step >= tol and it < max_iter:
        it += 1
        batch = [np.repeat(b[None], len(moves), axis=0) for b in blocks]
        k = np.arange(len(moves))
        amounts = np.empty(len(moves))
        for b in range(len(blocks)):
            sel = moves[:, 0] == b
            if not sel.any():
                continue
            kk, r, i, j = k[sel], moves[sel, 1], moves[sel, 2], moves[sel, 3]
            amt = np.minimum(step, batch[b][kk, r, j])
            amounts[sel] = amt
            batch[b][kk, r, i] += amt
            batch[b][kk, r, j] -= amt
        vals = np.asarray(evaluate(batch), dtype=float)
        vals[amounts <= 0] = -np.inf
        best = int(np.argmax(vals))
        if vals[best] > current + 1e-15:
            current = float(vals[best])
            blocks = [bb[best].copy() for bb in batch]
        else:
            step /= 2
    return blocks, current, it


def golden_section(f, lo, hi, tol):
    """Maximize a unimodal scalar function on [lo, hi]; returns (x, f(x))."""
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    cands = [(fa, xa) for xa, fa in ((a, f(a)), (c, fc), (d, fd), (b, f(b)))]
    fbest, xbest = max(cands, key=lambda p: p[0])
    return xbest, fbest
