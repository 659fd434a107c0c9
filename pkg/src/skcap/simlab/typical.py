"""Strong (frequency) typicality on short blocks.

A sequence is eps-typical for p when every empirical frequency is within
``eps`` of its probability and symbols of probability zero never occur.
Joint typicality is the same test applied to the sequence of pairs.
"""

from functools import lru_cache
import math

import numpy as np

from ..errors import ParameterError
from ..optim import simplex_grid

_SLACK = 1e-12


def _counts(idx, cells):
    """Per-row symbol counts of an integer array (K, N) over ``cells`` symbols."""
    idx = np.atleast_2d(idx)
    k = idx.shape[0]
    flat = (idx + cells * np.arange(k)[:, None]).ravel()
    return np.bincount(flat, minlength=k * cells).reshape(k, cells)


def counts_typical(counts, N, p, eps):
    """Typicality test on count vectors (..., |alphabet|)."""
    p = np.asarray(p, dtype=float).ravel()
    counts = np.asarray(counts)
    freq = counts / N
    ok = np.all(np.abs(freq - p) <= eps + _SLACK, axis=-1)
    zero = p <= 0
    if zero.any():
        ok &= np.all(counts[..., zero] == 0, axis=-1)
    return ok


def is_typical(seqs, p, eps):
    """eps-typicality of each row of ``seqs`` (or of one sequence)."""
    seqs = np.atleast_2d(np.asarray(seqs))
    p = np.asarray(p, dtype=float)
    return counts_typical(_counts(seqs, p.size), seqs.shape[1], p, eps)


def jointly_typical(a, b, p_ab, eps):
    """Joint typicality of row pairs (a_k, b_k); either side may be one sequence."""
    p_ab = np.asarray(p_ab, dtype=float)
    a, b = np.broadcast_arrays(np.atleast_2d(a), np.atleast_2d(b))
    idx = a * p_ab.shape[1] + b
    return counts_typical(_counts(idx, p_ab.size), idx.shape[1], p_ab.ravel(), eps)


@lru_cache(maxsize=256)
def _types(p_key, N, eps):
    p = np.asarray(p_key)
    d = p.size
    counts = np.rint(simplex_grid(d, N) * N).astype(np.int64) if N else np.zeros((1, d), np.int64)
    keep = counts_typical(counts, max(N, 1), p, eps)
    counts = counts[keep]
    logw = np.array([math.lgamma(N + 1) - sum(math.lgamma(c + 1) for c in row) for row in counts])
    return counts, logw


def typical_types(p, N, eps):
    """Count vectors of the typical type classes and log-sizes of each class."""
    return _types(tuple(float(x) for x in np.asarray(p, dtype=float)), int(N), float(eps))


def typical_set_size(p, N, eps):
    _, logw = typical_types(p, N, eps)
    return int(round(np.exp(logw).sum())) if logw.size else 0


def sample_typical(rng, p, N, eps, size):
    """``size`` independent draws, uniform over the eps-typical set of length N."""
    counts, logw = typical_types(p, N, eps)
    if counts.shape[0] == 0:
        raise ParameterError(
            f"typical set is empty for N={N}, eps={eps}; increase the block length or eps"
        )
    d = counts.shape[1]
    accept = np.exp(logw).sum() / float(d) ** N
    if accept >= 0.25:
        # uniform draws over all sequences, kept when typical
        out = np.empty((0, N), dtype=np.int64)
        while len(out) < size:
            m = int((size - len(out)) / accept * 1.1) + 8
            draw = rng.integers(0, d, size=(m, N))
            if accept < 1 - 1e-12:
                draw = draw[is_typical(draw, p, eps)]
            out = np.vstack([out, draw])
        return out[:size]
    w = np.exp(logw - logw.max())
    pick = rng.choice(len(counts), size=size, p=w / w.sum())
    base = np.stack([np.repeat(np.arange(counts.shape[1]), row) for row in counts])
    seqs = base[pick]
    order = np.argsort(rng.random((size, N)), axis=1)
    return np.take_along_axis(seqs, order, axis=1)
