"""Standard channels, sources and seeded random instances."""

import numpy as np

from .models import DegradedProductProblem, DiscreteProblem, SideInfoProblem, WiretapChannel
from .probkit import JointPmf


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def bec(e):
    """Binary erasure channel; output symbols (0, 1, erasure)."""
    return np.array([[1 - e, 0.0, e], [0.0, 1 - e, e]])


def erasure_to_erasure(e1, e2):
    """Degrading map turning BEC(e1) output into BEC(e2) output (e2 >= e1)."""
    f = (e2 - e1) / (1 - e1)
    return np.array([[1 - f, 0.0, f], [0.0, 1 - f, f], [0.0, 0.0, 1.0]])


def dsbs(p):
    """Doubly symmetric binary source: u uniform, v = u through BSC(p)."""
    return JointPmf(0.5 * bsc(p), ("u", "v"))


def independent_source(pu=(0.5, 0.5), pv=(0.5, 0.5)):
    return JointPmf(np.outer(pu, pv), ("u", "v"))


def erasure_wiretap(e1, e2):
    """x -> BEC(e1) -> y, and z a further erasure of y so z ~ BEC(e2)."""
    return WiretapChannel.degraded(bec(e1), erasure_to_erasure(e1, e2))


def same_output(y_given_x):
    """Wiretap channel whose eavesdropper sees exactly the receiver output."""
    k = np.asarray(y_given_x).shape[1]
    return WiretapChannel.degraded(y_given_x, np.eye(k))


def _rand_rows(rng, n, k):
    return rng.dirichlet(np.ones(k), size=n)


def random_binary_problem(rng, beta=1.0):
    """Random binary source and an unstructured binary wiretap channel."""
    src = JointPmf(rng.dirichlet(np.ones(4)).reshape(2, 2), ("u", "v"))
    w = rng.dirichlet(np.ones(4), size=2).reshape(2, 2, 2)
    return DiscreteProblem(src, WiretapChannel.from_joint(w), beta)


def random_degraded_binary(rng, reverse=False):
    a = _rand_rows(rng, 2, 2)
    b = _rand_rows(rng, 2, 2)
    return WiretapChannel.reversed(a, b) if reverse else WiretapChannel.degraded(a, b)


def random_reversely_degraded_product(rng, m=2, beta=1.0):
    """``m`` binary subchannels, each degraded towards a random side."""
    src = JointPmf(rng.dirichlet(np.ones(4)).reshape(2, 2), ("u", "v"))
    subs = tuple(random_degraded_binary(rng, bool(rng.integers(2))) for _ in range(m))
    return DegradedProductProblem(src, subs, beta)


def random_side_info_problem(rng, independent_w=False, beta=1.0):
    """Binary chain u -> v -> w with a degraded binary wiretap channel."""
    src = JointPmf(rng.dirichlet(np.ones(4)).reshape(2, 2), ("u", "v"))
    if independent_w:
        row = rng.dirichlet(np.ones(2))
        wv = np.vstack([row, row])
    else:
        wv = _rand_rows(rng, 2, 2)
    return SideInfoProblem(src, wv, random_degraded_binary(rng), beta)
