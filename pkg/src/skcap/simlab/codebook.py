"""Code parameters and the three random codebooks.

The quantization codebook holds N_tot t-sequences. It is partitioned twice,
independently and uniformly at random:

* Wyner-Ziv bins: N_WZ bins of M_WZ sequences; the bin index is sent.
* secret-key bins: N_SK bins of M_SK sequences; the bin index is the key.

The channel codebook has one x-sequence per Wyner-Ziv bin.
"""

from dataclasses import asdict, dataclass
import math

import numpy as np

from ..bounds import rate_quantities
from ..errors import ParameterError, UsageError
from ..probkit import compose, mutual_information
from .typical import sample_typical

MAX_CODEBOOK = 1 << 22


def round_half_up(x):
    return int(math.floor(x + 0.5))


def _size(bits):
    if bits > 62:
        raise ParameterError(f"codebook of 2^{bits:.1f} sequences is too large")
    return max(1, round_half_up(2.0 ** bits))


def largest_divisor_at_most(n, target):
    target = max(1, min(n, target))
    for d in range(target, 0, -1):
        if n % d == 0:
            return d
    return 1


@dataclass(frozen=True)
class CodeParams:
    """Block lengths, slacks and integer codebook sizes.

    ``rate_match_gap`` is R_ch - 3 delta - beta R_wz; it is zero at an
    exactly rate-matched operating point.
    """

    n: int
    N: int
    beta: float
    delta: float
    eta: float
    eps: float
    R_s: float
    R_wz: float
    R_ch: float
    I_xz: float
    M_WZ: int
    N_WZ: int
    M_SK: int
    N_SK: int
    M_SK_target: int
    rate_match_gap: float

    @property
    def N_tot(self):
        return self.M_WZ * self.N_WZ

    def to_json(self):
        out = asdict(self)
        out["N_tot"] = self.N_tot
        return out


def derive_params(problem, witness, n, delta, eps=0.1, beta=None):
    """Codebook sizes for block length ``n`` (channel) and round(beta n) (source)."""
    if witness.general:
        raise UsageError("the simulator covers the a = x, b = const scheme only")
    if n < 1:
        raise ParameterError("block length n must be >= 1")
    if delta <= 0:
        raise ParameterError("delta must be positive")
    if eps <= 0:
        raise ParameterError("eps must be positive")
    beta = problem.beta if beta is None else float(beta)
    N = max(1, round_half_up(beta * n))
    eta = delta / beta
    q = rate_quantities(problem, witness)
    xyz = compose(witness.x, [problem.channel.matrix], ("x", "y", "z"))
    i_xz = mutual_information(xyz, "x", "z")
    m_wz = _size(N * (q.R_s - eta))
    n_wz = _size(N * (q.R_wz + 2 * eta))
    n_tot = m_wz * n_wz
    if n_tot > MAX_CODEBOOK:
        raise ParameterError(f"N_tot = {n_tot} exceeds {MAX_CODEBOOK}; reduce n")
    target = _size(n * (i_xz - delta))
    m_sk = largest_divisor_at_most(n_tot, target)
    return CodeParams(
        n=int(n), N=N, beta=beta, delta=float(delta), eta=eta, eps=float(eps),
        R_s=q.R_s, R_wz=q.R_wz, R_ch=q.R_ch, I_xz=i_xz,
        M_WZ=m_wz, N_WZ=n_wz, M_SK=m_sk, N_SK=n_tot // m_sk, M_SK_target=target,
        rate_match_gap=q.R_ch - 3 * delta - beta * q.R_wz,
    )


@dataclass(frozen=True, eq=False)
class CodebookSet:
    """Immutable codebooks plus the laws used for typicality tests.

    ``wz_index[i]`` / ``sk_index[i]`` give the bin of t-sequence ``i``;
    ``wz_bins[b]`` / ``sk_bins[b]`` list the sequence indices in bin ``b``.
    """

    params: CodeParams
    t_codebook: np.ndarray
    wz_bins: np.ndarray
    sk_bins: np.ndarray
    wz_index: np.ndarray
    sk_index: np.ndarray
    x_codebook: np.ndarray
    p_ut: np.ndarray
    p_tv: np.ndarray
    p_xy: np.ndarray
    p_xz: np.ndarray
    seed: object = None


def _inverse(bins):
    idx = np.empty(bins.size, dtype=np.int64)
    idx[bins.ravel()] = np.repeat(np.arange(bins.shape[0]), bins.shape[1])
    return idx


def _generator(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


def witness_laws(problem, witness):
    """Joint laws p(u,t), p(t,v), p(x,y), p(x,z) of the coding scheme."""
    p_uv = problem.source.probs
    tu = witness.t_given_u.array
    p_ut = p_uv.sum(axis=1)[:, None] * tu
    p_tv = np.einsum("ut,uv->tv", tu, p_uv)
    w = problem.channel.tensor
    px = witness.x.probs
    return p_ut, p_tv, px[:, None] * w.sum(axis=2), px[:, None] * w.sum(axis=1)


def build_codebooks(problem, witness, params, seed=0):
    """Draw all three codebooks from a seeded counter-based generator.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if witness.general:
        raise UsageError("the simulator covers the a = x, b = const scheme only")
    rng = _generator(seed)
    p_ut, p_tv, p_xy, p_xz = witness_laws(problem, witness)
    p_t = p_ut.sum(axis=0)
    n_tot = params.N_tot
    t_cb = sample_typical(rng, p_t, params.N, params.eps, n_tot)
    wz_bins = rng.permutation(n_tot).reshape(params.N_WZ, params.M_WZ)
    sk_bins = rng.permutation(n_tot).reshape(params.N_SK, params.M_SK)
    x_cb = sample_typical(rng, witness.x.probs, params.n, params.eps, params.N_WZ)
    arrays = [t_cb, wz_bins, sk_bins, _inverse(wz_bins), _inverse(sk_bins), x_cb]
    for a in arrays:
        a.setflags(write=False)
    return CodebookSet(params, *arrays, p_ut, p_tv, p_xy, p_xz,
                       seed=seed if isinstance(seed, int) else None)
