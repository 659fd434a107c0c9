"""Exact key entropy and equivocation for a fixed codebook."""

import numpy as np

from ..errors import StateSpaceTooLarge, UsageError
from ..probkit import all_sequences, entropy_bits
from .coding import encode_indices

STATE_LIMIT = 1 << 26


def key_message_law(cb, problem):
    """Exact P(k, phi) over all source blocks (encoder failures use index 0)."""
    p_u = problem.source.probs.sum(axis=1)
    seqs = all_sequences(p_u.size, cb.params.N)
    prob = np.prod(p_u[seqs], axis=1)
    idx = np.empty(len(seqs), dtype=np.int64)
    for s in range(0, len(seqs), 512):
        idx[s:s + 512] = encode_indices(cb, seqs[s:s + 512])
    idx[idx < 0] = 0
    joint = np.zeros((cb.params.N_SK, cb.params.N_WZ))
    np.add.at(joint, (cb.sk_index[idx], cb.wz_index[idx]), prob)
    return joint


def exact_equivocation(cb, problem, witness=None, observer="z"):
    """(H(K), H(K | observer^n)) in bits, computed exactly.

    Enumerates every source block and every output block of the observer
    ("z" for the eavesdropper, "y" for the receiver). Refuses when
    |U|^N |Z|^n exceeds 2^26.
    """
    if observer not in ("y", "z"):
        raise UsageError("observer must be 'y' or 'z'")
    w = problem.channel.tensor
    out = w.sum(axis=2) if observer == "y" else w.sum(axis=1)
    nu = problem.source.shape[0]
    states = nu ** cb.params.N * out.shape[1] ** cb.params.n
    if states > STATE_LIMIT:
        raise StateSpaceTooLarge(states, STATE_LIMIT)
    pk_phi = key_message_law(cb, problem)
    outs = all_sequences(out.shape[1], cb.params.n)  # (|Z|^n, n)
    used = np.flatnonzero(pk_phi.sum(axis=0) > 0)
    # P(z^n | x_phi) for each used channel message
    lik = np.ones((used.size, len(outs)))
    for pos in range(cb.params.n):
        lik *= out[cb.x_codebook[used, pos][:, None], outs[None, :, pos]]
    pkz = pk_phi[:, used] @ lik  # (N_SK, |Z|^n)
    pk = pkz.sum(axis=1)
    pz = pkz.sum(axis=0)
    h_k = float(entropy_bits(pk))
    cond = np.divide(pkz, pz, out=np.zeros_like(pkz), where=pz > 0)
    h_kz = float(pz @ entropy_bits(cond.T))
    h_kz = max(h_kz, 0.0)
    if h_k < h_kz <= h_k + 1e-12:  # rounding only
        h_kz = h_k
    return h_k, h_kz
