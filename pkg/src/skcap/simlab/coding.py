"""Encoder, legitimate decoder and the eavesdropper's key-aided decoder."""

from dataclasses import dataclass

import numpy as np

from ..errors import UsageError
from .typical import counts_typical, jointly_typical


@dataclass(frozen=True)
class Encoded:
    index: int  # position of t in the quantization codebook
    key: int
    phi: int  # Wyner-Ziv bin index, also the channel message
    x: np.ndarray


@dataclass(frozen=True)
class Decoded:
    key: int = None
    failure: str = None  # "E2" (channel stage) or "E3" (bin stage)
    phi: int = None
    index: int = None


def encode_indices(cb, u_seqs):
    """First jointly typical codebook index for each source row; -1 if none."""
    u_seqs = np.atleast_2d(u_seqs)
    if u_seqs.shape[1] != cb.params.N:
        raise UsageError(f"source block must have length N={cb.params.N}")
    nt = cb.p_ut.shape[1]
    # joint counts of (u, t) for every source row against every codeword
    ou = (u_seqs[:, :, None] == np.arange(cb.p_ut.shape[0])).astype(np.int32)
    ot = (cb.t_codebook[:, :, None] == np.arange(nt)).astype(np.int32)
    counts = np.einsum("anu,bnt->abut", ou, ot).reshape(len(u_seqs), len(ot), -1)
    ok = counts_typical(counts, cb.params.N, cb.p_ut.ravel(), cb.params.eps)
    first = np.argmax(ok, axis=1)
    return np.where(ok.any(axis=1), first, -1)


def encode_index(cb, u_seq, chunk=2048):
    """First jointly typical codebook index for one source block; -1 if none."""
    u = np.asarray(u_seq)[None]
    for start in range(0, len(cb.t_codebook), chunk):
        ok = jointly_typical(u, cb.t_codebook[start:start + chunk], cb.p_ut, cb.params.eps)
        if ok.any():
            return start + int(np.argmax(ok))
    return -1


def transmit(cb, index):
    """Key and channel codeword for a codebook index."""
    phi = int(cb.wz_index[index])
    return Encoded(int(index), int(cb.sk_index[index]), phi, cb.x_codebook[phi])


def encode(cb, u_seq):
    """Returns an :class:`Encoded`, or None when no codeword is jointly typical (E1)."""
    u_seq = np.asarray(u_seq)
    if u_seq.shape != (cb.params.N,):
        raise UsageError(f"source block must have length N={cb.params.N}")
    i = encode_index(cb, u_seq)
    return None if i < 0 else transmit(cb, i)


def decode_receiver(cb, y_seq, v_seq):
    """Two-stage unique joint-typicality decoding of the key.

    Stage one finds the unique channel codeword typical with y; stage two the
    unique sequence of that Wyner-Ziv bin typical with v.
    """
    y_seq, v_seq = np.asarray(y_seq), np.asarray(v_seq)
    if y_seq.shape != (cb.params.n,) or v_seq.shape != (cb.params.N,):
        raise UsageError("y must have length n and v length N")
    hits = np.flatnonzero(jointly_typical(cb.x_codebook, y_seq[None], cb.p_xy, cb.params.eps))
    if hits.size != 1:
        return Decoded(failure="E2")
    phi = int(hits[0])
    members = cb.wz_bins[phi]
    ok = jointly_typical(cb.t_codebook[members], v_seq[None], cb.p_tv, cb.params.eps)
    found = members[ok]
    if found.size != 1:
        return Decoded(failure="E3", phi=phi)
    idx = int(found[0])
    return Decoded(key=int(cb.sk_index[idx]), phi=phi, index=idx)


def _typical_messages(cb, z_seq):
    z_seq = np.asarray(z_seq)
    if z_seq.shape != (cb.params.n,):
        raise UsageError(f"z must have length n={cb.params.n}")
    return jointly_typical(cb.x_codebook, z_seq[None], cb.p_xz, cb.params.eps)


def eaves_decode_given_key(cb, z_seq, k):
    """Index of the unique t in key bin ``k`` whose channel codeword is typical
    with z, or None if there is no such t or more than one."""
    if not 0 <= k < cb.params.N_SK:
        raise UsageError(f"key {k} out of range [0, {cb.params.N_SK})")
    good = _typical_messages(cb, z_seq)
    members = cb.sk_bins[k]
    found = members[good[cb.wz_index[members]]]
    return int(found[0]) if found.size == 1 else None


def eaves_decode_unrestricted(cb, z_seq):
    """Same search over the whole quantization codebook, without the key."""
    good = _typical_messages(cb, z_seq)
    found = np.flatnonzero(good[cb.wz_index])
    return int(found[0]) if found.size == 1 else None
