import itertools
import math
from collections import Counter

import numpy as np
import pytest

from skcap.bounds import AuxiliaryWitness
from skcap.errors import ParameterError, StateSpaceTooLarge, UsageError
from skcap.instances import bsc, dsbs, same_output
from skcap.models import DiscreteProblem, WiretapChannel
from skcap.probkit import JointPmf, Pmf, StochasticMatrix
from skcap.simlab import (
    CodeParams,
    build_codebooks,
    decode_receiver,
    derive_params,
    eaves_decode_given_key,
    eaves_decode_unrestricted,
    encode,
    exact_equivocation,
    is_typical,
    jointly_typical,
    run_experiment,
    sample_typical,
    typical_set_size,
)
from skcap.simlab.codebook import largest_divisor_at_most, round_half_up
from skcap.simlab.coding import transmit
from skcap.simlab.experiment import binomial_ci


def typical_oracle(seq, p, eps):
    """Frequency typicality written out with a Counter."""
    c = Counter(int(s) for s in seq)
    for a, pa in enumerate(p):
        if pa == 0 and c[a]:
            return False
        if abs(c[a] / len(seq) - pa) > eps + 1e-12:
            return False
    return True


def make_params(n, N, m_wz, n_wz, m_sk, eps):
    return CodeParams(n=n, N=N, beta=N / n, delta=0.1, eta=0.1, eps=eps, R_s=0.0, R_wz=0.0,
                      R_ch=0.0, I_xz=0.0, M_WZ=m_wz, N_WZ=n_wz, M_SK=m_sk,
                      N_SK=m_wz * n_wz // m_sk, M_SK_target=m_sk, rate_match_gap=0.0)


def identity_witness(k=2):
    return AuxiliaryWitness(StochasticMatrix(np.eye(k)), Pmf.uniform(2))


def H(p):
    p = np.asarray(p, float).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


# -- typicality ------------------------------------------------------------------


def test_typical_set_enumeration():
    seqs = np.array(list(itertools.product(range(2), repeat=8)))
    for eps in (0.1, 0.125, 0.3):
        brute = [s for s in seqs if typical_oracle(s, (0.5, 0.5), eps)]
        assert typical_set_size((0.5, 0.5), 8, eps) == len(brute)
        assert np.array_equal(is_typical(seqs, (0.5, 0.5), eps),
                              [typical_oracle(s, (0.5, 0.5), eps) for s in seqs])
    # eps = 0.1 admits only weight 4; weights 3 to 5 need eps >= 1/8
    assert typical_set_size((0.5, 0.5), 8, 0.1) == math.comb(8, 4)
    assert typical_set_size((0.5, 0.5), 8, 0.125) == sum(math.comb(8, k) for k in (3, 4, 5))


def test_zero_probability_symbols_never_typical():
    assert not is_typical([0, 0, 0, 2], (0.75, 0.25, 0.0), 0.5)[0]
    assert is_typical([0, 0, 0, 1], (0.75, 0.25, 0.0), 0.01)[0]


def test_jointly_typical_matches_oracle():
    rng = np.random.default_rng(0)
    p_ab = rng.dirichlet(np.ones(6)).reshape(2, 3)
    a = rng.integers(0, 2, size=(200, 9))
    b = rng.integers(0, 3, size=(200, 9))
    got = jointly_typical(a, b, p_ab, 0.15)
    want = [typical_oracle(x * 3 + y, p_ab.ravel(), 0.15) for x, y in zip(a, b)]
    assert np.array_equal(got, want)


@pytest.mark.parametrize("p,N,eps", [((0.5, 0.5), 8, 0.125), ((0.2, 0.8), 7, 0.1)])
def test_sample_typical_is_uniform_on_the_set(p, N, eps):
    rng = np.random.default_rng(1)
    draws = sample_typical(rng, p, N, eps, 40000)
    assert all(typical_oracle(s, p, eps) for s in draws[:2000])
    size = typical_set_size(p, N, eps)
    counts = Counter(map(tuple, draws))
    assert len(counts) == size
    expected = len(draws) / size
    # loose chi-square style check: no sequence far from its expected count
    assert max(abs(c - expected) for c in counts.values()) < 6 * math.sqrt(expected)


def test_empty_typical_set_is_parameter_error():
    with pytest.raises(ParameterError, match="increase"):
        sample_typical(np.random.default_rng(0), (0.5, 0.5), 3, 0.1, 1)


# -- parameters and codebooks ----------------------------------------------------


def test_rounding_helpers():
    assert round_half_up(2.5) == 3 and round_half_up(2.49) == 2 and round_half_up(0.5) == 1
    assert largest_divisor_at_most(12, 5) == 4
    assert largest_divisor_at_most(7, 6) == 1
    assert largest_divisor_at_most(8, 100) == 8


def test_derive_params_sizes():
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(np.eye(2), bsc(0.2)))
    w = identity_witness()
    for n, delta in ((6, 0.1), (8, 0.2), (10, 0.05)):
        cp = derive_params(p, w, n, delta)
        r_s = 1 - H([0.1, 0.9])
        r_wz = 1 - r_s
        i_xz = 1 - H([0.2, 0.8])
        assert cp.N == n
        assert cp.M_WZ == max(1, math.floor(2 ** (n * (r_s - delta)) + 0.5))
        assert cp.N_WZ == max(1, math.floor(2 ** (n * (r_wz + 2 * delta)) + 0.5))
        assert cp.M_SK * cp.N_SK == cp.M_WZ * cp.N_WZ
        assert cp.N_tot % cp.M_SK == 0 and cp.M_SK <= cp.M_SK_target
        assert cp.M_SK_target == max(1, math.floor(2 ** (n * (i_xz - delta)) + 0.5))
        assert cp.rate_match_gap == pytest.approx(1.0 - 3 * delta - r_wz, abs=1e-12)


def test_derive_params_beta_scales_source_block():
    p = DiscreteProblem(dsbs(0.1), same_output(np.eye(2)), beta=1.5)
    assert derive_params(p, identity_witness(), 5, 0.1).N == 8  # 7.5 rounds up
    with pytest.raises(ParameterError):
        derive_params(p, identity_witness(), 5, 0.0)


def test_single_codeword_codebook():
    p = DiscreteProblem(dsbs(0.1), same_output(np.eye(2)))
    cb = build_codebooks(p, identity_witness(), make_params(4, 4, 1, 1, 1, 0.3), seed=3)
    assert cb.t_codebook.shape == (1, 4)
    assert cb.wz_index.tolist() == [0] and cb.sk_index.tolist() == [0]
    assert cb.x_codebook.shape == (1, 4)


def test_codebooks_deterministic():
    p = DiscreteProblem(dsbs(0.1), same_output(np.eye(2)))
    cp = make_params(8, 8, 8, 4, 4, 0.2)
    a = build_codebooks(p, identity_witness(), cp, seed=11)
    b = build_codebooks(p, identity_witness(), cp, seed=11)
    c = build_codebooks(p, identity_witness(), cp, seed=12)
    for name in ("t_codebook", "wz_bins", "sk_bins", "x_codebook"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert not np.array_equal(a.t_codebook, c.t_codebook)


def test_codebook_partitions():
    p = DiscreteProblem(dsbs(0.1), same_output(np.eye(2)))
    cp = make_params(8, 8, 6, 4, 8, 0.2)
    cb = build_codebooks(p, identity_witness(), cp, seed=5)
    assert sorted(cb.wz_bins.ravel()) == list(range(24))
    assert sorted(cb.sk_bins.ravel()) == list(range(24))
    assert cb.wz_bins.shape == (4, 6) and cb.sk_bins.shape == (3, 8)
    pairs = {(int(cb.wz_index[i]), int(np.flatnonzero(cb.wz_bins[cb.wz_index[i]] == i)[0]))
             for i in range(24)}
    assert len(pairs) == 24
    assert len(cb.x_codebook) == cp.N_WZ
    for i in range(24):
        assert i in cb.wz_bins[cb.wz_index[i]] and i in cb.sk_bins[cb.sk_index[i]]
    assert all(typical_oracle(t, (0.5, 0.5), 0.2) for t in cb.t_codebook)
    assert all(typical_oracle(x, (0.5, 0.5), 0.2) for x in cb.x_codebook)


# -- encoder and decoders --------------------------------------------------------


def test_encoder_constant_source():
    src = JointPmf(np.array([[1.0, 0.0], [0.0, 0.0]]), ("u", "v"))
    p = DiscreteProblem(src, same_output(np.eye(2)))
    cb = build_codebooks(p, identity_witness(), make_params(6, 6, 2, 2, 2, 0.1), seed=0)
    assert not cb.t_codebook.any()
    enc = encode(cb, np.zeros(6, dtype=int))
    assert enc is not None and enc.index == 0


def test_encoder_finds_codeword_equal_to_source():
    p = DiscreteProblem(dsbs(0.1), same_output(np.eye(2)))
    cb = build_codebooks(p, identity_witness(), make_params(8, 8, 8, 4, 4, 0.2), seed=2)
    for i, t in enumerate(cb.t_codebook):
        enc = encode(cb, t)
        first = next(j for j, s in enumerate(cb.t_codebook) if np.array_equal(s, t))
        assert enc.index == first
        assert enc.key == cb.sk_index[first]
        assert np.array_equal(enc.x, cb.x_codebook[cb.wz_index[first]])
    with pytest.raises(UsageError):
        encode(cb, np.zeros(7, dtype=int))


def test_encoder_failure_rate_matches_coverage():
    # t = u and the joint law is diagonal, so u is covered iff it is a codeword
    p = DiscreteProblem(dsbs(0.1), same_output(np.eye(2)))
    cp = make_params(8, 8, 16, 4, 4, 0.2)
    rep = run_experiment(p, identity_witness(), cp, 1000, seed=4, redraw_codebook=False)
    cb = build_codebooks(p, identity_witness(), cp, np.random.SeedSequence(4))
    covered = {tuple(t) for t in cb.t_codebook}
    exact = 1 - len(covered) / 2 ** 8
    lo, hi = binomial_ci(rep.counts["E1"], rep.trials)
    assert lo <= exact <= hi


def test_noiseless_decoder_recovers_key():
    src = JointPmf(np.diag([0.5, 0.5]), ("u", "v"))
    p = DiscreteProblem(src, same_output(np.eye(2)))
    cb = build_codebooks(p, identity_witness(), make_params(8, 8, 4, 4, 4, 0.2), seed=8)
    assert len({tuple(x) for x in cb.x_codebook}) == len(cb.x_codebook)
    for t in cb.t_codebook:
        enc = encode(cb, t)
        dec = decode_receiver(cb, enc.x, t)
        # codewords are drawn with replacement; a repeat inside the bin is ambiguous
        repeats = sum(np.array_equal(cb.t_codebook[j], t) for j in cb.wz_bins[enc.phi])
        if repeats == 1:
            assert dec.failure is None and dec.key == enc.key
        else:
            assert dec.failure == "E3"


def test_useless_channel_fails_first_stage():
    flat = np.full((2, 2), 0.5)
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(flat, flat))
    rep = run_experiment(p, identity_witness(), make_params(8, 8, 4, 8, 4, 0.2), 300, seed=1)
    assert rep.channel_decode_error >= 0.9


def test_bsc_error_rates_match_exhaustive_enumeration():
    n = 5
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(bsc(0.05), bsc(0.3)))
    cp = make_params(n, n, 2, 4, 2, 0.3)
    cb = build_codebooks(p, identity_witness(), cp, np.random.SeedSequence(6))
    seqs = [np.array(s) for s in itertools.product(range(2), repeat=n)]
    p_uv = p.source.probs
    exact = {"key_error": 0.0, "E2": 0.0}
    for u in seqs:
        enc = encode(cb, u)
        fail1 = enc is None
        idx = 0 if fail1 else enc.index  # the scheme sends codeword 0 after E1
        phi, key = int(cb.wz_index[idx]), int(cb.sk_index[idx])
        x = cb.x_codebook[phi]
        for v in seqs:
            puv = float(np.prod(p_uv[u, v]))
            for y in seqs:
                py = float(np.prod(bsc(0.05)[x, y]))
                dec = decode_receiver(cb, y, v)
                w = puv * py
                if dec.failure == "E2" or dec.phi != phi:
                    exact["E2"] += w
                if fail1 or dec.key != key:
                    exact["key_error"] += w
    rep = run_experiment(p, identity_witness(), cp, 3000, seed=6, redraw_codebook=False)
    for name, value in exact.items():
        lo, hi = binomial_ci(rep.counts[name], rep.trials, level=0.99)
        assert lo <= value <= hi, name


def test_perfect_eavesdropper_with_key():
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(np.eye(2), np.eye(2)))
    cb = build_codebooks(p, identity_witness(), make_params(8, 8, 4, 4, 4, 0.2), seed=9)
    assert len({tuple(x) for x in cb.x_codebook}) == len(cb.x_codebook)
    for i in range(cb.params.N_tot):
        enc = transmit(cb, i)
        shared = set(cb.sk_bins[enc.key]) & set(cb.wz_bins[enc.phi])
        got = eaves_decode_given_key(cb, enc.x, enc.key)
        assert got == (i if len(shared) == 1 else None)


def test_singleton_key_bins():
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(np.eye(2), bsc(0.1)))
    cb = build_codebooks(p, identity_witness(), make_params(8, 8, 4, 4, 1, 0.2), seed=10)
    z = cb.x_codebook[0]
    good = jointly_typical(cb.x_codebook, z[None], cb.p_xz, 0.2)
    for k in range(cb.params.N_SK):
        i = int(cb.sk_bins[k][0])
        want = i if good[cb.wz_index[i]] else None
        assert eaves_decode_given_key(cb, z, k) == want
    with pytest.raises(UsageError):
        eaves_decode_given_key(cb, z, cb.params.N_SK)


def test_key_helps_eavesdropper():
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(bsc(0.05), bsc(0.1)))
    rep = run_experiment(p, identity_witness(), make_params(8, 8, 4, 4, 2, 0.2), 500, seed=3)
    assert rep.counts["eaves_given_key_fail"] <= rep.counts["eaves_unrestricted_fail"]
    cb = build_codebooks(p, identity_witness(), make_params(8, 8, 4, 4, 2, 0.2), seed=3)
    rng = np.random.default_rng(0)
    for _ in range(200):
        z = rng.integers(0, 2, 8)
        i = eaves_decode_unrestricted(cb, z)
        if i is not None:
            assert eaves_decode_given_key(cb, z, int(cb.sk_index[i])) == i


# -- equivocation ----------------------------------------------------------------


def brute_key_message_law(cb, p_u, eps):
    """P(k, phi) by scanning every source block and the codebook in order."""
    N = cb.params.N
    joint = np.zeros((cb.params.N_SK, cb.params.N_WZ))
    p_ut = cb.p_ut.ravel()
    for u in itertools.product(range(len(p_u)), repeat=N):
        u = np.array(u)
        idx = 0
        for j, t in enumerate(cb.t_codebook):
            if typical_oracle(u * cb.p_ut.shape[1] + t, p_ut, eps):
                idx = j
                break
        joint[cb.sk_index[idx], cb.wz_index[idx]] += np.prod(p_u[u])
    return joint


def test_equivocation_bounds_and_independent_eavesdropper():
    flat = np.array([[0.3, 0.7], [0.3, 0.7]])
    for z_given_x in (bsc(0.2), flat):
        p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(np.eye(2), z_given_x))
        cb = build_codebooks(p, identity_witness(), make_params(6, 6, 4, 4, 2, 0.2), seed=1)
        h_k, h_kz = exact_equivocation(cb, p)
        assert 0 <= h_kz <= h_k + 1e-9
        assert h_k <= math.log2(cb.params.N_SK) + 1e-9
        if z_given_x is flat:
            assert h_kz == pytest.approx(h_k, abs=1e-9)
        else:
            assert h_kz < h_k


def test_equivocation_z_equals_y():
    ch = same_output(bsc(0.1))
    p = DiscreteProblem(dsbs(0.1), ch)
    cb = build_codebooks(p, identity_witness(), make_params(6, 6, 4, 4, 2, 0.2), seed=2)
    assert exact_equivocation(cb, p, observer="z") == exact_equivocation(cb, p, observer="y")


def test_equivocation_perfect_eavesdropper_one_key_per_sequence():
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(np.eye(2), np.eye(2)))
    cp = make_params(6, 6, 4, 4, 1, 0.2)
    cb = build_codebooks(p, identity_witness(), cp, seed=7)
    assert len({tuple(x) for x in cb.x_codebook}) == len(cb.x_codebook)
    joint = brute_key_message_law(cb, np.array([0.5, 0.5]), 0.2)
    want_hk = H(joint.sum(axis=1))
    want_hkz = H(joint) - H(joint.sum(axis=0))  # z^n = x^n reveals phi exactly
    h_k, h_kz = exact_equivocation(cb, p)
    assert h_k == pytest.approx(want_hk, abs=1e-12)
    assert h_kz == pytest.approx(want_hkz, abs=1e-12)


def test_equivocation_guard():
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(np.eye(2), np.full((2, 3), 1 / 3)))
    cb = build_codebooks(p, identity_witness(), make_params(14, 14, 1, 2, 1, 0.2), seed=0)
    with pytest.raises(StateSpaceTooLarge) as err:
        exact_equivocation(cb, p)
    assert err.value.states == 2 ** 14 * 3 ** 14


# -- experiment reports ----------------------------------------------------------


def test_binomial_ci_examples():
    assert binomial_ci(0, 0) == (0.0, 1.0)
    lo, hi = binomial_ci(0, 10)
    assert lo == 0.0 and hi == pytest.approx(1 - 0.025 ** 0.1, abs=1e-12)


def test_zero_trials():
    p = DiscreteProblem(dsbs(0.1), same_output(np.eye(2)))
    rep = run_experiment(p, identity_witness(), make_params(6, 6, 2, 2, 2, 0.2), 0)
    assert rep.trials == 0 and all(c == 0 for c in rep.counts.values())
    assert rep.key_error_rate == 0.0
    assert rep.to_json()["events"]["E1"]["ci95"] == [0.0, 1.0]


def test_same_seed_same_report_and_union_bound():
    p = DiscreteProblem(dsbs(0.1), WiretapChannel.independent(bsc(0.05), bsc(0.2)))
    cp = make_params(6, 6, 4, 4, 2, 0.25)
    a = run_experiment(p, identity_witness(), cp, 400, seed=21, exhaustive=True)
    b = run_experiment(p, identity_witness(), cp, 400, seed=21, exhaustive=True)
    assert a.to_json() == b.to_json()
    assert a.union_bound_holds()
    assert a.equivocation_bits <= a.key_entropy_bits + 1e-9
    c = run_experiment(p, identity_witness(), cp, 400, seed=22)
    assert c.to_json() != a.to_json()
    assert c.equivocation_bits is None
