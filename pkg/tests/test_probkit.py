import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from skcap.errors import ModelError, UsageError
from skcap.probkit import (
    JointPmf,
    Pmf,
    StochasticMatrix,
    compose,
    conditional_mutual_information,
    entropy,
    joint_from_json,
    mutual_information,
)


def h2(p):
    # textbook binary entropy, written out independently of the library
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def bsc(p):
    return np.array([[1 - p, p], [p, 1 - p]])


def test_entropy_examples():
    assert entropy(Pmf.uniform(2)) == pytest.approx(1.0, abs=1e-15)
    assert entropy(Pmf.point(3, 1)) == 0.0
    # -0.11 log2 0.11 - 0.89 log2 0.89 = 0.499916 (to 6 places)
    assert entropy(Pmf([0.11, 0.89])) == pytest.approx(0.499916, abs=1e-4)
    assert entropy(Pmf([0.11, 0.89])) == pytest.approx(h2(0.11), abs=1e-12)


def test_invalid_pmf_rejected():
    with pytest.raises(ModelError):
        Pmf([0.5, 0.6])
    with pytest.raises(ModelError):
        Pmf([1.2, -0.2])
    with pytest.raises(ModelError):
        entropy([0.3, 0.3])


def test_mutual_information_examples():
    prod = JointPmf(np.outer([0.3, 0.7], [0.6, 0.4]), ("a", "b"))
    assert mutual_information(prod, "a", "b") == 0.0
    same = JointPmf(np.diag([0.5, 0.5]), ("u", "v"))
    assert mutual_information(same, "u", "v") == pytest.approx(1.0)
    dsbs = JointPmf(0.5 * bsc(0.1), ("u", "v"))
    assert mutual_information(dsbs, "u", "v") == pytest.approx(0.53100, abs=1e-4)
    assert mutual_information(dsbs, "u", "v") == pytest.approx(1 - h2(0.1), abs=1e-12)


def test_overlapping_axes_is_usage_error():
    j = JointPmf(np.full((2, 2), 0.25), ("a", "b"))
    with pytest.raises(UsageError):
        mutual_information(j, "a", ("a", "b"))
    with pytest.raises(UsageError):
        conditional_mutual_information(j, "a", "b", "a")


def test_conditional_mi_examples():
    rng = np.random.default_rng(3)
    # a and b independent given c
    pc = rng.dirichlet(np.ones(2))
    pa_c = rng.dirichlet(np.ones(2), size=2)
    pb_c = rng.dirichlet(np.ones(2), size=2)
    j = JointPmf(np.einsum("c,ca,cb->abc", pc, pa_c, pb_c), ("a", "b", "c"))
    assert conditional_mutual_information(j, "a", "b", "c") == pytest.approx(0.0, abs=1e-12)
    # constant c
    ab = rng.dirichlet(np.ones(4)).reshape(2, 2)
    j = JointPmf(np.concatenate([ab[:, :, None], np.zeros((2, 2, 1))], axis=2), ("a", "b", "c"))
    assert conditional_mutual_information(j, "a", "b", "c") == pytest.approx(
        mutual_information(j, "a", "b"), abs=1e-12)


def test_conditional_mi_chain_rule_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        p = rng.dirichlet(np.ones(8)).reshape(2, 2, 2)
        j = JointPmf(p, ("a", "b", "c"))
        # H(A|C) + H(B|C) - H(AB|C), each conditional entropy summed by hand
        pc = p.sum(axis=(0, 1))
        total = 0.0
        for c in range(2):
            cond = p[:, :, c] / pc[c]
            ha = -sum(q * math.log2(q) for q in cond.sum(axis=1) if q > 0)
            hb = -sum(q * math.log2(q) for q in cond.sum(axis=0) if q > 0)
            hab = -sum(q * math.log2(q) for q in cond.ravel() if q > 0)
            total += pc[c] * (ha + hb - hab)
        assert conditional_mutual_information(j, "a", "b", "c") == pytest.approx(total, abs=1e-12)


def test_compose_examples():
    j = compose(Pmf([0.3, 0.7]), [StochasticMatrix.identity(2)], ("a", "b"))
    assert np.allclose(j.probs, np.diag([0.3, 0.7]))
    src = Pmf([0.5, 0.5])
    chain = compose(src, [bsc(0.1), bsc(0.2)], ("a", "b", "c"))
    ends = chain.marginal(("a", "c")).probs
    crossover = 0.1 * (1 - 0.2) + 0.9 * 0.2
    assert crossover == pytest.approx(0.26)
    assert np.allclose(ends, 0.5 * bsc(crossover), atol=1e-15)
    assert np.allclose(chain.marginal("a").probs, src.probs)


def test_compose_dimension_mismatch():
    with pytest.raises(UsageError):
        compose(Pmf([0.5, 0.5]), [np.full((3, 2), 0.5)])


def test_stochastic_rows_checked():
    with pytest.raises(ModelError):
        StochasticMatrix(np.array([[0.5, 0.4], [0.5, 0.5]]))


def test_joint_from_json_names_field():
    with pytest.raises(ModelError) as err:
        joint_from_json({"alphabets": {"u": 2, "v": 2}, "probs": [0.5, 0.5, 0.5]}, "source")
    assert err.value.field == "source.probs"
    with pytest.raises(ModelError) as err:
        joint_from_json({"probs": [1.0]}, "source")
    assert err.value.field == "source.alphabets"


joints = st.integers(0, 2**32 - 1).map(
    lambda s: JointPmf(np.random.default_rng(s).dirichlet(np.full(12, 0.5)).reshape(2, 3, 2),
                       ("a", "b", "c")))


@settings(max_examples=200, deadline=None)
@given(joints)
def test_information_inequalities(j):
    ha, hb = entropy(j.marginal("a").probs), entropy(j.marginal("b").probs)
    hab = entropy(j.marginal(("a", "b")).probs)
    assert hab <= ha + hb + 1e-9
    assert mutual_information(j, "a", "b") >= 0
    assert conditional_mutual_information(j, "a", "b", "c") >= 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_data_processing_on_chains(seed):
    rng = np.random.default_rng(seed)
    j = compose(Pmf(rng.dirichlet(np.ones(3))),
                [rng.dirichlet(np.ones(2), size=3), rng.dirichlet(np.ones(3), size=2)],
                ("t", "u", "v"))
    assert mutual_information(j, "t", "v") <= mutual_information(j, "t", "u") + 1e-9


@settings(max_examples=100, deadline=None)
@given(joints, st.permutations(range(3)))
def test_relabeling_invariance(j, perm):
    relabeled = JointPmf(j.probs[:, list(perm), :], j.labels)
    assert abs(mutual_information(j, "a", "b") - mutual_information(relabeled, "a", "b")) <= 1e-12
    assert abs(conditional_mutual_information(j, "b", "c", "a")
               - conditional_mutual_information(relabeled, "b", "c", "a")) <= 1e-12
