"""Degraded eavesdropper side information and public-discussion rates."""

from dataclasses import dataclass
import warnings

import numpy as np

from .bounds import (
    BoundResult,
    OptimizerConfig,
    _InputSide,
    build_witness,
    conditional_mi_given_input,
    frontier_search,
    source_frontier,
    source_rates,
)
from .errors import NumericalHealthWarning
from .models import SideInfoProblem
from .probkit import compose, conditional_mutual_information, mutual_information

TIGHT_STRUCTURES = ("degraded", "independent")


def side_info_rates(problem, witness):
    """Rates of a witness on a side-information problem, including the value."""
    i_tv, r_wz, i_tw = source_rates(problem.source.probs, witness.t_given_u,
                                    problem.w_given_v.array)
    xyz = compose(witness.x, [problem.channel.matrix], ("x", "y", "z"))
    i_xy = mutual_information(xyz, "x", "y")
    eq = conditional_mutual_information(xyz, "x", "y", "z")
    beta = problem.beta
    return {
        "R_s": i_tv,
        "R_s_eve": i_tw,
        "R_wz": r_wz,
        "R_ch": i_xy,
        "R_eq": eq,
        "value": beta * (i_tv - i_tw) + eq,
        "slack": i_xy - beta * r_wz,
    }


def side_info_capacity(problem, config=OptimizerConfig()):
    """Key capacity when the eavesdropper also observes w, a degraded copy of v.

    Maximizes beta [I(t;v) - I(t;w)] + I(x;y|z) subject to
    I(x;y) >= beta [I(t;u) - I(t;v)], with (t, x) independent and
    |T| = |U| + 2.
    """
    if not isinstance(problem, SideInfoProblem):
        raise TypeError("side_info_capacity needs a SideInfoProblem")
    fr = source_frontier(problem.source.probs, problem.beta, problem.w_given_v.array,
                         atom_budget=config.atom_budget)
    side = _InputSide(problem.channel, "conditional")
    found, trace = frontier_search(fr, side, config)
    t_card = problem.source.shape[0] + 2
    wit, slack = build_witness(fr, side, found, t_card,
                               lambda w: side_info_rates(problem, w)["slack"])
    r = side_info_rates(problem, wit)
    comps = {"R_s": r["R_s"], "R_s_eve": r["R_s_eve"], "R_wz": r["R_wz"],
             "R_ch": r["R_ch"], "R_eq": r["R_eq"]}
    return BoundResult("side_info_capacity", r["value"], wit, comps, slack, trace)


# -- public discussion -------------------------------------------------------


def _project_simplex(v):
    """Euclidean projection of each row of ``v`` onto the probability simplex."""
    v = np.atleast_2d(v)
    u = -np.sort(-v, axis=1)
    css = np.cumsum(u, axis=1) - 1
    ind = np.arange(1, v.shape[1] + 1)
    cond = u - css / ind > 0
    rho = cond.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = css[np.arange(len(v)), rho] / (rho + 1)
    return np.maximum(v - theta[:, None], 0.0)


def _gradient(w, px):
    nx = w.shape[0]
    wyz = w.reshape(nx, -1)
    wz = w.sum(axis=1)
    qyz = px @ wyz
    qz = px @ wz
    lyz = np.log2(np.where(qyz > 1e-300, qyz, 1.0))
    lz = np.log2(np.where(qz > 1e-300, qz, 1.0))
    # constant 1/ln 2 terms cancel between the two entropies
    hyz_x = -np.sum(np.where(wyz > 0, wyz * np.log2(np.where(wyz > 0, wyz, 1.0)), 0.0), axis=1)
    hz_x = -np.sum(np.where(wz > 0, wz * np.log2(np.where(wz > 0, wz, 1.0)), 0.0), axis=1)
    return -(wyz @ lyz) - hyz_x + (wz @ lz) + hz_x


def max_conditional_mi(channel, starts=8, seed=0, tol=1e-13, max_iter=5000):
    """max over p(x) of I(x;y|z) by projected gradient ascent.

    The objective is concave, so every start should reach the same value;
    a spread above 1e-6 triggers a :class:`NumericalHealthWarning`.
    Returns ``(value, p_x)``.
    """
    w = channel.tensor
    nx = w.shape[0]
    rng = np.random.default_rng(seed)
    inits = [np.full(nx, 1.0 / nx)] + list(rng.dirichlet(np.ones(nx), size=starts - 1))
    f = lambda p: float(conditional_mi_given_input(w, p))
    results = []
    for p in inits:
        val = f(p)
        step = 1.0
        for _ in range(max_iter):
            g = _gradient(w, p)
            while step > 1e-14:
                q = _project_simplex(p + step * g)[0]
                fq = f(q)
                if fq >= val + 1e-4 * np.dot(g, q - p) - 1e-16 and fq >= val:
                    break
                step /= 2
            else:
                break
            gain = fq - val
            p, val = q, fq
            step = min(step * 2, 1e3)
            if gain < tol:
                break
        results.append((val, p))
    vals = np.array([v for v, _ in results])
    if vals.max() - vals.min() > 1e-6:
        warnings.warn(
            f"max I(x;y|z) starts disagree by {vals.max() - vals.min():.3g} bits",
            NumericalHealthWarning,
            stacklevel=2,
        )
    k = int(np.argmax(vals))
    return float(vals[k]), results[k][1]


def _source_mi(problem):
    return mutual_information(problem.source, "u", "v")


def discussion_upper_bound(problem):
    """max_x I(x;y|z) + beta I(u;v): an upper bound with public discussion."""
    chan, _ = max_conditional_mi(problem.channel)
    return chan + problem.beta * _source_mi(problem)


@dataclass(frozen=True)
class SeparateKeys:
    """Separate channel and source keys under unlimited public discussion.

    ``tight`` is True when the declared channel factorization is
    x -> y -> z or y -> x -> z, in which case the rate meets the
    discussion upper bound.
    """

    value: float
    tight: bool
    channel_term: float
    source_term: float
    p_x: tuple = ()


def separate_keys_rate(problem):
    chan, px = max_conditional_mi(problem.channel)
    src = problem.beta * _source_mi(problem)
    tight = problem.channel.structure in TIGHT_STRUCTURES
    return SeparateKeys(chan + src, tight, chan, src, tuple(float(p) for p in px))
