"""Secret-key rate bounds for the discrete source-over-wiretap-channel model.

Every bound here has the same shape: pick an auxiliary t for the source and
an input law for the channel, then maximize

    (source gain of t) + (channel equivocation)
    subject to  beta * (Wyner-Ziv rate of t) <= (channel rate).

The source side is solved exactly for any budget by the linear program in
:mod:`skcap.frontier`. The channel side is searched over a simplex grid with
compass-search refinement from several distinct starts. What changes from
bound to bound is only the channel side:

* lower bound, a = x, b = const:  rate I(x;y), equivocation I(x;y) - I(x;z)
* lower bound, general (a, b):     rate I(a;y), equivocation I(a;y|b) - I(a;z|b),
                                    usable only when I(y;b) <= I(z;b)
* upper bound:                     rate I(x;y), equivocation I(x;y|z)
* reversely degraded product:      sums of the per-subchannel I(x_i;y_i) and
                                    I(x_i;y_i|z_i) over independent inputs
"""

from collections import OrderedDict
from dataclasses import dataclass, field
import threading
from typing import NamedTuple

import numpy as np

from .errors import ModelError, UsageError
from .frontier import SourceFrontier
from .models import DegradedProductProblem, WiretapChannel
from .parallel import pmap
from .optim import compass_search, grid_resolution, simplex_grid, simplex_grid_size
from .probkit import (
    JointPmf,
    Pmf,
    StochasticMatrix,
    compose,
    conditional_mutual_information,
    entropy_bits,
    mutual_information,
    product_pmf,
)

FEAS_TOL = 1e-12

GENERAL_CAP_NOTE = (
    "auxiliaries a and b were searched with |A|, |B| <= |X| + 1; "
    "this cap is an implementation choice, no bound is known for them"
)


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the channel-side search.

    ``grid_step`` is the spacing of the initial simplex grid over each input
    law, ``refine_tol`` the final compass step. ``general`` adds the
    general (a, b) auxiliaries to the lower-bound search.
    """

    starts: int = 32
    grid_step: float = 1 / 16
    refine_tol: float = 1e-5
    max_iter: int = 2000
    seed: int = 0
    general: bool = False
    max_grid: int = 20000
    random_candidates: int = 2000
    table_points: int = 33
    atom_budget: int = 320

    def __post_init__(self):
        if self.starts < 1:
            raise UsageError("starts must be >= 1")
        if not 0 < self.grid_step <= 1:
            raise UsageError("grid_step must be in (0, 1]")
        if self.refine_tol <= 0:
            raise UsageError("refine_tol must be positive")


@dataclass(frozen=True, eq=False)
class AuxiliaryWitness:
    """Auxiliary distributions that realize a bound value.

    ``x`` is always the channel input law. For the general lower bound the
    chain b -> a -> x is also stored; for a product channel ``x_parts`` holds
    the independent per-subchannel laws whose product is ``x``.
    """

    t_given_u: StochasticMatrix
    x: Pmf
    b: Pmf = None
    a_given_b: StochasticMatrix = None
    x_given_a: StochasticMatrix = None
    x_parts: tuple = ()

    @property
    def general(self):
        return self.b is not None

    def to_json(self):
        out = {
            "t_given_u": self.t_given_u.array.tolist(),
            "x": self.x.probs.tolist(),
        }
        if self.general:
            out["b"] = self.b.probs.tolist()
            out["a_given_b"] = self.a_given_b.array.tolist()
            out["x_given_a"] = self.x_given_a.array.tolist()
        if self.x_parts:
            out["x_parts"] = [p.probs.tolist() for p in self.x_parts]
        return out

    @classmethod
    def from_json(cls, doc, field="witness"):
        from .probkit import matrix_from_json

        if not isinstance(doc, dict):
            raise ModelError(f"{field} must be an object", field)
        for key in ("t_given_u", "x"):
            if key not in doc:
                raise ModelError(f"{field}.{key} is missing", f"{field}.{key}")
        t = matrix_from_json(doc["t_given_u"], f"{field}.t_given_u")
        try:
            x = Pmf(np.asarray(doc["x"], dtype=float))
        except (ModelError, TypeError, ValueError) as exc:
            raise ModelError(f"{field}.x: {exc}", f"{field}.x") from None
        kw = {}
        if "b" in doc:
            kw["b"] = Pmf(np.asarray(doc["b"], dtype=float))
            kw["a_given_b"] = matrix_from_json(doc["a_given_b"], f"{field}.a_given_b")
            kw["x_given_a"] = matrix_from_json(doc["x_given_a"], f"{field}.x_given_a")
        if "x_parts" in doc:
            kw["x_parts"] = tuple(Pmf(np.asarray(p, dtype=float)) for p in doc["x_parts"])
        return cls(t, x, **kw)


class RateQuantities(NamedTuple):
    R_ch: float
    R_eq_minus: float
    R_s: float
    R_wz: float
    R_eq_plus: float
    R_ch_plus: float


@dataclass(eq=False)
class BoundResult:
    """A bound value together with the witness that achieves it.

    ``rate_components`` holds R_s, R_wz, R_ch and R_eq as used by this bound
    (R_eq is I(x;y|z) for the upper bound and the degraded capacity).
    """

    kind: str
    value: float
    witness: AuxiliaryWitness
    rate_components: dict
    constraint_slack: float
    optimizer_trace: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {
            "kind": self.kind,
            "value": self.value,
            "rate_components": dict(self.rate_components),
            "constraint_slack": self.constraint_slack,
            "witness": self.witness.to_json(),
            "optimizer_trace": list(self.optimizer_trace),
            "notes": list(self.notes),
        }


# -- rate quantities ---------------------------------------------------------


def _check_witness(problem, witness):
    nu, _ = problem.source.shape
    nx = problem.channel.shape[0]
    if witness.t_given_u.n_in != nu:
        raise UsageError(f"t_given_u has {witness.t_given_u.n_in} rows, source has |U| = {nu}")
    if len(witness.x) != nx:
        raise UsageError(f"x has {len(witness.x)} symbols, channel has |X| = {nx}")
    if witness.general:
        nb = len(witness.b)
        if witness.a_given_b.n_in != nb:
            raise UsageError("a_given_b needs one row per b symbol")
        if witness.x_given_a.n_in != witness.a_given_b.out_shape[0]:
            raise UsageError("x_given_a needs one row per a symbol")
        if witness.x_given_a.out_shape[0] != nx:
            raise UsageError("x_given_a output alphabet must be X")


def source_rates(p_uv, t_given_u, w_given_v=None):
    """(I(t;v), I(t;u) - I(t;v), I(t;w)) for a test channel p(t|u)."""
    t = np.asarray(t_given_u.array if isinstance(t_given_u, StochasticMatrix) else t_given_u)
    probs = np.einsum("ut,uv->tuv", t, np.asarray(p_uv))
    labels = ("t", "u", "v")
    if w_given_v is not None:
        wv = np.asarray(w_given_v.array if isinstance(w_given_v, StochasticMatrix) else w_given_v)
        probs = np.einsum("tuv,vw->tuvw", probs, wv)
        labels += ("w",)
    j = JointPmf(probs / probs.sum(), labels)
    i_tv = mutual_information(j, "t", "v")
    i_tu = mutual_information(j, "t", "u")
    i_tw = mutual_information(j, "t", "w") if w_given_v is not None else 0.0
    return i_tv, i_tu - i_tv, i_tw


def rate_quantities(problem, witness):
    """R_ch, R_eq^-, R_s, R_wz, R_eq^+ and R_ch^+ for a witness.

    With the a = x, b = const witness, R_ch = I(x;y) and
    R_eq^- = I(x;y) - I(x;z).
    """
    _check_witness(problem, witness)
    r_s, r_wz, _ = source_rates(problem.source.probs, witness.t_given_u)
    w = problem.channel.matrix
    xyz = compose(witness.x, [w], ("x", "y", "z"))
    r_ch_plus = mutual_information(xyz, "x", "y")
    r_eq_plus = conditional_mutual_information(xyz, "x", "y", "z")
    if witness.general:
        j = compose(witness.b, [witness.a_given_b, witness.x_given_a, w], ("b", "a", "x", "y", "z"))
        r_ch = mutual_information(j, "a", "y")
        r_eq = (conditional_mutual_information(j, "a", "y", "b")
                - conditional_mutual_information(j, "a", "z", "b"))
    else:
        r_ch = r_ch_plus
        r_eq = r_ch_plus - mutual_information(xyz, "x", "z")
    return RateQuantities(r_ch, r_eq, r_s, r_wz, r_eq_plus, r_ch_plus)


def wiretap_usable(problem, witness):
    """I(y;b) <= I(z;b); always true for the a = x, b = const witness."""
    if not witness.general:
        return True
    w = problem.channel.matrix
    j = compose(witness.b, [witness.a_given_b, witness.x_given_a, w], ("b", "a", "x", "y", "z"))
    return mutual_information(j, "y", "b") <= mutual_information(j, "z", "b") + 1e-9


def recompute_value(kind, problem, witness):
    """Bound value implied by a witness, for re-verification of reports."""
    if kind == "side_info_capacity":
        from .extensions import side_info_rates

        return side_info_rates(problem, witness)["value"]
    if kind == "degraded_capacity" and isinstance(problem, DegradedProductProblem):
        problem = problem.as_discrete()
    q = rate_quantities(problem, witness)
    eq = q.R_eq_minus if kind == "lower_bound" else q.R_eq_plus
    return problem.beta * q.R_s + eq


# -- channel sides -----------------------------------------------------------


def _cond_entropies(w):
    """H(y|x), H(z|x), H(yz|x) per input symbol of a wiretap tensor."""
    return (entropy_bits(w.sum(axis=2)), entropy_bits(w.sum(axis=1)),
            entropy_bits(w.reshape(w.shape[0], -1)))


def _x_grid(nx, config, rng, budget=None):
    budget = budget or config.max_grid
    m = max(1, round(1 / config.grid_step))
    if simplex_grid_size(nx, m) <= budget:
        return simplex_grid(nx, m)
    m = grid_resolution(nx, budget // 2, m)
    return np.vstack([simplex_grid(nx, m), rng.dirichlet(np.ones(nx), size=budget // 2)])


class _InputSide:
    """Channel side parametrized by the input law p(x) alone."""

    def __init__(self, channel, equivocation):
        w = channel.tensor
        self.nx = w.shape[0]
        self.wy = w.sum(axis=2)
        self.wz = w.sum(axis=1)
        self.wyz = w.reshape(self.nx, -1)
        self.hy_x, self.hz_x, self.hyz_x = _cond_entropies(w)
        self.equivocation = equivocation  # "difference" or "conditional"

    def shapes(self):
        return [(1, self.nx)]

    def candidates(self, config, rng):
        return [_x_grid(self.nx, config, rng)[:, None, :]]

    def rates(self, blocks):
        px = blocks[0][:, 0, :]
        i_xy = entropy_bits(px @ self.wy) - px @ self.hy_x
        i_xz = entropy_bits(px @ self.wz) - px @ self.hz_x
        if self.equivocation == "difference":
            eq = i_xy - i_xz
        else:
            eq = entropy_bits(px @ self.wyz) - px @ self.hyz_x - i_xz
        return i_xy, eq, np.ones(len(px), dtype=bool)

    def witness_fields(self, blocks):
        return {"x": Pmf(_clean(blocks[0][0]))}


def _set_partitions(n, limit=64):
    """Restricted growth strings for partitions of range(n)."""
    out = []

    def rec(prefix, nblocks):
        if len(out) >= limit:
            return
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for b in range(nblocks + 1):
            rec(prefix + [b], max(nblocks, b + 1))

    rec([0], 1) if n else out.append(())
    return out


class _GeneralSide:
    """Channel side with auxiliaries b -> a -> x, |A| = |B| = |X| + 1."""

    def __init__(self, channel):
        w = channel.tensor
        self.nx = w.shape[0]
        self.na = self.nb = self.nx + 1
        self.wy = w.sum(axis=2)
        self.wz = w.sum(axis=1)

    def shapes(self):
        return [(1, self.nb), (self.nb, self.na), (self.na, self.nx)]

    def candidates(self, config, rng):
        nx, na, nb = self.nx, self.na, self.nb
        parts = _set_partitions(nx)
        budget = max(1, config.max_grid // max(1, len(parts)))
        grid = _x_grid(nx, config, rng, budget)
        pbs, abs_, xas = [], [], []
        eye = np.zeros((na, nx))
        eye[:nx] = np.eye(nx)
        eye[nx] = 1.0 / nx
        for part in parts:
            g = np.asarray(part)
            member = np.zeros((nb, nx))
            member[g, np.arange(nx)] = 1.0
            pb = np.zeros((len(grid), nb))
            pb[:, : g.max() + 1] = grid @ member[: g.max() + 1].T
            ab = np.zeros((len(grid), nb, na))
            num = grid[:, None, :] * member[None]  # (K, B, X)
            with np.errstate(invalid="ignore", divide="ignore"):
                cond = np.where(pb[:, :, None] > 0, num / pb[:, :, None], 0.0)
            empty = pb <= 0
            uniform = member / np.maximum(member.sum(axis=1, keepdims=True), 1)
            uniform[member.sum(axis=1) == 0] = 1.0 / nx
            cond[empty] = np.broadcast_to(uniform, cond.shape)[empty]
            ab[:, :, :nx] = cond
            pbs.append(pb)
            abs_.append(ab)
            xas.append(np.broadcast_to(eye, (len(grid), na, nx)))
        k = config.random_candidates
        pbs.append(rng.dirichlet(np.ones(nb), size=k)[:, None, :])
        abs_.append(rng.dirichlet(np.ones(na), size=(k, nb)))
        xas.append(rng.dirichlet(np.ones(nx), size=(k, na)))
        pb = np.concatenate([p if p.ndim == 3 else p[:, None, :] for p in pbs])
        return [pb, np.concatenate(abs_), np.concatenate(xas)]

    def rates(self, blocks):
        pb = blocks[0][:, 0, :]  # (K, B)
        ab = blocks[1]  # (K, B, A)
        xa = blocks[2]  # (K, A, X)
        pa = np.einsum("kb,kba->ka", pb, ab)
        y_a = xa @ self.wy  # (K, A, Y)
        z_a = xa @ self.wz
        hy_a = entropy_bits(y_a)
        hz_a = entropy_bits(z_a)
        y_b = ab @ y_a  # (K, B, Y)
        z_b = ab @ z_a
        hy_b = np.einsum("kb,kb->k", pb, entropy_bits(y_b))
        hz_b = np.einsum("kb,kb->k", pb, entropy_bits(z_b))
        qy = np.einsum("ka,kay->ky", pa, y_a)
        qz = np.einsum("ka,kaz->kz", pa, z_a)
        hy, hz = entropy_bits(qy), entropy_bits(qz)
        hy_ab = np.einsum("ka,ka->k", pa, hy_a)
        hz_ab = np.einsum("ka,ka->k", pa, hz_a)
        r_ch = hy - hy_ab
        eq = (hy_b - hy_ab) - (hz_b - hz_ab)
        ok = (hy - hy_b) <= (hz - hz_b) + FEAS_TOL
        return r_ch, eq, ok

    def witness_fields(self, blocks):
        pb = _clean(blocks[0][0])
        ab = np.apply_along_axis(_clean, 1, blocks[1])
        xa = np.apply_along_axis(_clean, 1, blocks[2])
        x = _clean(pb @ ab @ xa)
        return {
            "x": Pmf(x),
            "b": Pmf(pb),
            "a_given_b": StochasticMatrix(ab),
            "x_given_a": StochasticMatrix(xa),
        }


class _ProductSide:
    """Independent inputs on parallel subchannels; sums of per-subchannel rates."""

    def __init__(self, subchannels):
        self.subs = []
        for ch in subchannels:
            w = ch.tensor
            nx = w.shape[0]
            hy_x, hz_x, hyz_x = _cond_entropies(w)
            self.subs.append((nx, w.sum(axis=2), w.sum(axis=1), w.reshape(nx, -1), hy_x, hz_x, hyz_x))

    def shapes(self):
        return [(1, s[0]) for s in self.subs]

    def candidates(self, config, rng):
        per = max(2, int(config.max_grid ** (1 / len(self.subs))))
        grids = [_x_grid(s[0], config, rng, per) for s in self.subs]
        idx = np.indices([len(g) for g in grids]).reshape(len(grids), -1)
        if idx.shape[1] > config.max_grid:
            idx = idx[:, rng.choice(idx.shape[1], config.max_grid, replace=False)]
        return [g[i][:, None, :] for g, i in zip(grids, idx)]

    def rates(self, blocks):
        cap = 0.0
        eq = 0.0
        for blk, (nx, wy, wz, wyz, hy_x, hz_x, hyz_x) in zip(blocks, self.subs):
            px = blk[:, 0, :]
            i_xy = entropy_bits(px @ wy) - px @ hy_x
            i_xz = entropy_bits(px @ wz) - px @ hz_x
            i_xyz = entropy_bits(px @ wyz) - px @ hyz_x
            cap = cap + i_xy
            eq = eq + (i_xyz - i_xz)
        return cap, eq, np.ones(len(blocks[0]), dtype=bool)

    def witness_fields(self, blocks):
        parts = tuple(Pmf(_clean(b[0])) for b in blocks)
        return {"x": product_pmf(parts), "x_parts": parts}


def _clean(p):
    p = np.clip(np.asarray(p, dtype=float), 0.0, None)
    p[p < 1e-15] = 0.0
    return p / p.sum()


# -- search ------------------------------------------------------------------

_FRONTIERS = OrderedDict()
_FRONTIER_LOCK = threading.Lock()


def source_frontier(p_uv, beta, w_given_v=None, atom_budget=320):
    """Shared, memoized :class:`SourceFrontier` for a source."""
    p_uv = np.ascontiguousarray(p_uv, dtype=float)
    wkey = None if w_given_v is None else np.ascontiguousarray(w_given_v, dtype=float)
    key = (p_uv.shape, p_uv.tobytes(), float(beta),
           None if wkey is None else (wkey.shape, wkey.tobytes()), atom_budget)
    with _FRONTIER_LOCK:
        fr = _FRONTIERS.get(key)
        if fr is not None:
            _FRONTIERS.move_to_end(key)
            return fr
    fr = SourceFrontier(p_uv, beta, w_given_v, atom_budget=atom_budget)
    with _FRONTIER_LOCK:
        _FRONTIERS[key] = fr
        while len(_FRONTIERS) > 256:
            _FRONTIERS.popitem(last=False)
    return fr


def _pick_starts(score, flat, k, min_dist):
    order = np.argsort(-score, kind="stable")
    chosen = []
    for i in order[: max(5000, 50 * k)]:
        if not np.isfinite(score[i]):
            break
        if chosen and np.min(np.max(np.abs(flat[chosen] - flat[i]), axis=1)) < min_dist:
            continue
        chosen.append(int(i))
        if len(chosen) >= k:
            break
    return chosen


@dataclass
class _Found:
    value: float
    blocks: list
    cap: float
    eq: float
    gain: float
    atoms: np.ndarray
    weights: np.ndarray


def frontier_search(frontier, side, config, seed_scores=None):
    """Maximize G(rate) + equivocation over the channel side.

    Returns the best point found and an iteration log. ``seed_scores`` are
    extra screening scores over the same candidate grid; their leaders are
    added as starts.
    """
    rng = np.random.default_rng(config.seed)
    cand = side.candidates(config, rng)
    cap, eq, ok = side.rates(cand)
    rs, gs = frontier.table(config.table_points)

    def g_hat(r):
        return np.interp(r, rs, gs)

    screen = np.where(ok, g_hat(cap) + eq, -np.inf)
    flat = np.concatenate([c.reshape(len(c), -1) for c in cand], axis=1)
    starts = _pick_starts(screen, flat, config.starts, 2 * config.grid_step - 1e-12)
    if seed_scores is not None:
        for s in _pick_starts(seed_scores(cand, g_hat), flat, max(1, config.starts // 4),
                              2 * config.grid_step - 1e-12):
            if s not in starts:
                starts.append(s)
    trace = []

    def objective(blocks):
        c, e, k = side.rates(blocks)
        return np.where(k, g_hat(c) + e, -np.inf)

    def refine(s):
        return compass_search([c[s] for c in cand], objective, config.grid_step / 2,
                              config.refine_tol, config.max_iter)

    refined = []
    for idx, (s, (blocks, val, iters)) in enumerate(zip(starts, pmap(refine, starts))):
        refined.append((val, blocks))
        trace.append({"start": idx, "grid_value": float(screen[s]),
                      "refined_value": float(val), "iterations": int(iters)})
    if not refined:
        raise ModelError("no feasible channel-side candidate (wiretap usability fails everywhere)")
    top = max(v for v, _ in refined)
    best = None
    for idx, (val, blocks) in enumerate(refined):
        if val < top - 1e-3:
            continue
        found = _exact(frontier, side, blocks)
        trace[idx]["exact_value"] = found.value
        if best is None or found.value > best.value + 1e-9:
            best = found
    # sharpen the interpolation table around the chosen rate and re-refine
    for rnd in range(2):
        r0 = best.cap
        span = max(frontier.r_sat, 1e-9)
        extra = [r0 + d * span for d in (-1 / 64, -1 / 512, -1 / 4096, 0, 1 / 4096, 1 / 512, 1 / 64)]
        extra = [r for r in extra if 0 <= r <= frontier.r_sat]
        if not extra:
            break
        rs = np.concatenate([rs, extra])
        gs = np.concatenate([gs, [frontier.coarse_value(r) for r in extra]])
        order = np.argsort(rs, kind="stable")
        rs, gs = rs[order], gs[order]
        blocks, val, iters = compass_search(best.blocks, objective, config.grid_step / 8,
                                            config.refine_tol / 10, config.max_iter)
        found = _exact(frontier, side, blocks)
        trace.append({"start": f"sharpen{rnd}", "refined_value": float(val),
                      "iterations": int(iters), "exact_value": found.value})
        if found.value > best.value + 1e-12:
            best = found
        else:
            break
    return best, trace


def _exact(frontier, side, blocks):
    c, e, _ = side.rates([b[None] for b in blocks])
    cap, eq = float(c[0]), float(e[0])
    gain, atoms, weights = frontier.solve(max(cap, 0.0))
    return _Found(gain + eq, [np.array(b) for b in blocks], cap, eq, gain, atoms, weights)


def build_witness(frontier, side, found, t_card, check):
    """Assemble the witness, shrinking the rate budget until it is feasible.

    ``check(witness)`` returns the constraint slack recomputed from the witness.
    """
    fields = side.witness_fields(found.blocks)
    atoms, weights = found.atoms, found.weights
    margin = 0.0
    for attempt in range(8):
        t = frontier.channel_matrix(atoms, weights, t_card)
        wit = AuxiliaryWitness(StochasticMatrix(t), **fields)
        slack = check(wit)
        if slack >= -1e-10:
            return wit, slack
        margin = max(-slack, margin * 10, 1e-10) * 2
        _, atoms, weights = frontier.solve(max(found.cap - margin, 0.0))
    # fall back to the always-feasible trivial auxiliary
    t = np.zeros((frontier.n_u, t_card))
    t[:, 0] = 1.0
    wit = AuxiliaryWitness(StochasticMatrix(t), **fields)
    return wit, check(wit)


def _result(kind, problem, frontier, side, found, trace, t_card, notes=()):
    beta = problem.beta

    def slack_of(wit):
        q = rate_quantities(problem, wit)
        cap = q.R_ch if kind == "lower_bound" else q.R_ch_plus
        return cap - beta * q.R_wz

    wit, slack = build_witness(frontier, side, found, t_card, slack_of)
    q = rate_quantities(problem, wit)
    if kind == "lower_bound":
        comps = {"R_s": q.R_s, "R_wz": q.R_wz, "R_ch": q.R_ch, "R_eq": q.R_eq_minus}
    else:
        comps = {"R_s": q.R_s, "R_wz": q.R_wz, "R_ch": q.R_ch_plus, "R_eq": q.R_eq_plus}
    value = beta * comps["R_s"] + comps["R_eq"]
    return BoundResult(kind, value, wit, comps, slack, trace, list(notes))


def _restricted_score(side_minus):
    def score(cand, g_hat):
        c, e, _ = side_minus.rates(cand)
        return g_hat(c) + e

    return score


def lower_bound(problem, config=OptimizerConfig()):
    """Achievable key rate beta I(t;v) + R_eq^- subject to beta R_wz <= R_ch.

    Always searches a = x, b = const. With ``config.general`` it also searches
    general auxiliaries b -> a -> x and keeps whichever is larger.
    """
    fr = source_frontier(problem.source.probs, problem.beta, atom_budget=config.atom_budget)
    t_card = problem.source.shape[0] + 1
    side = _InputSide(problem.channel, "difference")
    found, trace = frontier_search(fr, side, config)
    res = _result("lower_bound", problem, fr, side, found, trace, t_card)
    if not config.general:
        return res
    gside = _GeneralSide(problem.channel)
    gfound, gtrace = frontier_search(fr, gside, config)
    gres = _result("lower_bound", problem, fr, gside, gfound, gtrace, t_card, [GENERAL_CAP_NOTE])
    if gres.value > res.value + 1e-12 and wiretap_usable(problem, gres.witness):
        gres.optimizer_trace = [{"search": "restricted", **t} for t in trace] + [
            {"search": "general", **t} for t in gtrace]
        return gres
    res.notes.append(GENERAL_CAP_NOTE)
    res.optimizer_trace = [{"search": "restricted", **t} for t in trace] + [
        {"search": "general", **t} for t in gtrace]
    return res


def upper_bound(problem, config=OptimizerConfig()):
    """Upper bound beta I(t;v) + I(x;y|z) subject to beta R_wz <= I(x;y).

    (x, t) independent, |T| = |U| + 1.
    """
    fr = source_frontier(problem.source.probs, problem.beta, atom_budget=config.atom_budget)
    t_card = problem.source.shape[0] + 1
    side = _InputSide(problem.channel, "conditional")
    seed = _restricted_score(_InputSide(problem.channel, "difference"))
    found, trace = frontier_search(fr, side, config, seed_scores=seed)
    return _result("upper_bound", problem, fr, side, found, trace, t_card)


def degraded_capacity(problem, config=OptimizerConfig()):
    """Key capacity of a reversely degraded product channel.

    ``problem`` is a :class:`DegradedProductProblem`; a list of subchannels
    is also accepted via :func:`degraded_problem`. Inputs on different
    subchannels are independent; the witness stores each law in ``x_parts``.
    """
    if not isinstance(problem, DegradedProductProblem):
        raise ModelError("degraded_capacity needs a DegradedProductProblem", "subchannels")
    fr = source_frontier(problem.source.probs, problem.beta, atom_budget=config.atom_budget)
    t_card = problem.source.shape[0] + 1
    side = _ProductSide(problem.subchannels)
    found, trace = frontier_search(fr, side, config)
    flat = problem.as_discrete()
    res = _result("degraded_capacity", flat, fr, side, found, trace, t_card)
    return res


def degraded_problem(subchannels, source, beta=1.0):
    return DegradedProductProblem(source, tuple(subchannels), beta)


# -- concavity of I(x;y|z) in p(x) --------------------------------------------


def conditional_mi_given_input(channel, px):
    """I(x;y|z) for input law(s) ``px``; batched over leading axes."""
    w = channel.tensor if isinstance(channel, WiretapChannel) else np.asarray(channel)
    px = np.asarray(px, dtype=float)
    _, hz_x, hyz_x = _cond_entropies(w)
    nx = w.shape[0]
    i_xyz = entropy_bits(px @ w.reshape(nx, -1)) - px @ hyz_x
    i_xz = entropy_bits(px @ w.sum(axis=1)) - px @ hz_x
    return i_xyz - i_xz


def mixture_concavity_gap(channel, p1, p2, lam):
    """I at the mixture minus the mixture of I's; concavity means >= 0."""
    p1, p2 = np.asarray(p1, dtype=float), np.asarray(p2, dtype=float)
    mid = lam * p1 + (1 - lam) * p2
    f = conditional_mi_given_input
    return float(f(channel, mid) - lam * f(channel, p1) - (1 - lam) * f(channel, p2))
