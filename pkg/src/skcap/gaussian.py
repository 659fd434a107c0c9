"""Gaussian parallel wiretap channels with a jointly Gaussian source.

The source is u ~ N(0, 1) with receiver observation v = u + s, s ~ N(0, S).
Subchannel i is described by the effective noise variances seen by the
receiver and the eavesdropper (gains are folded in as sigma^2 / a^2). For a
power split P_i and quantization distortion D, the key rate is

    beta/2 log2((1 + S)/(D + S)) + sum_{sigma_r <= sigma_e} 1/2 log2((1 + P_i/sr)/(1 + P_i/se))

with D the smallest value the channel rate sum_i 1/2 log2(1 + P_i/sr) can
carry through the Wyner-Ziv code.
"""

from dataclasses import dataclass, field
import csv
import io
import math

import numpy as np

from .errors import ModelError, UsageError
from .optim import golden_section, simplex_grid


@dataclass(frozen=True)
class Subchannel:
    sigma_r_sq: float
    sigma_e_sq: float


@dataclass(frozen=True)
class GaussianParallelModel:
    """Parallel Gaussian wiretap channels plus the Gaussian source."""

    subchannels: tuple
    power: float
    S: float
    beta: float = 1.0

    def __post_init__(self):
        subs = []
        for i, sc in enumerate(self.subchannels):
            if not isinstance(sc, Subchannel):
                sc = Subchannel(*sc)
            for name in ("sigma_r_sq", "sigma_e_sq"):
                val = getattr(sc, name)
                if not (val > 0):
                    raise ModelError(f"subchannels[{i}].{name} must be positive",
                                     f"subchannels[{i}].{name}")
            subs.append(Subchannel(float(sc.sigma_r_sq), float(sc.sigma_e_sq)))
        if not subs:
            raise ModelError("need at least one subchannel", "subchannels")
        object.__setattr__(self, "subchannels", tuple(subs))
        if not (self.power >= 0 and math.isfinite(self.power)):
            raise ModelError("power must be finite and >= 0", "power")
        if not (self.S > 0):
            raise ModelError("S must be positive", "S")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ModelError("beta must be positive and finite", "beta")

    @classmethod
    def from_gains(cls, gains_r, gains_e, power, S, beta=1.0, noise_r=1.0, noise_e=1.0):
        """Build from y_i = a_i x_i + n_i, z_i = b_i x_i + n'_i (b_i = 0 allowed)."""
        subs = []
        for a, b in zip(gains_r, gains_e):
            se = math.inf if b == 0 else noise_e / b**2
            subs.append(Subchannel(noise_r / a**2, se))
        return cls(tuple(subs), power, S, beta)

    @property
    def sr(self):
        return np.array([s.sigma_r_sq for s in self.subchannels])

    @property
    def se(self):
        return np.array([s.sigma_e_sq for s in self.subchannels])

    @property
    def forward(self):
        """Subchannels where the receiver is at least as good as the eavesdropper."""
        return self.sr <= self.se


@dataclass(frozen=True)
class GaussianAllocation:
    powers: tuple
    D: float


def worked_example_model():
    """Two unit-noise subchannels with gains (1, 2) to the receiver and
    (0.5, 2) to the eavesdropper; P = 1, S = 1, beta = 1."""
    return GaussianParallelModel.from_gains((1.0, 2.0), (0.5, 2.0), 1.0, 1.0, 1.0)


def _powers(model, powers):
    p = np.asarray(powers, dtype=float)
    if p.shape[-1] != len(model.subchannels):
        raise UsageError(f"need {len(model.subchannels)} powers, got {p.shape[-1]}")
    if np.any(p < 0):
        raise UsageError("powers must be >= 0")
    return p


def channel_rate(model, powers):
    """sum_i 1/2 log2(1 + P_i / sigma_r_i^2); batched over leading axes."""
    p = _powers(model, powers)
    return 0.5 * np.log2(1 + p / model.sr).sum(axis=-1)


def equivocation(model, powers):
    """Channel equivocation term, summed over forward subchannels only."""
    p = _powers(model, powers)
    se = np.where(np.isinf(model.se), np.inf, model.se)
    term = 0.5 * (np.log2(1 + p / model.sr) - np.log2(1 + p / se))
    return np.where(model.forward, term, 0.0).sum(axis=-1)


def wz_rate(D, S):
    """Wyner-Ziv rate 1/2 log2(1/D) - 1/2 log2((1+S)/(D+S)) per source symbol."""
    D = np.asarray(D, dtype=float)
    return 0.5 * np.log2((D + S) / (D * (1 + S)))


def source_term(model, D):
    return model.beta * 0.5 * np.log2((1 + model.S) / (np.asarray(D) + model.S))


def distortion_for_rate(rate, S, beta):
    """Smallest D in (0, 1] with beta * wz_rate(D) <= rate (closed form)."""
    rate = np.asarray(rate, dtype=float)
    c = np.exp2(2 * rate / beta)
    d = S / ((1 + S) * c - 1)
    return np.minimum(d, 1.0)


def solve_distortion(model, powers):
    """Distortion at which the Wyner-Ziv rate exactly uses the channel rate."""
    return distortion_for_rate(channel_rate(model, powers), model.S, model.beta)


def gaussian_objective(model, alloc):
    """Key rate for an allocation (``GaussianAllocation`` or (powers, D))."""
    if isinstance(alloc, GaussianAllocation):
        powers, D = alloc.powers, alloc.D
    else:
        powers, D = alloc
    if not 0 < D <= 1:
        raise UsageError(f"D must be in (0, 1], got {D}")
    return float(source_term(model, D) + equivocation(model, powers))


def _key_rate(model, powers):
    return source_term(model, solve_distortion(model, powers)) + equivocation(model, powers)


@dataclass
class GaussianResult:
    value: float
    allocation: GaussianAllocation
    plateau: list = field(default_factory=list)
    grid_value: float = 0.0

    def to_json(self):
        return {
            "value": self.value,
            "powers": list(self.allocation.powers),
            "D": self.allocation.D,
            "grid_value": self.grid_value,
            "plateau": [list(p) for p in self.plateau],
        }


def gaussian_capacity(model, grid=64, tol=1e-6, plateau_tol=1e-4):
    """Maximize the key rate over power splits that use the full budget.

    A simplex grid of step P/grid is refined by golden-section search on
    pairwise power transfers. ``plateau`` lists every grid split within
    ``plateau_tol`` of the grid maximum.
    """
    m = len(model.subchannels)
    P = model.power
    pts = simplex_grid(m, grid) * P
    vals = _key_rate(model, pts)
    k = int(np.argmax(vals))
    grid_best = float(vals[k])
    plateau = [tuple(float(x) for x in pts[i]) for i in np.flatnonzero(vals >= grid_best - plateau_tol)]
    best = pts[k].copy()
    value = grid_best
    width = P / grid
    if m > 1 and P > 0:
        for _ in range(50):
            improved = False
            for i in range(m):
                for j in range(m):
                    if i == j:
                        continue
                    lo = -min(width, best[i])
                    hi = min(width, best[j])
                    if hi - lo <= tol:
                        continue

                    def f(s, i=i, j=j):
                        p = best.copy()
                        p[i] += s
                        p[j] -= s
                        return float(_key_rate(model, np.clip(p, 0, None)))

                    s, v = golden_section(f, lo, hi, tol)
                    if v > value + 1e-15:
                        best[i] += s
                        best[j] -= s
                        best = np.clip(best, 0, None)
                        value = v
                        improved = True
            if not improved:
                break
    D = float(solve_distortion(model, best))
    alloc = GaussianAllocation(tuple(float(x) for x in best), D)
    return GaussianResult(float(gaussian_objective(model, alloc)), alloc, plateau, grid_best)


# -- curves ------------------------------------------------------------------


@dataclass
class CurveTable:
    columns: tuple
    rows: np.ndarray

    def column(self, name):
        return self.rows[:, self.columns.index(name)]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([repr(float(x)) for x in r])
        return buf.getvalue()


def _splits(model, sweep_grid):
    if len(model.subchannels) != 2:
        raise UsageError("curves sweep the split between exactly two subchannels")
    if sweep_grid is None:
        sweep_grid = 1001
    if np.isscalar(sweep_grid):
        s = np.linspace(0.0, model.power, int(sweep_grid))
    else:
        s = np.asarray(sweep_grid, dtype=float)
    if np.any(s < 0) or np.any(s > model.power + 1e-12):
        raise UsageError("split values must lie in [0, power]")
    return s, np.stack([s, model.power - s], axis=1).clip(0, None)


def tradeoff_curve(model, sweep_grid=None):
    """Columns split, R_eq, R_src, R_key; split is the power on subchannel 1.

    ``sweep_grid`` is a number of evenly spaced splits or explicit values.
    """
    s, powers = _splits(model, sweep_grid)
    r_eq = equivocation(model, powers)
    r_src = source_term(model, solve_distortion(model, powers))
    return CurveTable(("split", "R_eq", "R_src", "R_key"),
                      np.stack([s, r_eq, r_src, r_eq + r_src], axis=1))


def discussion_source_rate(model):
    """beta I(u;v) = beta/2 log2(1 + 1/S) for the Gaussian source."""
    return model.beta * 0.5 * math.log2(1 + 1 / model.S)


def discussion_curve(model, sweep_grid=None):
    """Columns split, R_chan, R_src_const, R_sum.

    With public discussion the source contributes beta I(u;v) no matter how
    the channel is used.
    """
    s, powers = _splits(model, sweep_grid)
    r_ch = equivocation(model, powers)
    const = np.full_like(s, discussion_source_rate(model))
    return CurveTable(("split", "R_chan", "R_src_const", "R_sum"),
                      np.stack([s, r_ch, const, r_ch + const], axis=1))


def model_from_json(doc):
    if not isinstance(doc, dict):
        raise ModelError("model must be an object", "model")
    for key in ("subchannels", "power", "S"):
        if key not in doc:
            raise ModelError(f"{key} is missing", key)
    subs = doc["subchannels"]
    if not isinstance(subs, list):
        raise ModelError("subchannels must be a list", "subchannels")
    parsed = []
    for i, sc in enumerate(subs):
        if not isinstance(sc, dict):
            raise ModelError(f"subchannels[{i}] must be an object", f"subchannels[{i}]")
        vals = []
        for name in ("sigma_r_sq", "sigma_e_sq"):
            v = sc.get(name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ModelError(f"subchannels[{i}].{name} must be a number",
                                 f"subchannels[{i}].{name}")
            vals.append(float(v))
        parsed.append(Subchannel(*vals))
    for key in ("power", "S", "beta"):
        v = doc.get(key, 1.0)
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ModelError(f"{key} must be a number", key)
    return GaussianParallelModel(tuple(parsed), float(doc["power"]), float(doc["S"]),
                                 float(doc.get("beta", 1.0)))
