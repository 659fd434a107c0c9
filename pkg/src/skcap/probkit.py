"""Finite-alphabet distributions and information measures.

All quantities are in bits. Probabilities below ``ZERO_TOL`` count as exact
zeros inside logarithms, so ``0 log 0 = 0``.

The public functions work on the validated containers :class:`Pmf`,
:class:`JointPmf` and :class:`StochasticMatrix`. The optimizers need the
same measures over thousands of candidate distributions at once; they use the
batched helpers :func:`entropy_bits` and :func:`marginal_entropy`, which take
raw arrays whose leading axis indexes the batch.
"""

from dataclasses import dataclass
from itertools import product as _product
import math

import numpy as np

from .errors import ModelError, UsageError

MASS_TOL = 1e-12
ZERO_TOL = 1e-15


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Pmf:
    """Probability vector over a finite alphabet."""

    probs: np.ndarray

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim != 1 or p.size == 0:
            raise ModelError(f"pmf must be a non-empty vector, got shape {p.shape}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ModelError("pmf has negative or non-finite entries")
        if abs(p.sum() - 1.0) > MASS_TOL:
            raise ModelError(f"pmf mass is {p.sum():.15g}, expected 1")
        object.__setattr__(self, "probs", p)

    @classmethod
    def uniform(cls, k):
        return cls(np.full(k, 1.0 / k))

    @classmethod
    def point(cls, k, i):
        p = np.zeros(k)
        p[i] = 1.0
        return cls(p)

    def __len__(self):
        return self.probs.size


@dataclass(frozen=True, eq=False)
class JointPmf:
    """Dense joint law over several named finite alphabets."""

    probs: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        p = _frozen(self.probs)
        if p.ndim < 1:
            raise ModelError("joint pmf needs at least one axis")
        labels = tuple(self.labels) or tuple(f"x{i}" for i in range(p.ndim))
        if len(labels) != p.ndim:
            raise ModelError(f"{len(labels)} labels for {p.ndim} axes")
        if len(set(labels)) != len(labels):
            raise ModelError(f"duplicate axis labels {labels}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ModelError("joint pmf has negative or non-finite entries")
        if abs(p.sum() - 1.0) > MASS_TOL:
            raise ModelError(f"joint pmf mass is {p.sum():.15g}, expected 1")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "labels", labels)

    @property
    def shape(self):
        return self.probs.shape

    def axis(self, a):
        if isinstance(a, str):
            try:
                return self.labels.index(a)
            except ValueError:
                raise UsageError(f"unknown axis {a!r}; have {self.labels}") from None
        a = int(a)
        if not -self.probs.ndim <= a < self.probs.ndim:
            raise UsageError(f"axis {a} out of range for {self.probs.ndim} axes")
        return a % self.probs.ndim

    def axes(self, spec):
        if isinstance(spec, (str, int, np.integer)):
            spec = (spec,)
        return tuple(sorted({self.axis(a) for a in spec}))

    def marginal(self, keep):
        keep = self.axes(keep)
        drop = tuple(i for i in range(self.probs.ndim) if i not in keep)
        return JointPmf(self.probs.sum(axis=drop), tuple(self.labels[i] for i in keep))

    def pmf(self, axis):
        """Marginal of a single axis as a :class:`Pmf`."""
        return Pmf(self.marginal(axis).probs)


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Conditional law p(out | in).

    ``array[i]`` is the output distribution for input symbol ``i``; it may
    have several axes (a wiretap channel p(y, z | x) has shape (|X|, |Y|, |Z|)).
    """

    array: np.ndarray

    def __post_init__(self):
        a = _frozen(self.array)
        if a.ndim < 2:
            raise ModelError(f"stochastic matrix needs >= 2 axes, got shape {a.shape}")
        if np.any(a < 0) or not np.all(np.isfinite(a)):
            raise ModelError("stochastic matrix has negative or non-finite entries")
        sums = a.reshape(a.shape[0], -1).sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > MASS_TOL)
        if bad.size:
            raise ModelError(f"row {bad[0]} of stochastic matrix sums to {sums[bad[0]]:.15g}")
        object.__setattr__(self, "array", a)

    @property
    def n_in(self):
        return self.array.shape[0]

    @property
    def out_shape(self):
        return self.array.shape[1:]

    @classmethod
    def identity(cls, k):
        return cls(np.eye(k))

    def then(self, other):
        """Cascade with a 2-axis matrix acting on the (single) output axis."""
        if len(self.out_shape) != 1 or other.array.ndim != 2:
            raise UsageError("cascade needs single-axis output and a 2-axis follower")
        if self.out_shape[0] != other.n_in:
            raise UsageError(f"cannot cascade {self.array.shape} with {other.array.shape}")
        return StochasticMatrix(self.array @ other.array)


def _as_probs(p):
    if isinstance(p, (Pmf, JointPmf)):
        return p.probs
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > MASS_TOL:
        raise ModelError(f"not a probability vector (mass {p.sum():.15g})")
    return p


def entropy_bits(p, axis=-1):
    """Entropy along ``axis`` of an array of (possibly unnormalized) masses."""
    p = np.asarray(p, dtype=float)
    safe = np.where(p > ZERO_TOL, p, 1.0)
    return -np.sum(np.where(p > ZERO_TOL, p * np.log2(safe), 0.0), axis=axis)


def marginal_entropy(batch, keep):
    """Joint entropy of the axes ``keep`` for a batch of joint laws.

    ``batch`` has shape (K, d1, d2, ...); ``keep`` indexes the data axes
    (0 is d1). Returns an array of K entropies.
    """
    batch = np.asarray(batch)
    nd = batch.ndim - 1
    drop = tuple(1 + i for i in range(nd) if i not in keep)
    m = batch.sum(axis=drop) if drop else batch
    return entropy_bits(m.reshape(m.shape[0], -1))


def entropy(p):
    """Shannon entropy in bits of a pmf (or joint pmf, over all its cells)."""
    return max(0.0, float(entropy_bits(_as_probs(p).ravel())))


def _joint_entropy(j, axes):
    if not axes:
        return 0.0
    return entropy(j.marginal(axes).probs)


def mutual_information(j, axes_a, axes_b):
    """I(A; B) in bits between two disjoint groups of axes of ``j``."""
    a, b = j.axes(axes_a), j.axes(axes_b)
    if set(a) & set(b):
        raise UsageError(f"axis groups overlap: {a} and {b}")
    if not a or not b:
        raise UsageError("axis groups must be non-empty")
    val = _joint_entropy(j, a) + _joint_entropy(j, b) - _joint_entropy(j, a + b)
    return max(0.0, val) if val > -1e-12 else val


def conditional_mutual_information(j, axes_a, axes_b, axes_c):
    """I(A; B | C) in bits. An empty ``axes_c`` reduces to I(A; B)."""
    a, b, c = j.axes(axes_a), j.axes(axes_b), j.axes(axes_c) if axes_c != () else ()
    if set(a) & set(b) or set(a) & set(c) or set(b) & set(c):
        raise UsageError(f"axis groups must be disjoint: {a}, {b}, {c}")
    if not c:
        return mutual_information(j, a, b)
    val = (
        _joint_entropy(j, a + c)
        + _joint_entropy(j, b + c)
        - _joint_entropy(j, a + b + c)
        - _joint_entropy(j, c)
    )
    return max(0.0, val) if val > -1e-12 else val


def compose(source, chain, labels=()):
    """Joint law of a Markov chain x0 -> x1 -> ... built from conditionals.

    Each link conditions on the last axis produced so far. A link with a
    multi-axis output (a wiretap channel) contributes all of its axes and can
    only be the final link.
    """
    probs = _as_probs(source)
    if probs.ndim != 1:
        raise UsageError("compose needs a single-axis source")
    joint = probs
    for pos, link in enumerate(chain):
        if not isinstance(link, StochasticMatrix):
            link = StochasticMatrix(link)
        if joint.shape[-1] != link.n_in:
            raise UsageError(
                f"link {pos} expects {link.n_in} input symbols, previous axis has {joint.shape[-1]}"
            )
        if pos < len(chain) - 1 and len(link.out_shape) != 1:
            raise UsageError("only the last link may have a multi-axis output")
        expand = joint.reshape(joint.shape + (1,) * len(link.out_shape))
        joint = expand * link.array.reshape((1,) * (joint.ndim - 1) + link.array.shape)
    return JointPmf(joint / joint.sum(), labels)


def product_pmf(parts):
    """Independent product of several pmfs, flattened in row-major order."""
    out = np.ones(1)
    for p in parts:
        out = np.outer(out, _as_probs(p)).ravel()
    return Pmf(out / out.sum())


def binary_entropy(p):
    return entropy([p, 1.0 - p])


# JSON ----------------------------------------------------------------------


def joint_from_json(doc, field="distribution"):
    """Parse ``{"alphabets": {"u": 2, "v": 2}, "probs": [...]}``."""
    if not isinstance(doc, dict):
        raise ModelError(f"{field} must be an object", field)
    if "alphabets" not in doc:
        raise ModelError(f"{field}.alphabets is missing", f"{field}.alphabets")
    if "probs" not in doc:
        raise ModelError(f"{field}.probs is missing", f"{field}.probs")
    alph = doc["alphabets"]
    if not isinstance(alph, dict) or not alph:
        raise ModelError(f"{field}.alphabets must be a non-empty object", f"{field}.alphabets")
    sizes = []
    for name, k in alph.items():
        if not isinstance(k, int) or k < 1:
            raise ModelError(f"{field}.alphabets.{name} must be a positive integer",
                             f"{field}.alphabets.{name}")
        sizes.append(k)
    try:
        flat = np.asarray(doc["probs"], dtype=float)
    except (TypeError, ValueError):
        raise ModelError(f"{field}.probs must be numeric", f"{field}.probs") from None
    if flat.ndim != 1 or flat.size != math.prod(sizes):
        raise ModelError(
            f"{field}.probs needs {math.prod(sizes)} entries, got {flat.size}", f"{field}.probs"
        )
    try:
        return JointPmf(flat.reshape(sizes), tuple(alph))
    except ModelError as exc:
        raise ModelError(f"{field}.probs: {exc}", f"{field}.probs") from None


def joint_to_json(j):
    return {
        "alphabets": {lab: int(k) for lab, k in zip(j.labels, j.shape)},
        "probs": [float(x) for x in j.probs.ravel()],
    }


def matrix_from_json(rows, field):
    try:
        a = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        raise ModelError(f"{field} must be a numeric matrix", field) from None
    try:
        return StochasticMatrix(a)
    except ModelError as exc:
        raise ModelError(f"{field}: {exc}", field) from None


def all_sequences(k, n):
    """Every length-n sequence over range(k), lexicographic, as an int array."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(_product(range(k), repeat=n)), dtype=np.int64)
