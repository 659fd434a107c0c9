"""Source and channel models shared by the bound, extension and simulator code."""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import ModelError
from .probkit import JointPmf, StochasticMatrix

STRUCTURES = ("degraded", "reversed", "independent")


def _matrix(m, name):
    if isinstance(m, StochasticMatrix):
        return m
    try:
        return StochasticMatrix(np.asarray(m, dtype=float))
    except ModelError as exc:
        raise ModelError(f"{name}: {exc}", name) from None


@dataclass(frozen=True, eq=False)
class WiretapChannel:
    """Broadcast channel p(y, z | x) stored as an (|X|, |Y|, |Z|) tensor.

    ``structure`` records a factorization declared at construction:

    ``"degraded"``     x -> y -> z, built from p(y|x) and p(z|y)
    ``"reversed"``     x -> z -> y, built from p(z|x) and p(y|z)
    ``"independent"``  y <- x -> z, built from p(y|x) and p(z|x)

    A channel given only as a joint tensor has ``structure=None``; it is never
    inferred from the numbers.
    """

    matrix: StochasticMatrix
    structure: str = None
    factors: tuple = ()

    def __post_init__(self):
        if self.matrix.array.ndim != 3:
            raise ModelError(f"wiretap channel must be a 3-axis tensor, got {self.matrix.array.shape}")
        if self.structure is not None and self.structure not in STRUCTURES:
            raise ModelError(f"unknown channel structure {self.structure!r}")

    @classmethod
    def from_joint(cls, tensor):
        return cls(_matrix(tensor, "channel"))

    @classmethod
    def degraded(cls, y_given_x, z_given_y):
        yx, zy = _matrix(y_given_x, "y_given_x"), _matrix(z_given_y, "z_given_y")
        if yx.array.shape[1] != zy.n_in:
            raise ModelError("z_given_y must have one row per output of y_given_x", "z_given_y")
        t = yx.array[:, :, None] * zy.array[None, :, :]
        return cls(StochasticMatrix(t), "degraded", (yx, zy))

    @classmethod
    def reversed(cls, z_given_x, y_given_z):
        zx, yz = _matrix(z_given_x, "z_given_x"), _matrix(y_given_z, "y_given_z")
        if zx.array.shape[1] != yz.n_in:
            raise ModelError("y_given_z must have one row per output of z_given_x", "y_given_z")
        t = zx.array[:, None, :] * yz.array.T[None, :, :]
        return cls(StochasticMatrix(t), "reversed", (zx, yz))

    @classmethod
    def independent(cls, y_given_x, z_given_x):
        yx, zx = _matrix(y_given_x, "y_given_x"), _matrix(z_given_x, "z_given_x")
        if yx.n_in != zx.n_in:
            raise ModelError("y_given_x and z_given_x need the same input alphabet", "z_given_x")
        t = yx.array[:, :, None] * zx.array[:, None, :]
        return cls(StochasticMatrix(t), "independent", (yx, zx))

    @property
    def tensor(self):
        return self.matrix.array

    @property
    def shape(self):
        return self.tensor.shape

    @property
    def y_given_x(self):
        return self.tensor.sum(axis=2)

    @property
    def z_given_x(self):
        return self.tensor.sum(axis=1)


def product_channel(channels):
    """Parallel independent use of several wiretap channels.

    Input, receiver and eavesdropper alphabets are the Cartesian products of the
    per-subchannel alphabets in row-major order (subchannel 0 most significant).
    """
    t = np.ones((1, 1, 1))
    for ch in channels:
        c = ch.tensor
        t = np.einsum("abc,xyz->axbycz", t, c).reshape(
            t.shape[0] * c.shape[0], t.shape[1] * c.shape[1], t.shape[2] * c.shape[2]
        )
    return WiretapChannel(StochasticMatrix(t))


def _check_beta(beta):
    try:
        beta = float(beta)
    except (TypeError, ValueError):
        raise ModelError("beta must be a number", "beta") from None
    if not (beta > 0 and math.isfinite(beta)):
        raise ModelError(f"beta must be positive and finite, got {beta}", "beta")
    return beta


def _check_source(source):
    if not isinstance(source, JointPmf):
        source = JointPmf(np.asarray(source, dtype=float), ("u", "v"))
    if source.probs.ndim != 2:
        raise ModelError(f"source must be a joint law over (u, v), got {source.probs.ndim} axes",
                         "source")
    return source


@dataclass(frozen=True, eq=False)
class DiscreteProblem:
    """Correlated source p(u, v), wiretap channel p(y, z | x) and bandwidth factor beta."""

    source: JointPmf
    channel: WiretapChannel
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "source", _check_source(self.source))
        if not isinstance(self.channel, WiretapChannel):
            object.__setattr__(self, "channel", WiretapChannel.from_joint(self.channel))
        object.__setattr__(self, "beta", _check_beta(self.beta))

    @property
    def p_u(self):
        return self.source.probs.sum(axis=1)

    @property
    def p_v(self):
        return self.source.probs.sum(axis=0)


@dataclass(frozen=True, eq=False)
class SideInfoProblem:
    """Problem whose eavesdropper also sees w, a degraded copy of v.

    The channel must be declared ``"degraded"`` (x -> y -> z).
    """

    source: JointPmf
    w_given_v: StochasticMatrix
    channel: WiretapChannel
    beta: float = 1.0

    def __post_init__(self):
        source = _check_source(self.source)
        object.__setattr__(self, "source", source)
        wv = _matrix(self.w_given_v, "w_given_v")
        if wv.n_in != source.shape[1] or wv.array.ndim != 2:
            raise ModelError("w_given_v needs one row per v symbol", "w_given_v")
        object.__setattr__(self, "w_given_v", wv)
        if not isinstance(self.channel, WiretapChannel) or self.channel.structure != "degraded":
            raise ModelError(
                "side-information capacity needs a channel declared as y_given_x then z_given_y",
                "z_given_y",
            )
        object.__setattr__(self, "beta", _check_beta(self.beta))

    def without_side_information(self):
        return DiscreteProblem(self.source, self.channel, self.beta)


@dataclass(frozen=True, eq=False)
class DegradedProductProblem:
    """Source plus a list of parallel subchannels, each declared degraded one way."""

    source: JointPmf
    subchannels: tuple = field(default_factory=tuple)
    beta: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "source", _check_source(self.source))
        subs = tuple(self.subchannels)
        if not subs:
            raise ModelError("need at least one subchannel", "subchannels")
        for i, ch in enumerate(subs):
            if not isinstance(ch, WiretapChannel) or ch.structure not in ("degraded", "reversed"):
                raise ModelError(
                    f"subchannel {i} is not given in a degraded factored form",
                    f"subchannels[{i}]",
                )
        object.__setattr__(self, "subchannels", subs)
        object.__setattr__(self, "beta", _check_beta(self.beta))

    def as_discrete(self):
        """The same instance as one product channel (joint input alphabet)."""
        return DiscreteProblem(self.source, product_channel(self.subchannels), self.beta)
