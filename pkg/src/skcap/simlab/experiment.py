"""Seeded Monte Carlo runs of the key-agreement scheme."""

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from ..errors import StateSpaceTooLarge
from ..parallel import pmap
from .codebook import build_codebooks
from .coding import (
    decode_receiver,
    eaves_decode_given_key,
    eaves_decode_unrestricted,
    encode_index,
    transmit,
)
from .equivocation import exact_equivocation

COUNTERS = ("key_error", "E1", "E2", "E3", "eaves_given_key_fail", "eaves_unrestricted_fail")


def binomial_ci(k, n, level=0.95):
    """Exact (Clopper-Pearson) interval; (0, 1) when there are no trials."""
    if n == 0:
        return 0.0, 1.0
    ci = binomtest(int(k), int(n)).proportion_ci(confidence_level=level, method="exact")
    return float(ci.low), float(ci.high)


@dataclass
class SimReport:
    """Event counts and rates from ``trials`` independent runs.

    ``equivocation_bits`` and ``key_entropy_bits`` are exact values for the
    base codebook and are None unless exhaustive mode was requested and the
    state space fit the guard.
    """

    trials: int
    counts: dict
    params: dict
    seed: int
    equivocation_bits: float = None
    key_entropy_bits: float = None
    notes: list = field(default_factory=list)

    def rate(self, name):
        return self.counts[name] / self.trials if self.trials else 0.0

    def ci(self, name):
        return binomial_ci(self.counts[name], self.trials)

    @property
    def key_error_rate(self):
        return self.rate("key_error")

    @property
    def encoder_failure_rate(self):
        return self.rate("E1")

    @property
    def channel_decode_error(self):
        return self.rate("E2")

    @property
    def bin_decode_error(self):
        return self.rate("E3")

    @property
    def eaves_decode_given_key_error(self):
        return self.rate("eaves_given_key_fail")

    @property
    def eaves_decode_unrestricted_error(self):
        return self.rate("eaves_unrestricted_fail")

    def union_bound_holds(self):
        """key error <= P(E1) + P(E2) + P(E3), with the key-error CI as slack."""
        lo, _ = self.ci("key_error")
        return lo <= self.encoder_failure_rate + self.channel_decode_error + self.bin_decode_error

    def to_json(self):
        rates = {}
        for name in COUNTERS:
            lo, hi = self.ci(name)
            rates[name] = {"count": self.counts[name], "rate": self.rate(name), "ci95": [lo, hi]}
        return {
            "trials": self.trials,
            "seed": self.seed,
            "events": rates,
            "key_error_rate": self.key_error_rate,
            "encoder_failure_rate": self.encoder_failure_rate,
            "channel_decode_error": self.channel_decode_error,
            "bin_decode_error": self.bin_decode_error,
            "eaves_decode_given_key_error": self.eaves_decode_given_key_error,
            "eaves_decode_unrestricted_error": self.eaves_decode_unrestricted_error,
            "equivocation_bits": self.equivocation_bits,
            "key_entropy_bits": self.key_entropy_bits,
            "params": self.params,
            "notes": list(self.notes),
        }


def _trial_rng(seed, trial):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _sample_source(rng, p_uv, N):
    nv = p_uv.shape[1]
    cdf = np.cumsum(p_uv.ravel())
    idx = np.minimum(np.searchsorted(cdf, rng.random(N), side="right"), cdf.size - 1)
    return idx // nv, idx % nv


def _sample_channel(rng, w, x):
    nz = w.shape[2]
    cdf = np.cumsum(w.reshape(w.shape[0], -1), axis=1)
    r = rng.random(x.size)
    idx = np.minimum((r[:, None] >= cdf[x]).sum(axis=1), cdf.shape[1] - 1)
    return idx // nz, idx % nz


def run_trial(cb, problem, rng):
    """One source block through the scheme; returns the set of events that occurred."""
    p = cb.params
    u, v = _sample_source(rng, problem.source.probs, p.N)
    i = encode_index(cb, u)
    events = set()
    if i < 0:
        events.add("E1")
        i = 0  # transmit something; the key is still counted as failed below
    sent = transmit(cb, i)
    y, z = _sample_channel(rng, problem.channel.tensor, sent.x)
    dec = decode_receiver(cb, y, v)
    if dec.failure == "E2" or dec.phi != sent.phi:
        events.add("E2")
    elif dec.index != i:
        events.add("E3")
    if dec.key != sent.key or "E1" in events:
        events.add("key_error")
    if eaves_decode_given_key(cb, z, sent.key) != i:
        events.add("eaves_given_key_fail")
    if eaves_decode_unrestricted(cb, z) != i:
        events.add("eaves_unrestricted_fail")
    return events


def run_experiment(problem, witness, params, trials, seed=0, exhaustive=False,
                   redraw_codebook=True):
    """Monte Carlo estimate of every error event.

    Trial ``j`` draws from its own Philox substream keyed by (seed, j), so
    results do not depend on execution order. With ``redraw_codebook`` each
    trial also draws fresh codebooks (the random-coding average); otherwise
    all trials share the base codebook built from ``seed``.
    """
    counts = dict.fromkeys(COUNTERS, 0)
    base = build_codebooks(problem, witness, params, np.random.SeedSequence(seed))

    def chunk(js):
        local = dict.fromkeys(COUNTERS, 0)
        for j in js:
            rng = _trial_rng(seed, j)
            cb = build_codebooks(problem, witness, params, rng) if redraw_codebook else base
            for name in run_trial(cb, problem, rng):
                local[name] += 1
        return local

    for local in pmap(chunk, [range(s, min(s + 256, trials)) for s in range(0, trials, 256)]):
        for name, c in local.items():
            counts[name] += c
    report = SimReport(trials, counts, params.to_json(), int(seed))
    report.params["redraw_codebook"] = bool(redraw_codebook)
    if exhaustive:
        try:
            h_k, h_kz = exact_equivocation(base, problem, witness)
            report.key_entropy_bits = h_k
            report.equivocation_bits = h_kz
        except StateSpaceTooLarge as exc:
            report.notes.append(str(exc))
    return report
