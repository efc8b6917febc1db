"""Discrete probability distributions and a seeded pair generator.

Random pairs come from numpy's PCG64 bit generator.  Pair ``index`` of a
sampler with seed ``s`` is drawn from ``SeedSequence(entropy=s,
spawn_key=(index,))``, so any single pair can be regenerated on its own
and corpora can be produced in parallel without coordination.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import (
    DimensionMismatch,
    RejectAllZero,
    RejectLength,
    RejectNonFinite,
    RejectNonPositive,
    RejectSum,
    RejectZeroWithNoSmoothing,
)

SUM_TOLERANCE = 1e-9
MIN_GENERATED_WEIGHT = 1e-12
ADVERSARIAL_FRACTION = 0.25


def _unit_mass(w):
    """Scale ``w`` in place until its correctly rounded sum is exactly 1."""
    w /= math.fsum(w)
    for _ in range(8):
        residual = 1.0 - math.fsum(w)
        if residual == 0.0:
            break
        w[np.argmax(w)] += residual
    return w


@dataclass(frozen=True, eq=False)
class ProbabilityDistribution:
    """A point of the open probability simplex with ``n >= 2`` atoms.

    Build instances with :func:`make_distribution` or :func:`normalize`;
    the weights array is read-only.
    """

    weights: np.ndarray

    @property
    def n(self):
        return self.weights.shape[0]

    def __len__(self):
        return self.n

    def __iter__(self):
        return iter(self.weights.tolist())

    def __eq__(self, other):
        if not isinstance(other, ProbabilityDistribution):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash(self.weights.tobytes())

    def __repr__(self):
        return f"ProbabilityDistribution({self.weights.tolist()!r})"


def _freeze(w):
    w.setflags(write=False)
    return ProbabilityDistribution(w)


def _as_float_array(weights):
    w = np.array(weights, dtype=float).ravel()
    if w.shape[0] < 2:
        raise RejectLength(f"need at least 2 atoms, got {w.shape[0]}")
    bad = np.flatnonzero(~np.isfinite(w))
    if bad.size:
        i = int(bad[0])
        raise RejectNonFinite(f"atom {i} is not finite ({w[i]!r})", index=i)
    return w


def make_distribution(weights, rescale=False):
    """Validate ``weights`` and return them as a distribution.

    Every weight must be strictly positive.  Unless ``rescale`` is set the
    weights must already sum to 1 within ``SUM_TOLERANCE``; either way the
    stored weights are renormalized so their exact sum rounds to 1.
    """
    if isinstance(weights, ProbabilityDistribution):
        return weights
    w = _as_float_array(weights)
    bad = np.flatnonzero(w <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise RejectNonPositive(f"atom {i} is not positive ({w[i]!r})", index=i)
    total = math.fsum(w)
    if not rescale and abs(total - 1.0) > SUM_TOLERANCE:
        raise RejectSum(f"weights sum to {total!r}, not 1")
    if total != 1.0:
        w = _unit_mass(w)
    return _freeze(w)


def normalize(weights, smoothing_epsilon=0.0):
    """Turn nonnegative raw weights (e.g. counts) into a distribution.

    Each weight becomes ``(w_i + eps) / (sum(w) + n * eps)``.  Zero weights
    are only accepted when ``smoothing_epsilon`` is positive.
    """
    if smoothing_epsilon < 0 or not math.isfinite(smoothing_epsilon):
        raise ValueError(f"smoothing_epsilon must be finite and >= 0, got {smoothing_epsilon!r}")
    w = _as_float_array(weights)
    bad = np.flatnonzero(w < 0.0)
    if bad.size:
        i = int(bad[0])
        raise RejectNonPositive(f"atom {i} is negative ({w[i]!r})", index=i)
    if not np.any(w > 0.0):
        raise RejectAllZero("all weights are zero")
    zeros = np.flatnonzero(w == 0.0)
    if zeros.size and smoothing_epsilon == 0.0:
        i = int(zeros[0])
        raise RejectZeroWithNoSmoothing(
            f"atom {i} is zero; pass a positive smoothing epsilon", index=i
        )
    w = w + smoothing_epsilon
    return _freeze(_unit_mass(w))


def check_pair(p, q):
    """Coerce ``p`` and ``q`` to distributions and return their weight arrays."""
    p = make_distribution(p)
    q = make_distribution(q)
    if p.n != q.n:
        raise DimensionMismatch(f"P has {p.n} atoms but Q has {q.n}")
    return p.weights, q.weights


def mixture(p, q, weight=0.5):
    """The convex combination ``weight * P + (1 - weight) * Q``."""
    pw, qw = check_pair(p, q)
    return make_distribution(weight * pw + (1.0 - weight) * qw, rescale=True)


@dataclass(frozen=True)
class PairSampler:
    """Deterministic source of random distribution pairs.

    ``skew`` bounds the largest ratio ``p_i / q_i`` targeted by the
    adversarial quarter of the pairs.
    """

    seed: int
    n_min: int = 2
    n_max: int = 64
    skew: float = 1e6

    def __post_init__(self):
        if self.n_min < 2 or self.n_max < self.n_min:
            raise ValueError(f"bad atom range [{self.n_min}, {self.n_max}]")
        if not self.skew > 0:
            raise ValueError(f"skew must be positive, got {self.skew!r}")

    def rng(self, index):
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(index,))
        return np.random.Generator(np.random.PCG64(seq))


def _floored(w):
    np.maximum(w, MIN_GENERATED_WEIGHT, out=w)
    return _freeze(_unit_mass(w))


def sample_pair(sampler, index):
    """Return pair number ``index`` of the sampler's corpus.

    Both members share an atom count drawn uniformly from the sampler's
    range and are flat-Dirichlet draws (normalized standard exponentials).
    With probability 1/4 one atom of Q is shrunk so that ``p_k / q_k`` is
    log-uniform in ``[1, skew]``, and the roles of P and Q are then swapped
    with probability 1/2.
    """
    if index < 0:
        raise ValueError(f"index must be >= 0, got {index}")
    rng = sampler.rng(index)
    n = int(rng.integers(sampler.n_min, sampler.n_max + 1))
    p = rng.standard_exponential(n)
    q = rng.standard_exponential(n)
    p /= p.sum()
    q /= q.sum()
    if rng.random() < ADVERSARIAL_FRACTION:
        k = int(rng.integers(n))
        ratio = sampler.skew ** rng.random()
        q[k] = p[k] / ratio
        q /= q.sum()
        if rng.random() < 0.5:
            p, q = q, p
    return _floored(p), _floored(q)


def sample_corpus(sampler, count, start=0):
    """Yield ``(index, P, Q)`` for ``count`` consecutive pair indices."""
    for index in range(start, start + count):
        p, q = sample_pair(sampler, index)
        yield index, p, q
