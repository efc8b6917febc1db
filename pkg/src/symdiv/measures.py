"""Closed-form divergence measures between two discrete distributions.

Every measure is a sum of per-atom terms accumulated with ``math.fsum``.
The logarithmic measures are evaluated through the half-difference
``u = (p - q) / (p + q)``, which avoids the cancellation the textbook
forms suffer when ``p_i`` is close to ``q_i``:

    ln(p / q)                = 2 atanh(u)
    ln(4 p q / (p + q)^2)    = log1p(-u^2)

All logarithms are natural, so logarithmic measures are in nats.
"""

from enum import Enum
import math
from typing import NamedTuple

import numpy as np

from .distributions import check_pair, make_distribution

_SMALL_U = 0.5
_SERIES_U = 0.25
_LOG4 = math.log(4.0)


class MeasureId(str, Enum):
    H = "H"
    DELTA = "DELTA"
    PSI = "PSI"
    J = "J"
    I = "I"  # noqa: E741
    T = "T"
    KL = "KL"
    CHI2 = "CHI2"
    B = "B"
    W = "W"
    DSTAR = "DSTAR"


SYMMETRIC_IDS = frozenset(MeasureId) - {MeasureId.KL, MeasureId.CHI2}


class DivergenceValue(NamedTuple):
    value: float
    measure_id: MeasureId


def _half_log_ratio(p, q, u):
    """atanh(u) == ln(p/q) / 2, accurate for every ratio."""
    small = np.abs(u) < _SMALL_U
    with np.errstate(divide="ignore"):
        via_logs = 0.5 * (np.log(p) - np.log(q))
    return np.where(small, np.arctanh(np.where(small, u, 0.0)), via_logs)


def _log_geometric_over_arithmetic(p, q, u):
    """log1p(-u^2) == 2 ln(sqrt(pq) / ((p+q)/2))."""
    small = np.abs(u) < _SMALL_U
    via_logs = _LOG4 + (np.log(p) + np.log(q)) - 2.0 * np.log(p + q)
    return np.where(small, np.log1p(-u * u), via_logs)


def _atanh_excess(u, a):
    """atanh(u) - u, using the odd power series where it would cancel."""
    u2 = u * u
    series = np.zeros_like(u)
    for k in range(14, -1, -1):
        series = series * u2 + 1.0 / (2 * k + 3)
    return np.where(np.abs(u) < _SERIES_U, u * u2 * series, a - u)


def _terms_setup(p, q):
    s = p + q
    u = (p - q) / s
    return 0.5 * s, u


def _total(terms):
    return math.fsum(terms)


def bhattacharyya(p, q):
    """Bhattacharyya coefficient, sum of sqrt(p_i q_i); equals 1 iff P == Q."""
    p, q = check_pair(p, q)
    return _total(np.sqrt(p * q))


def hellinger(p, q):
    """Hellinger discrimination, half the squared L2 distance of root weights."""
    p, q = check_pair(p, q)
    d = p - q
    r = np.sqrt(p) + np.sqrt(q)
    return 0.5 * _total(d * d / (r * r))


def triangular(p, q):
    p, q = check_pair(p, q)
    d = p - q
    return _total(d * d / (p + q))


def harmonic_mean_w(p, q):
    """Harmonic mean divergence, sum of 2 p_i q_i / (p_i + q_i).

    Atoms with ``p_i == q_i`` contribute ``p_i`` itself, so ``W(P, P) == 1``
    exactly instead of up to one rounding per atom.
    """
    p, q = check_pair(p, q)
    return _total(np.where(p == q, p, 2.0 * p * q / (p + q)))


def chi_square(p, q):
    """Pearson chi-square of P against reference Q (not symmetric)."""
    p, q = check_pair(p, q)
    d = p - q
    return _total(d * d / q)


def symmetric_chi_square(p, q):
    p, q = check_pair(p, q)
    d = p - q
    return _total(d * d * (p + q) / (p * q))


def kullback_leibler(p, q):
    """Relative information of P with respect to Q, in nats.

    Each atom contributes ``p ln(p/q) - (p - q)``, which is nonnegative and
    sums to the same total since both weight vectors have unit mass.
    """
    p, q = check_pair(p, q)
    m, u = _terms_setup(p, q)
    a = _half_log_ratio(p, q, u)
    return _total(2.0 * m * (u * a + _atanh_excess(u, a)))


def j_divergence(p, q):
    p, q = check_pair(p, q)
    _, u = _terms_setup(p, q)
    return _total(2.0 * (p - q) * _half_log_ratio(p, q, u))


def jensen_shannon(p, q):
    """Jensen-Shannon divergence (information radius), in nats."""
    p, q = check_pair(p, q)
    m, u = _terms_setup(p, q)
    a = _half_log_ratio(p, q, u)
    g = _log_geometric_over_arithmetic(p, q, u)
    return _total(m * (u * a + 0.5 * g))


def ag_mean(p, q):
    """Arithmetic-geometric mean divergence, in nats."""
    p, q = check_pair(p, q)
    m, u = _terms_setup(p, q)
    return _total(-0.5 * m * _log_geometric_over_arithmetic(p, q, u))


def d_star(p, q):
    """Quartic measure sum (p_i - q_i)^4 / (p_i q_i)^(3/2)."""
    p, q = check_pair(p, q)
    d2 = (p - q) ** 2
    return _total(d2 * d2 / (p * q) ** 1.5)


MEASURES = {
    MeasureId.H: hellinger,
    MeasureId.DELTA: triangular,
    MeasureId.PSI: symmetric_chi_square,
    MeasureId.J: j_divergence,
    MeasureId.I: jensen_shannon,
    MeasureId.T: ag_mean,
    MeasureId.KL: kullback_leibler,
    MeasureId.CHI2: chi_square,
    MeasureId.B: bhattacharyya,
    MeasureId.W: harmonic_mean_w,
    MeasureId.DSTAR: d_star,
}


def evaluate(measure_id, p, q):
    """Evaluate one measure by id and tag the result."""
    measure_id = MeasureId(measure_id)
    return DivergenceValue(MEASURES[measure_id](p, q), measure_id)


def evaluate_many(measure_ids, p, q):
    """Map each requested id to its value, validating the pair once."""
    p, q = make_distribution(p), make_distribution(q)
    check_pair(p, q)
    return {MeasureId(mid): MEASURES[MeasureId(mid)](p, q) for mid in measure_ids}
