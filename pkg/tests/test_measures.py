import math

from hypothesis import given, settings, strategies as st
import mpmath as mp
import numpy as np
import pytest

from symdiv.distributions import make_distribution, mixture
from symdiv.errors import DimensionMismatch
from symdiv.measures import (
    MEASURES,
    SYMMETRIC_IDS,
    DivergenceValue,
    MeasureId,
    ag_mean,
    bhattacharyya,
    chi_square,
    d_star,
    evaluate,
    evaluate_many,
    harmonic_mean_w,
    hellinger,
    j_divergence,
    jensen_shannon,
    kullback_leibler,
    symmetric_chi_square,
    triangular,
)

from conftest import rel_close
import oracles

NONNEGATIVE = set(MeasureId) - {MeasureId.B, MeasureId.W}

distributions = st.lists(st.floats(1e-9, 1.0), min_size=2, max_size=30).map(
    lambda w: make_distribution(w, rescale=True)
)


@st.composite
def pairs(draw):
    n = draw(st.integers(2, 30))
    w = st.lists(st.floats(1e-9, 1.0), min_size=n, max_size=n)
    return make_distribution(draw(w), rescale=True), make_distribution(draw(w), rescale=True)


class TestWorkedPair:
    """P = (1/2, 1/2), Q = (1/4, 3/4): closed forms evaluated independently."""

    @pytest.mark.parametrize(
        "fn, expected",
        [
            (triangular, 2 / 15),
            (chi_square, 1 / 3),
            (symmetric_chi_square, 7 / 12),
            (j_divergence, math.log(3) / 4),
            (harmonic_mean_w, 14 / 15),
            (bhattacharyya, float((mp.sqrt(2) + mp.sqrt(6)) / 4)),
            (hellinger, float(1 - (mp.sqrt(2) + mp.sqrt(6)) / 4)),
            (kullback_leibler, float(mp.log(mp.mpf(4) / 3) / 2)),
        ],
    )
    def test_closed_forms(self, worked_pair, fn, expected):
        assert rel_close(fn(*worked_pair), expected, 1e-12)

    def test_reverse_directions(self, worked_pair):
        p, q = worked_pair
        assert rel_close(chi_square(q, p), 0.25, 1e-12)
        expected = mp.log(mp.mpf(1) / 2) / 4 + 3 * mp.log(mp.mpf(3) / 2) / 4
        assert rel_close(kullback_leibler(q, p), float(expected), 1e-12)

    @pytest.mark.parametrize("mid", list(MeasureId))
    def test_against_oracle(self, worked_pair, mid):
        p, q = worked_pair
        assert rel_close(MEASURES[mid](p, q), float(oracles.MEASURES[mid.value](p, q)), 1e-12)

    def test_rounded_values(self, worked_pair):
        p, q = worked_pair
        assert jensen_shannon(p, q) == pytest.approx(0.0338221, abs=5e-8)
        assert ag_mean(p, q) == pytest.approx(0.0348412, abs=5e-8)
        assert d_star(p, q) == pytest.approx(0.1053987, abs=5e-8)

    def test_ag_mean_from_identity(self, worked_pair):
        p, q = worked_pair
        assert rel_close(ag_mean(p, q), j_divergence(p, q) / 4 - jensen_shannon(p, q), 1e-12)


@pytest.mark.parametrize("mid", list(MeasureId))
def test_oracle_agreement_on_corpus(corpus_1000, mid):
    oracle = oracles.MEASURES[mid.value]
    for p, q in corpus_1000[:150]:
        assert rel_close(MEASURES[mid](p, q), float(oracle(p, q)), 1e-12), (p, q)


def test_oracle_agreement_near_identical():
    base = np.linspace(1, 2, 17)
    for eps in (1e-3, 1e-6, 1e-9):
        p = make_distribution(base, rescale=True)
        q = make_distribution(base * (1 + eps * np.cos(np.arange(17))), rescale=True)
        for mid in MeasureId:
            got = MEASURES[mid](p, q)
            want = float(oracles.MEASURES[mid.value](p, q))
            assert rel_close(got, want, 1e-12), (mid, eps)


class TestIdentities:
    def test_j_equals_four_i_plus_t(self, corpus_1000):
        for p, q in corpus_1000:
            assert rel_close(j_divergence(p, q), 4 * (jensen_shannon(p, q) + ag_mean(p, q)), 1e-12)

    def test_j_is_sum_of_kl(self, corpus_1000):
        for p, q in corpus_1000:
            kl = kullback_leibler(p, q) + kullback_leibler(q, p)
            assert rel_close(j_divergence(p, q), kl, 1e-12)

    def test_i_is_mean_kl_to_midpoint(self, corpus_1000):
        for p, q in corpus_1000:
            m = mixture(p, q)
            kl = 0.5 * (kullback_leibler(p, m) + kullback_leibler(q, m))
            assert rel_close(jensen_shannon(p, q), kl, 1e-12)

    def test_t_is_mean_kl_from_midpoint(self, corpus_1000):
        for p, q in corpus_1000:
            m = mixture(p, q)
            kl = 0.5 * (kullback_leibler(m, p) + kullback_leibler(m, q))
            assert rel_close(ag_mean(p, q), kl, 1e-12)

    def test_hellinger_bhattacharyya(self, corpus_1000):
        for p, q in corpus_1000:
            assert abs(hellinger(p, q) - (1 - bhattacharyya(p, q))) <= 1e-14
            assert rel_close(hellinger(p, q), 1 - bhattacharyya(p, q), 1e-12)

    def test_triangular_harmonic(self, corpus_1000):
        for p, q in corpus_1000:
            assert abs(triangular(p, q) - 2 * (1 - harmonic_mean_w(p, q))) <= 1e-14
            assert rel_close(triangular(p, q), 2 * (1 - harmonic_mean_w(p, q)), 1e-12)

    def test_psi_is_sum_of_chi_square(self, corpus_1000):
        for p, q in corpus_1000:
            chi = chi_square(p, q) + chi_square(q, p)
            assert rel_close(symmetric_chi_square(p, q), chi, 1e-12)

    def test_basic_chain(self, corpus_1000):
        for p, q in corpus_1000:
            chain = [triangular(p, q) / 4, jensen_shannon(p, q), hellinger(p, q),
                     j_divergence(p, q) / 8, ag_mean(p, q), symmetric_chi_square(p, q) / 16]
            tol = 1e-10 * max(1.0, chain[-1])
            assert all(b - a >= -tol for a, b in zip(chain, chain[1:]))


class TestProperties:
    @settings(max_examples=300, deadline=None)
    @given(pairs())
    def test_symmetry(self, pq):
        p, q = pq
        for mid in SYMMETRIC_IDS:
            a, b = MEASURES[mid](p, q), MEASURES[mid](q, p)
            assert abs(a - b) <= 1e-14 * max(1.0, abs(a)), mid

    @settings(max_examples=200, deadline=None)
    @given(distributions)
    def test_identity_of_indiscernibles(self, p):
        for mid in MeasureId:
            expected = 1.0 if mid in (MeasureId.B, MeasureId.W) else 0.0
            assert MEASURES[mid](p, p) == expected, mid

    @settings(max_examples=300, deadline=None)
    @given(pairs())
    def test_ranges(self, pq):
        p, q = pq
        for mid in NONNEGATIVE:
            assert MEASURES[mid](p, q) >= 0.0, mid
        assert 0.0 < bhattacharyya(p, q) <= 1.0 + 1e-14
        assert 0.0 < harmonic_mean_w(p, q) <= 1.0 + 1e-14
        assert triangular(p, q) < 2.0


def test_accepts_sequences_and_arrays():
    assert triangular([0.5, 0.5], np.array([0.25, 0.75])) == pytest.approx(2 / 15, rel=1e-15)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        hellinger([0.5, 0.5], [0.2, 0.3, 0.5])


def test_evaluate_tags_value(worked_pair):
    v = evaluate("J", *worked_pair)
    assert isinstance(v, DivergenceValue)
    assert v.measure_id is MeasureId.J
    assert v.value == j_divergence(*worked_pair)


def test_evaluate_many(worked_pair):
    got = evaluate_many(["H", MeasureId.W], *worked_pair)
    assert set(got) == {MeasureId.H, MeasureId.W}
    assert got[MeasureId.W] == pytest.approx(14 / 15, rel=1e-15)


def test_extreme_ratio_stays_finite():
    p = make_distribution([1 - 1e-12, 1e-12])
    q = make_distribution([1e-12, 1 - 1e-12])
    for mid in MeasureId:
        v = MEASURES[mid](p, q)
        assert math.isfinite(v), mid
        assert rel_close(v, float(oracles.MEASURES[mid.value](p, q)), 1e-12), mid
