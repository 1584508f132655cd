import itertools
import json
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from doptdesign.basis import (
    BasisFamily,
    MultiIndexSet,
    build_index_set,
    chebyshev_table,
    eval_univariate,
    eval_univariate_deriv,
    index_set_for_terms,
    truncate_to_size,
)

CHEB = BasisFamily.CHEBYSHEV


def brute_force_set(d, p, q):
    return {
        a for a in itertools.product(range(p + 1), repeat=d)
        if sum(v ** q for v in a) <= p ** q + 1e-12
    }


@pytest.mark.parametrize("degree, x, expected", [(0, 0.37, 1.0), (1, -0.2, -0.2), (3, 0.5, -1.0)])
def test_eval_univariate_examples(degree, x, expected):
    assert eval_univariate(CHEB, degree, x) == pytest.approx(expected, abs=1e-15)


def test_eval_matches_trig_form():
    x = np.linspace(-1, 1, 41)
    for n in range(12):
        vals = [eval_univariate(CHEB, n, v) for v in x]
        np.testing.assert_allclose(vals, np.cos(n * np.arccos(x)), atol=1e-12)


def test_deriv_examples():
    assert eval_univariate_deriv(CHEB, 0, 0.9) == 0.0
    assert eval_univariate_deriv(CHEB, 2, 0.3) == pytest.approx(1.2, abs=1e-15)


def test_deriv_degree5_against_fd_and_second_kind():
    x, h = 0.41, 1e-6
    fd = (eval_univariate(CHEB, 5, x + h) - eval_univariate(CHEB, 5, x - h)) / (2 * h)
    got = eval_univariate_deriv(CHEB, 5, x)
    assert got == pytest.approx(fd, rel=1e-6)
    # T5' = 5 U4 with U4 = 16x^4 - 12x^2 + 1
    assert got == pytest.approx(5 * (16 * x ** 4 - 12 * x ** 2 + 1), rel=1e-13)


def test_deriv_fd_sweep():
    rng = np.random.default_rng(7)
    h = 1e-6
    for x in rng.uniform(-0.999, 0.999, 100):
        for n in range(13):
            fd = (eval_univariate(CHEB, n, x + h) - eval_univariate(CHEB, n, x - h)) / (2 * h)
            got = eval_univariate_deriv(CHEB, n, x)
            assert abs(got - fd) <= 1e-6 * abs(fd) + 1e-8


def test_table_matches_scalar():
    x = np.array([[-0.3, 0.8], [0.1, 1.0]])
    vals, ders = chebyshev_table(x, 6, deriv=True)
    for idx in np.ndindex(x.shape):
        for n in range(7):
            assert vals[idx + (n,)] == pytest.approx(eval_univariate(CHEB, n, x[idx]), abs=1e-14)
            assert ders[idx + (n,)] == pytest.approx(eval_univariate_deriv(CHEB, n, x[idx]), abs=1e-12)


@given(st.integers(0, 15), st.floats(-1, 1))
def test_chebyshev_bounded(n, x):
    assert abs(eval_univariate(CHEB, n, x)) <= 1 + 1e-12


def test_index_set_examples():
    s = build_index_set(2, 4, 1.0)
    assert len(s) == 15
    assert [tuple(a) for a in build_index_set(1, 0, 1.0)] == [(0,)]
    half = build_index_set(2, 2, 0.5)
    assert list(half) == [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)]
    assert set(half) == brute_force_set(2, 2, 0.5)


def test_graded_order():
    s = build_index_set(3, 3)
    degrees = s.indices.sum(axis=1)
    assert np.all(np.diff(degrees) >= 0)
    assert len(set(s)) == len(s)


@pytest.mark.parametrize("q", [0.0, -0.5, 1.5])
def test_rejects_bad_q(q):
    with pytest.raises(ValueError):
        build_index_set(2, 3, q)


def test_cardinality_binomial_exhaustive():
    for d in range(1, 8):
        for p in range(0, 9):
            if comb(d + p, p) > 3000:
                continue
            s = build_index_set(d, p)
            assert len(s) == comb(d + p, p)
            assert set(s) == brute_force_set(d, p, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 6), st.floats(0.1, 1.0), st.floats(0.1, 1.0))
def test_monotone_truncation(d, p, q1, q2):
    lo, hi = sorted((q1, q2))
    assert set(build_index_set(d, p, lo)) <= set(build_index_set(d, p, hi))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 5), st.floats(0.2, 1.0))
def test_qnorm_set_matches_brute_force(d, p, q):
    assert set(build_index_set(d, p, q)) == brute_force_set(d, p, q)


def test_truncate_examples():
    s = build_index_set(2, 4)
    assert list(truncate_to_size(s, 15)) == list(s)
    assert list(truncate_to_size(s, 1)) == [(0, 0)]
    assert list(truncate_to_size(s, 14)) == list(s)[:-1]
    with pytest.raises(ValueError):
        truncate_to_size(s, 16)


def test_terms_helper():
    s = index_set_for_terms(2, 40)
    assert len(s) == 40
    assert s.total_degree == 8


def test_json_roundtrip():
    s = build_index_set(3, 2, 0.7)
    data = json.loads(s.to_json())
    assert set(data) >= {"d", "p", "q", "indices"}
    back = MultiIndexSet.from_json(s.to_json())
    assert list(back) == list(s) and back.qnorm == s.qnorm
