import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from dimlab.errors import BudgetExceeded, DomainError
from dimlab.symbolic import (CF_ROOT, BetaSystem, beta_children, beta_digits, beta_level,
                             cf_children, cf_convergents, convergent_sequence,
                             enumerate_beta_words, first_return_words, gauss_level, gauss_orbit,
                             root_cylinder)


def fib(k):
    a, b = 0, 1
    for _ in range(k):
        a, b = b, a + b
    return a


# -- beta side ---------------------------------------------------------------

@pytest.mark.parametrize("x, beta, n, want", [
    (0.3, "2", 3, (0, 1, 0)),
    (0.0, "2", 5, (0, 0, 0, 0, 0)),
    (0.0, "golden", 5, (0, 0, 0, 0, 0)),
    (0.7, "golden", 2, (1, 0)),
])
def test_beta_digits_examples(x, beta, n, want):
    assert beta_digits(x, BetaSystem.parse(beta), n) == want


@pytest.mark.parametrize("x", [-0.1, 1.0, 1.5])
def test_beta_digits_rejects_outside_unit_interval(x, doubling):
    with pytest.raises(DomainError):
        beta_digits(x, doubling, 3)


def test_beta_rejects_small_beta():
    with pytest.raises(DomainError):
        BetaSystem(1)


def test_root_children_doubling(doubling):
    kids = beta_children(root_cylinder(doubling), doubling)
    assert [c.word for c in kids] == [(0,), (1,)]
    assert all(c.is_full and c.image_len == 1 for c in kids)


def test_root_children_golden(golden):
    kids = beta_children(root_cylinder(golden), golden)
    assert [c.word for c in kids] == [(0,), (1,)]
    assert kids[0].image_len == 1
    assert float(kids[1].image_len) == pytest.approx((1 + math.sqrt(5)) / 2 - 1, abs=1e-15)
    assert not kids[1].is_full


def test_golden_word_one_has_single_child(golden):
    one = beta_children(root_cylinder(golden), golden)[1]
    kids = beta_children(one, golden)
    assert [c.word for c in kids] == [(1, 0)]
    assert kids[0].is_full


def test_doubling_words_all_full(doubling):
    words = enumerate_beta_words(doubling, 3)
    assert len(words) == 8 and all(c.is_full for c in words)


def test_golden_level_two_full_words(golden):
    full = enumerate_beta_words(golden, 2, full_only=True)
    assert sorted(c.word for c in full) == [(0, 0), (1, 0)]


@pytest.mark.parametrize("n", range(1, 21))
def test_golden_counts_are_fibonacci(golden, n):
    assert len(beta_level(golden, n)) == fib(n + 2)


def test_golden_has_no_double_one(golden):
    lev = beta_level(golden, 12)
    w = lev.words
    assert not np.any((w[:, 1:] == 1) & (w[:, :-1] == 1))


@given(st.floats(min_value=1.05, max_value=4.5), st.integers(min_value=1, max_value=7))
def test_level_tiles_unit_interval(beta, n):
    lev = beta_level(BetaSystem(beta), n)
    left = lev.left.astype(float)
    right = left + lev.lengths.astype(float)
    assert left[0] == 0.0
    assert right[-1] == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(left[1:], right[:-1], atol=1e-12)


@given(st.floats(min_value=1.05, max_value=4.5), st.floats(min_value=0, max_value=0.999),
       st.integers(min_value=1, max_value=8))
def test_digits_pick_the_containing_cylinder(beta, x, n):
    system = BetaSystem(beta)
    word = beta_digits(x, system, n)
    lev = beta_level(system, n)
    hits = [c for c in lev.cylinders() if c.word == word]
    assert len(hits) == 1
    c = hits[0]
    assert float(c.left) - 1e-12 <= x < float(c.right) + 1e-12


@given(st.floats(min_value=1.05, max_value=4.5), st.integers(min_value=1, max_value=7))
def test_full_cylinders_have_full_length(beta, n):
    system = BetaSystem(beta)
    lev = beta_level(system, n)
    ell = lev.ell[lev.full]
    np.testing.assert_allclose(ell.astype(float), 1.0)
    assert np.all(lev.ell <= 1 + system.guard(n))


def test_first_return_words_golden(golden):
    fr = first_return_words(golden, 6)
    assert [len(x) for x in fr] == [1, 1, 0, 0, 0, 0]
    assert fr[0].words.tolist() == [[0]] and fr[1].words.tolist() == [[1, 0]]


def test_budget_is_enforced(doubling):
    with pytest.raises(BudgetExceeded, match="budget"):
        beta_level(doubling, 20, budget=1000)


def test_budget_env_override(doubling, monkeypatch):
    monkeypatch.setenv("DIMLAB_BUDGET", "100")
    with pytest.raises(BudgetExceeded):
        beta_level(doubling, 10)


# -- continued fractions -----------------------------------------------------

def test_convergents_123():
    seq = convergent_sequence((1, 2, 3))
    assert [Fraction(p, q) for p, q in seq] == [Fraction(1, 1), Fraction(2, 3), Fraction(7, 10)]


def test_convergents_fibonacci_and_pell():
    assert [q for _, q in convergent_sequence((1,) * 6)] == [1, 2, 3, 5, 8, 13]
    assert [q for _, q in convergent_sequence((2,) * 4)] == [2, 5, 12, 29]


def test_convergents_reject_zero_digit():
    with pytest.raises(DomainError):
        cf_convergents((1, 0, 2))


def test_root_children_intervals():
    kids = cf_children(CF_ROOT, range(1, 4))
    assert [c.interval for c in kids] == [
        (Fraction(1, 2), Fraction(1)), (Fraction(1, 3), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 3))]
    assert cf_children(CF_ROOT, range(0)) == []


@given(st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=8))
def test_determinant_identity(word):
    c = cf_convergents(tuple(word))
    (p0, p1), (q0, q1) = c.p_pair, c.q_pair
    assert p1 * q0 - p0 * q1 == (-1) ** (len(word) + 1)


@given(st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=8))
def test_cylinder_length_formula(word):
    c = cf_convergents(tuple(word))
    q0, q1 = c.q_pair
    assert c.length == Fraction(1, q1 * (q1 + q0))
    lo, hi = c.interval
    assert 0 <= lo < hi <= 1


@given(st.lists(st.integers(min_value=1, max_value=20), min_size=1, max_size=6),
       st.integers(min_value=1, max_value=20))
def test_children_nest(word, a):
    parent = cf_convergents(tuple(word))
    lo, hi = parent.interval
    clo, chi = parent.child(a).interval
    assert lo <= clo < chi <= hi


def test_gauss_orbit_fixed_points():
    with mpmath.workdps(60):
        assert gauss_orbit(mpmath.sqrt(2) - 1, 30).digits == (2,) * 30
        assert gauss_orbit((mpmath.sqrt(5) - 1) / 2, 30).digits == (1,) * 30


def test_gauss_orbit_rational_terminates():
    orb = gauss_orbit(Fraction(7, 10), 10)
    assert orb.digits == (1, 2, 3)
    assert orb.terminated and len(orb) == 3


@given(st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=6))
def test_orbit_of_cylinder_point_recovers_word(word):
    c = cf_convergents(tuple(word))
    lo, hi = c.interval
    mid = (lo + hi) / 2
    assert gauss_orbit(mid, len(word)).digits == tuple(word)


def test_gauss_level_matches_convergents():
    lev = gauss_level([1, 2, 3], 4)
    assert len(lev) == 81
    for w, q, qp in zip(lev.words.tolist()[::7], lev.q[::7], lev.qprev[::7]):
        c = cf_convergents(w)
        assert (c.q_pair[1], c.q_pair[0]) == (int(q), int(qp))
