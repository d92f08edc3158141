import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from dimlab.acceptance import sample_target_instances, sandwich_failures
from dimlab.constructions import (TargetSpec, _even_window, fmb_cantor, lambda_measure, natural_cover_exponent,
                                  shrinking_target_interval, w_stage)
from dimlab.errors import DomainError
from dimlab.symbolic import BetaSystem, beta_level, enumerate_beta_words
from dimlab.thermo import Potential, solve_dimension_beta

from conftest import LOG2


def cyl(system, word):
    return next(c for c in beta_level(system, len(word)).cylinders() if c.word == tuple(word))


# -- target intervals ------------------------------------------------------------

def test_point_target_example(doubling):
    t = shrinking_target_interval(cyl(doubling, (0, 0, 0)), TargetSpec.point(0.5), 0.1)
    assert (t.lo, t.hi) == pytest.approx((0.05, 0.075), abs=1e-15)
    assert t.radius == pytest.approx(0.0125, abs=1e-16)
    assert 0.1 / 8 / 2 <= t.radius <= 2 * 0.1 / 8
    assert not t.boundary


def test_affine_target_slope(doubling):
    t = shrinking_target_interval(cyl(doubling, (0, 1, 1)), TargetSpec.affine(0.0, 1.0), 0.05)
    assert t.radius == pytest.approx(0.05 / 7, rel=1e-15)


def test_zero_radius_is_empty(doubling):
    t = shrinking_target_interval(cyl(doubling, (1, 0)), TargetSpec.point(0.3), 0.0)
    assert t.empty and t.length == 0


def test_boundary_clipping_is_flagged(doubling):
    t = shrinking_target_interval(cyl(doubling, (1,)), TargetSpec.point(0.05), 0.2)
    assert t.boundary
    assert t.lo == pytest.approx(0.5)


def test_lipschitz_guard(doubling):
    with pytest.raises(DomainError):
        shrinking_target_interval(cyl(doubling, (0,)), TargetSpec.affine(0.0, 2.5), 0.1)
    with pytest.raises(DomainError):
        TargetSpec(0.0, 3.0, lipschitz=1.0)


def test_non_full_cylinder_rejected(golden):
    with pytest.raises(DomainError):
        shrinking_target_interval(cyl(golden, (1,)), TargetSpec.point(0.5), 0.1)


def test_sandwich_holds_when_slope_is_small():
    # the radius r/(beta^n - c1) stays below 2 r beta^-n whenever c1 <= beta^n / 2
    instances = sample_target_instances(1000, seed=3, slope_fraction=0.5)
    assert len(instances) == 1000
    assert sandwich_failures(instances) == []


@given(st.floats(min_value=0.0, max_value=0.999), st.floats(min_value=1e-4, max_value=0.5),
       st.integers(min_value=1, max_value=7))
def test_target_inside_cylinder(c0, r, n):
    system = BetaSystem(2)
    for c in beta_level(system, n).cylinders()[:: max(1, 2 ** n // 8)]:
        t = shrinking_target_interval(c, TargetSpec.point(c0), r)
        assert float(c.left) <= t.lo <= t.hi <= float(c.right)


# -- w-stage -----------------------------------------------------------------

def test_w_stage_doubling_counts_and_lengths(doubling):
    stage = w_stage(doubling, Potential.constant(LOG2), 6)
    for n in range(1, 7):
        level = [t for t in stage if t.level == n]
        assert len(level) == 2 ** n
        interior = [t for t in level if not t.boundary]
        assert interior
        for t in interior:
            assert t.length == pytest.approx(2 * 4.0 ** -n, rel=1e-12)


def test_w_stage_golden_uses_full_words(golden):
    stage = w_stage(golden, Potential.constant(0.3), 6)
    for n in range(1, 7):
        full = enumerate_beta_words(golden, n, full_only=True)
        assert len([t for t in stage if t.level == n]) == len(full)


def test_w_stage_underflow_keeps_log_length(doubling):
    stage = w_stage(doubling, Potential.constant(20.0), 40 // 8)
    t = [x for x in stage if x.level == 5][0]
    assert t.log_length == pytest.approx(math.log(2) - 100 - 5 * LOG2, rel=1e-12)


def test_w_stage_disjoint_within_level(golden):
    stage = w_stage(golden, Potential.constant(0.2), 8)
    for n in range(1, 9):
        ivs = sorted((t.lo, t.hi) for t in stage if t.level == n)
        assert all(a[1] <= b[0] for a, b in zip(ivs, ivs[1:]))


# -- cover exponent ------------------------------------------------------------

@pytest.mark.parametrize("c", [LOG2, math.log(4), math.log(8), 0.0])
def test_cover_exponent_closed_form(doubling, c):
    ce = natural_cover_exponent(doubling, Potential.constant(c), 12, tol=1e-6)
    assert ce.value == pytest.approx(LOG2 / (c + LOG2), abs=1e-3)


def test_cover_exponent_matches_dimension(doubling):
    c = math.log(3)
    ce = natural_cover_exponent(doubling, Potential.constant(c), 12, tol=1e-6)
    dim = solve_dimension_beta(Potential.constant(c), doubling, tol=1e-6)
    assert abs(ce.value - dim.value) <= 1e-6 + 1e-6


# -- F_m(B) Cantor stage ----------------------------------------------------------

def test_fmb_stage_m1():
    stage = fmb_cantor((1, 1), 1, 2.0, 0.8, 2)
    assert stage.windows == [(4, 8)]
    assert stage.digits == [[4, 6, 8]]
    assert len(stage) == 3
    assert stage.separation.passed


def test_fmb_stage_m2():
    stage = fmb_cantor(None, 2, 2.0, 0.75, 3)
    assert stage.alphas[0] == pytest.approx(2 ** 0.75, rel=1e-12)
    assert stage.digits[0] == [6, 8]
    assert all(all(d % 2 == 0 for d in ds) for ds in stage.digits)
    for blk in stage.blocks:
        assert blk.word[:3] == (1, 1, 1)
        for i, lo_hi in enumerate(stage.windows):
            assert lo_hi[0] <= blk.word[3 + i] <= lo_hi[1]


@pytest.mark.parametrize("n", [3, 5, 7])
def test_fmb_block_count_tracks_windows(n):
    stage = fmb_cantor(None, 1, 3.0, 0.9, n)
    expected = 3.0 ** n / 2
    assert abs(len(stage) - expected) <= 1


@given(st.floats(min_value=1.0, max_value=50.0), st.integers(min_value=1, max_value=4))
def test_windows_never_empty_above_one(alpha, n):
    # [a, 2a] with a >= 1 has length >= 1 and ends at or past ceil(a) + 1
    lo, hi, evens = _even_window(mpmath.log(alpha), n)
    assert evens and all(lo <= d <= hi for d in evens)


def test_fmb_empty_window(monkeypatch):
    import dimlab.constructions as cons
    monkeypatch.setattr(cons, "mp_log_alpha_cascade", lambda m, B, u: [mpmath.log(0.7)])
    with pytest.raises(DomainError, match="alpha_1"):
        fmb_cantor(None, 1, 2.0, 0.9, 1)


def test_fmb_prefix_level_mismatch():
    with pytest.raises(DomainError):
        fmb_cantor((1, 2, 3), 1, 2.0, 0.8, 2)


def test_lambda_measure_masses():
    stage = fmb_cantor((1, 1), 1, 2.0, 0.8, 2)
    mu = lambda_measure(stage)
    assert mu.exact_masses == [Fraction(1, 3)] * 3
    assert mu.exact_total == 1
    lo, hi = (float(x) for x in stage.prefix.interval)
    assert float(mu.measure(lo, hi)) == pytest.approx(1.0, abs=1e-15)


def test_lambda_small_ball_single_block():
    stage = fmb_cantor((1, 1), 1, 2.0, 0.8, 2)
    mu = lambda_measure(stage)
    a, b = (float(x) for x in stage.blocks[1].interval)
    r = (b - a) / 10
    density = (1 / 3) / (b - a)
    assert float(mu.ball((a + b) / 2, r)) == pytest.approx(density * 2 * r, rel=1e-9)


@pytest.mark.parametrize("n, m, B", [(2, 1, 2.0), (3, 2, 2.0), (2, 2, 10.0)])
def test_fmb_stages_separated(n, m, B):
    from dimlab.thermo import solve_fmb
    u = solve_fmb(m, B, tol=1e-8).value
    stage = fmb_cantor(None, m, B, u, n)
    assert stage.separation.passed and stage.separation.violations == []
