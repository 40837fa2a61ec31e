"""Tests for circle heat traces and bump localization."""

import math
from fractions import Fraction

import pytest

from hochheat.circle import (
    BumpFunction,
    TwoCircles,
    compare_localization,
    free_line_trace,
    heat_diagonal_images,
    heat_diagonal_spectral,
    localized_trace,
    long_time_rows,
    poisson_deviation,
)


def test_poisson_summation_identity():
    for length in (1.0, 1.7, 3.0):
        for t in (0.01, 0.05, 0.3, 1.0, 5.0):
            assert poisson_deviation(t, length) <= 1e-12


def test_short_time_diagonal_is_free():
    # at t = 0.01 on a unit circle the image tail is ~1e-10
    t = 0.01
    free = 1.0 / math.sqrt(4.0 * math.pi * t)
    assert heat_diagonal_images(t, 1.0) == pytest.approx(free, rel=1e-9)


def test_long_time_diagonal_is_equilibrium():
    assert heat_diagonal_spectral(10.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert heat_diagonal_spectral(10.0, 2.0) == pytest.approx(0.5, abs=1e-15)


def test_bump_integral_against_termwise_expansion():
    # independent oracle: integrate (1 - u^2)^m termwise with exact rationals
    for m in range(1, 9):
        expanded = sum(
            Fraction((-1) ** j * math.comb(m, j), 2 * j + 1) * 2 for j in range(m + 1)
        )
        closed = Fraction(2 ** (2 * m + 1) * math.factorial(m) ** 2, math.factorial(2 * m + 1))
        assert expanded == closed
        bump = BumpFunction(0.0, 0.75, m)
        assert bump.integral() == pytest.approx(0.75 * float(closed), rel=1e-15)


def test_bump_integral_against_quadrature():
    bump = BumpFunction(0.35, 0.2, 2)
    n = 20000
    width = 2 * bump.radius
    xs = [bump.center - bump.radius + width * (i + 0.5) / n for i in range(n)]
    riemann = width / n * math.fsum(bump(x) for x in xs)
    assert riemann == pytest.approx(bump.integral(), rel=1e-6)


def test_bump_shape():
    bump = BumpFunction(0.35, 0.2, 2)
    assert bump(0.35) == 1.0
    assert bump(0.55) == 0.0
    assert bump(0.14) == 0.0
    assert 0 < bump(0.3) < 1


def test_bump_validation():
    with pytest.raises(ValueError):
        BumpFunction(0.0, -0.1, 2)
    with pytest.raises(ValueError):
        BumpFunction(0.0, 0.1, 0)


def test_localized_trace_matches_spectral_route():
    circles = TwoCircles(1.0, 1.7)
    bump = BumpFunction(0.35, 0.2, 2)
    for t in (0.05, 0.7, 2.0):
        via_images = localized_trace(circles, bump, t)
        via_spectrum = bump.integral() * heat_diagonal_spectral(t, circles.length_a)
        assert via_images == pytest.approx(via_spectrum, rel=1e-12)


def test_bump_must_fit_in_its_circle():
    with pytest.raises(ValueError):
        localized_trace(TwoCircles(0.3, 5.0), BumpFunction(0.0, 0.2, 2), 0.1)


def test_short_time_delta_within_bound():
    circles = TwoCircles(1.0, 1.7)
    bump = BumpFunction(0.35, 0.2, 2)
    grid = [0.01 * (10 ** (i / 9)) for i in range(10)]  # log spaced in [0.01, 0.1]
    rows = compare_localization(circles, bump, grid)
    for row in rows:
        # delta comes from a subtraction of O(1) traces, so allow one ulp of
        # absolute noise on top of the analytic bound
        assert row.delta <= row.bound + 1e-14
    assert rows[0].bound <= 1e-10 * bump.integral()


def test_bound_uses_smaller_circle():
    # bump on the larger circle: its own tail is strictly below the bound
    circles = TwoCircles(1.7, 1.0)
    bump = BumpFunction(0.0, 0.2, 2)
    rows = compare_localization(circles, bump, [0.02, 0.05])
    for row in rows:
        assert row.delta < row.bound
        assert row.bound > 0


def test_long_time_gap_bound():
    bump = BumpFunction(0.35, 0.2, 2)
    rows = long_time_rows(1.0, bump, [1.0, 2.0, 5.0, 10.0])
    for row in rows:
        assert row.deviation <= row.bound
    assert rows[0].deviation > 0  # nontrivial at t = 1


def test_grid_validation():
    bump = BumpFunction(0.0, 0.2, 2)
    with pytest.raises(ValueError):
        compare_localization(TwoCircles(1.0, 1.0), bump, [])
    with pytest.raises(ValueError):
        compare_localization(TwoCircles(1.0, 1.0), bump, [0.1, -0.2])
    with pytest.raises(ValueError):
        long_time_rows(1.0, bump, [0.0])
    with pytest.raises(ValueError):
        heat_diagonal_images(0.5, -1.0)
    with pytest.raises(ValueError):
        free_line_trace(bump, 0.0)
