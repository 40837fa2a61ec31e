"""Tests for the truncated spectral model of O(k) on the sphere."""

import math
import random
from fractions import Fraction

import numpy as np
import pytest

from hochheat.spectral import (
    DivergentIntegralError,
    IllConditionedGramError,
    OperatorEscapeError,
    _apply_weyl,
    _chi,
    build_model,
    harmonic_supertrace,
    heat_supertrace,
    limit_supertrace,
    load_spectrum,
    mono_integral,
    pair_weighted,
    store_spectrum,
)
from hochheat.weyl import d_var, monomial, mul, unit, z_var


def test_mono_integral_small_values():
    # integral of (1+|z|^2)^(-m) / pi over the plane is 1/(m-1)
    assert mono_integral(0, 2) == 1
    assert mono_integral(0, 3) == Fraction(1, 2)
    assert mono_integral(1, 4) == Fraction(1, 6)
    assert mono_integral(2, 5) == Fraction(2 * 1, 24)
    with pytest.raises(DivergentIntegralError):
        mono_integral(3, 4)


def test_constant_section_has_unit_norm():
    # the honest constant section of the trivial bundle, not a truncated basis
    # vector: <1, 1> against the unit-mass base measure is exactly 1
    one = {(0, 0, 0): Fraction(1)}
    assert pair_weighted(one, one, 2) == 1


def test_pairing_handles_cancelling_divergences():
    # z zbar (1+)^(-1) - z zbar (1+)^(-2) - z^2 zbar^2 (1+)^(-2) is identically
    # zero, so pairing it against 1 must return 0 instead of raising
    f = {
        (1, 1, 1): Fraction(1),
        (1, 1, 2): Fraction(-1),
        (2, 2, 2): Fraction(-1),
    }
    one = {(0, 0, 0): Fraction(1)}
    assert pair_weighted(f, one, 2) == 0


def test_pairing_rejects_divergent_input():
    f = {(2, 2, 1): Fraction(1)}
    one = {(0, 0, 0): Fraction(1)}
    with pytest.raises(DivergentIntegralError):
        pair_weighted(f, one, 2)


def test_gram_matches_generic_pairing():
    k, n = 1, 4
    model = build_model(k, n)
    for block in model.blocks:
        for i, (a1, b1) in enumerate(block.pairs):
            for j, (a2, b2) in enumerate(block.pairs):
                entry = mono_integral(a1 + b2, 2 * n + k + 2)
                assert entry == pair_weighted(_chi(a1, b1, n), _chi(a2, b2, n), k + 2)


def test_apply_weyl_is_multiplicative():
    rng = random.Random(11)
    n_trunc = 5
    for _ in range(30):
        a = monomial(1, (rng.randrange(3),), (rng.randrange(3),), rng.randrange(1, 4))
        b = monomial(1, (rng.randrange(3),), (rng.randrange(3),), rng.randrange(1, 4))
        f = _chi(rng.randrange(4), rng.randrange(4), n_trunc)
        assert _apply_weyl(mul(a, b), f) == _apply_weyl(a, _apply_weyl(b, f))


def test_apply_weyl_derivative_rule():
    # d/dz on z^2 zbar (1+|z|^2)^(-3)
    f = _chi(2, 1, 3)
    out = _apply_weyl(d_var(1, 1), f)
    assert out == {(1, 1, 3): Fraction(2), (2, 2, 4): Fraction(-3)}


def test_kernel_dimensions():
    for k in range(5):
        model = build_model(k, 8)
        assert len(model.harmonic0) == k + 1
        assert len(model.harmonic1) == 0


def test_kernel_dimension_minimal_truncation():
    # the holomorphic sections survive even at the smallest allowed truncation
    for k in (5, 6):
        model = build_model(k, k + 2)
        assert len(model.harmonic0) == k + 1


def test_kernel_dimension_k3_n10():
    assert len(build_model(3, 10).harmonic0) == 4


def test_harmonic_vectors_are_holomorphic_polynomials():
    # z^c = sum_j binom(N, j) z^(c+j) zbar^j (1+|z|^2)^(-N), so each kernel
    # vector must follow the binomial profile along a diagonal of charge c <= k
    k, n = 2, 8
    model = build_model(k, n)
    coords = model.harmonic0_coordinates()
    assert len(coords) == 3
    charges = set()
    for vec in coords:
        q = {a - b for (a, b), v in vec.items() if abs(v) > 1e-9}
        assert len(q) == 1
        (c,) = q
        assert 0 <= c <= k
        charges.add(c)
        ref = vec[(c, 0)]
        for j in range(n + 1):
            assert vec[(c + j, j)] == pytest.approx(ref * math.comb(n, j), abs=1e-8 * abs(ref) * math.comb(n, n // 2))


def test_supersymmetric_pairing_of_nonzero_spectra():
    for k in (0, 1, 3):
        model = build_model(k, 8)
        nz0 = model._flat0[model._flat0 > model.kernel_threshold]
        assert len(nz0) == len(model._flat1)
        head = min(10, len(nz0))
        assert np.abs(nz0[:head] - model._flat1[:head]).max() <= 1e-6


def test_low_spectrum_matches_round_sphere_law():
    # eigenvalues l (l + k + 1) with multiplicity 2 l + k + 1
    for k in (0, 1, 2):
        model = build_model(k, 10)
        for l, (value, mult) in enumerate(model.eigs0[:4]):
            assert abs(value - l * (l + k + 1)) <= 1e-9
            assert mult == 2 * l + k + 1


def test_heat_supertrace_is_flat():
    model = build_model(2, 10)
    values = [heat_supertrace(model, t) for t in np.linspace(0.2, 5, 12)]
    assert max(abs(v - 3.0) for v in values) <= 1e-10


def test_refinement_is_stable():
    clusters = {}
    counts = {}
    for n in (8, 10, 12):
        model = build_model(1, n)
        clusters[n] = model.eigs0[:4]
        counts[n] = len(model._flat0)
    assert counts[8] < counts[10] < counts[12]
    for l in range(4):
        vals = [clusters[n][l][0] for n in (8, 10, 12)]
        assert max(vals) - min(vals) <= 1e-9
        assert all(clusters[n][l][1] == 2 * l + 2 for n in (8, 10, 12))


def test_harmonic_supertrace_identity_counts_sections():
    for k in range(5):
        model = build_model(k, 8)
        assert abs(harmonic_supertrace(model, unit(1)) - (k + 1)) <= 1e-8


def test_harmonic_supertrace_euler_operator():
    # z d/dz acts on the monomial basis 1, z, ..., z^k of the kernel with
    # trace 0 + 1 + ... + k = k (k + 1) / 2
    zd = mul(z_var(1, 1), d_var(1, 1))
    for k in range(5):
        model = build_model(k, 8)
        expected = k * (k + 1) / 2
        assert abs(harmonic_supertrace(model, zd) - expected) <= 1e-6


def test_harmonic_supertrace_charge_shift_vanishes():
    model = build_model(2, 8)
    assert abs(harmonic_supertrace(model, z_var(1, 1))) <= 1e-12
    assert abs(harmonic_supertrace(model, d_var(1, 1))) <= 1e-12


def test_limit_supertrace_converges_to_harmonic():
    model = build_model(1, 10)
    zd = mul(z_var(1, 1), d_var(1, 1))
    grid = [0.5, 1.0, 2.0, 4.0, 8.0, 10.0]
    series, terminal = limit_supertrace(model, zd, grid)
    target = harmonic_supertrace(model, zd)
    gaps = [abs(s - target) for s in series]
    assert gaps[-1] <= 1e-9
    assert all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
    assert terminal == series[-1]


def test_limit_supertrace_identity_reproduces_heat_flatness():
    model = build_model(0, 8)
    series, _ = limit_supertrace(model, unit(1), [0.3, 1.0, 3.0])
    for t, s in zip([0.3, 1.0, 3.0], series):
        assert abs(s - heat_supertrace(model, t)) <= 1e-10


def test_operator_escape_diagnostics():
    model = build_model(0, 8)
    with pytest.raises(OperatorEscapeError):
        harmonic_supertrace(model, monomial(1, (9,), (0,)))
    with pytest.raises(OperatorEscapeError):
        harmonic_supertrace(model, z_var(1, n=2))


def test_build_preconditions():
    with pytest.raises(ValueError):
        build_model(2, 3)
    with pytest.raises(ValueError):
        build_model(-1, 8)
    with pytest.raises(IllConditionedGramError):
        build_model(0, 12, cond_limit=10.0)


def test_time_grid_validation():
    model = build_model(0, 8)
    with pytest.raises(ValueError):
        heat_supertrace(model, 0.0)
    with pytest.raises(ValueError):
        limit_supertrace(model, unit(1), [1.0, 0.5])
    with pytest.raises(ValueError):
        limit_supertrace(model, unit(1), [])


def test_eigenvalues_are_nonnegative():
    model = build_model(3, 10)
    assert model._flat0.min() >= 0.0
    assert model._flat1.min() >= -1e-12


def test_spectrum_cache_round_trip(tmp_path):
    model = build_model(1, 8)
    store_spectrum(str(tmp_path), model)
    data = load_spectrum(str(tmp_path), 1, 8)
    assert data is not None
    assert data["dim_harmonic0"] == 2
    assert data["eigs0"][0][1] == 2
    assert load_spectrum(str(tmp_path), 2, 8) is None
