"""Deformed product: plane-wave law, grid route, phase-space calculus."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import gaussian_grid_values
from deformkit.deformation import (
    OscIntegralConfig,
    deformed_product_exact,
    deformed_product_numeric,
    fourier_inversion_check,
    oscillatory_pair_integral,
    symbol_compose,
    symbol_dagger,
    tilde_map,
)
from deformkit.errors import BoxMismatchError, ConvergenceError
from deformkit.symbols import (
    DeformationMatrix,
    GridSymbol,
    PlaneWavePhaseSymbol,
    PlaneWaveSymbol,
    symbol_star,
)

RNG = np.random.default_rng(16180)
L = 6.0
J_HALF = DeformationMatrix.symplectic(0.5, 2)


def random_plane_wave(n, L_, k, m_max, n_terms, rng=RNG):
    terms = []
    for _ in range(n_terms):
        m = tuple(int(v) for v in rng.integers(-m_max, m_max + 1, size=n))
        c = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
        terms.append((m, c))
    return PlaneWaveSymbol(n, L_, k, tuple(terms))


def wave(m, coeff=1.0):
    return PlaneWaveSymbol(2, L, 1, ((tuple(m), coeff),))


def term_map(f):
    return {m: np.asarray(c) for m, c in f.terms}


# ---------------------------------------------------------------------------
# Plane-wave law (the coefficient phase is written out independently here)


@pytest.mark.parametrize("theta", [0.0, 0.25, 1.0])
def test_plane_wave_pair_law(theta):
    J = DeformationMatrix.symplectic(theta, 2)
    for _ in range(10):
        p = tuple(int(v) for v in RNG.integers(-3, 4, size=2))
        q = tuple(int(v) for v in RNG.integers(-3, 4, size=2))
        prod = deformed_product_exact(wave(p), wave(q), J)
        pf = np.asarray(p, float) / (2 * L)
        qf = np.asarray(q, float) / (2 * L)
        expected = np.exp(-2j * np.pi * float(pf @ (J.entries @ qf)))
        got = term_map(prod)
        key = tuple(int(a + b) for a, b in zip(p, q))
        assert set(got) == {key}
        assert_allclose(got[key], [[expected]], atol=1e-14)


def test_theta_zero_is_pointwise_product():
    f = random_plane_wave(2, L, 2, 2, 3)
    g = random_plane_wave(2, L, 2, 2, 3)
    prod = deformed_product_exact(f, g, DeformationMatrix.zero(2))
    x = RNG.uniform(-L, L, size=(5, 2))
    assert_allclose(prod.evaluate(x), f.evaluate(x) @ g.evaluate(x), atol=1e-12)


def test_commutation_phase():
    for _ in range(10):
        p = tuple(int(v) for v in RNG.integers(-3, 4, size=2))
        q = tuple(int(v) for v in RNG.integers(-3, 4, size=2))
        fg = deformed_product_exact(wave(p), wave(q), J_HALF)
        gf = deformed_product_exact(wave(q), wave(p), J_HALF)
        pf = np.asarray(p, float) / (2 * L)
        qf = np.asarray(q, float) / (2 * L)
        phase = np.exp(-4j * np.pi * float(pf @ (J_HALF.entries @ qf)))
        key = tuple(int(a + b) for a, b in zip(p, q))
        assert_allclose(term_map(fg)[key], phase * term_map(gf)[key], atol=1e-14)


def test_exact_associativity():
    for _ in range(5):
        f = random_plane_wave(2, L, 1, 2, 3)
        g = random_plane_wave(2, L, 1, 2, 3)
        h = random_plane_wave(2, L, 1, 2, 3)
        left = deformed_product_exact(deformed_product_exact(f, g, J_HALF), h, J_HALF)
        right = deformed_product_exact(f, deformed_product_exact(g, h, J_HALF), J_HALF)
        lt, rt = term_map(left), term_map(right)
        assert set(lt) == set(rt)
        for m in lt:
            assert_allclose(lt[m], rt[m], atol=1e-12)


def test_star_is_antihomomorphism():
    # (f x_J g)* = g* x_J f* for the deformed product.
    f = random_plane_wave(2, L, 2, 2, 3)
    g = random_plane_wave(2, L, 2, 2, 3)
    lhs = term_map(symbol_star(deformed_product_exact(f, g, J_HALF)))
    rhs = term_map(deformed_product_exact(symbol_star(g), symbol_star(f), J_HALF))
    assert set(lhs) == set(rhs)
    for m in lhs:
        assert_allclose(lhs[m], rhs[m], atol=1e-12)


def test_exact_route_needs_plane_waves():
    g = GridSymbol(2, 16, L, gaussian_grid_values(2, 16, L, 2.0))
    with pytest.raises(TypeError):
        deformed_product_exact(g, g, J_HALF)


def test_exact_route_rejects_box_mismatch():
    f = random_plane_wave(2, L, 1, 2, 2)
    g = random_plane_wave(2, 2 * L, 1, 2, 2)
    with pytest.raises(BoxMismatchError):
        deformed_product_exact(f, g, J_HALF)


# ---------------------------------------------------------------------------
# Grid route


def test_numeric_route_matches_exact_on_band_limited():
    N = 16
    cfg = OscIntegralConfig(check_points=0)
    for theta in (0.0, 0.25, 1.0):
        J = DeformationMatrix.symplectic(theta, 2)
        f = random_plane_wave(2, L, 1, 3, 4)
        g = random_plane_wave(2, L, 1, 3, 4)
        exact = deformed_product_exact(f, g, J).to_grid(N)
        numeric = deformed_product_numeric(f.to_grid(N), g.to_grid(N), J, cfg)
        scale = np.abs(exact.values).max()
        assert np.abs(numeric.values - exact.values).max() <= 1e-12 * scale


def test_numeric_route_reports_disagreement():
    f = GridSymbol(2, 16, L, gaussian_grid_values(2, 16, L, 2.0))
    g = GridSymbol(2, 16, L, gaussian_grid_values(2, 16, L, 3.0))
    report = {}
    deformed_product_numeric(f, g, J_HALF, report=report)
    assert report["points_checked"] == 5
    assert report["route_disagreement"] <= 10 * report["tolerance"]


def test_numeric_route_raises_on_tight_tolerance():
    # The quadrature oracle cannot reach 1e-16, so the gate must trip.
    f = GridSymbol(2, 16, L, gaussian_grid_values(2, 16, L, 2.0))
    g = GridSymbol(2, 16, L, gaussian_grid_values(2, 16, L, 3.0))
    with pytest.raises(ConvergenceError):
        deformed_product_numeric(f, g, J_HALF, OscIntegralConfig(tol=1e-16))


def test_numeric_route_rejects_resolution_mismatch():
    f = GridSymbol(2, 16, L, gaussian_grid_values(2, 16, L, 2.0))
    g = GridSymbol(2, 32, L, gaussian_grid_values(2, 32, L, 2.0))
    with pytest.raises(BoxMismatchError):
        deformed_product_numeric(f, g, J_HALF)


def test_numeric_commutator_vanishes_at_theta_zero():
    f = GridSymbol(2, 16, L, gaussian_grid_values(2, 16, L, 2.0))
    vals = gaussian_grid_values(2, 16, L, 3.0)
    ax = (np.arange(16) - 8) * (2 * L / 16)
    vals = vals * np.exp(0.5j * ax)[:, None, None, None]
    g = GridSymbol(2, 16, L, vals)
    J0 = DeformationMatrix.zero(2)
    cfg = OscIntegralConfig(check_points=0)
    fg = deformed_product_numeric(f, g, J0, cfg)
    gf = deformed_product_numeric(g, f, J0, cfg)
    assert np.abs(fg.values - gf.values).max() <= 1e-12


# ---------------------------------------------------------------------------
# Phase-space lift and calculus


def test_tilde_map_of_plane_wave():
    f = wave((1, -2), 0.7)
    lifted = tilde_map(f, J_HALF)
    assert isinstance(lifted, PlaneWavePhaseSymbol)
    ((m, w, c),) = lifted.terms
    assert m == (1, -2)
    p = np.array([1.0, -2.0]) / (2 * L)
    assert_allclose(w, J_HALF.entries @ p, atol=1e-15)
    assert_allclose(c, [[0.7]], atol=1e-15)


def test_tilde_map_at_theta_zero_has_no_xi_dependence():
    f = random_plane_wave(2, L, 1, 2, 3)
    lifted = tilde_map(f, DeformationMatrix.zero(2))
    assert all(np.abs(np.asarray(w)).max() == 0.0 for _, w, _ in lifted.terms)


def test_dagger_is_involutive():
    a = PlaneWavePhaseSymbol(
        1, 4.0, 2,
        (((1,), (0.5,), RNG.normal(size=(2, 2)) + 1j * RNG.normal(size=(2, 2))),
         ((-2,), (-0.3,), RNG.normal(size=(2, 2)))),
    )
    cfg = OscIntegralConfig(check_points=0)
    again = symbol_dagger(symbol_dagger(a, cfg), cfg)
    assert len(again.terms) == len(a.terms)
    for (m, w, c), (m2, w2, c2) in zip(a.terms, again.terms):
        assert m == m2
        assert_allclose(w, w2, atol=1e-15)
        assert_allclose(c, c2, atol=1e-12)


def test_dagger_quadrature_gate_passes_on_defaults():
    a = PlaneWavePhaseSymbol(1, 4.0, 1, (((1,), (0.5,), 1.0 + 0.5j),))
    symbol_dagger(a)


def test_compose_with_constant_is_scaling():
    one = PlaneWavePhaseSymbol.constant(2.0, 1, 4.0)
    a = PlaneWavePhaseSymbol(1, 4.0, 1, (((1,), (0.5,), 1.0 + 0.5j),))
    cfg = OscIntegralConfig(check_points=0)
    prod = symbol_compose(one, a, cfg)
    ((m, w, c),) = prod.terms
    assert m == (1,)
    assert_allclose(c, [[2.0 + 1.0j]], atol=1e-14)


def test_compose_coefficient_phase():
    # Composition adds frequencies and twists by exp(i w_a . omega_b).
    a = PlaneWavePhaseSymbol(1, 4.0, 1, (((1,), (0.5,), 1.0),))
    b = PlaneWavePhaseSymbol(1, 4.0, 1, (((2,), (-0.2,), 1.0),))
    cfg = OscIntegralConfig(check_points=0)
    prod = symbol_compose(a, b, cfg)
    ((m, w, c),) = prod.terms
    assert m == (3,)
    assert_allclose(w, [0.3], atol=1e-15)
    omega_b = np.pi * 2 / 4.0
    assert_allclose(c, [[np.exp(1j * 0.5 * omega_b)]], atol=1e-14)


def test_compose_quadrature_gate_passes_on_defaults():
    a = PlaneWavePhaseSymbol(1, 4.0, 1, (((1,), (0.5,), 1.0),))
    b = PlaneWavePhaseSymbol(1, 4.0, 1, (((-1,), (0.2,), 0.5),))
    symbol_compose(a, b)


# ---------------------------------------------------------------------------
# Oscillatory quadrature


def test_pair_integral_of_constants():
    # F = G = 1 gives int int e^{-2 pi i u.v} du dv = 1 after regularization.
    one = [((0.0,), np.eye(1))]
    value = oscillatory_pair_integral(one, one, 1, 1, OscIntegralConfig())
    assert_allclose(value, [[1.0]], atol=1e-8)


def test_pair_integral_matches_point_evaluation():
    # F constant, G a single wave: the integral collapses to G(0) = c.
    c = 0.7 - 0.2j
    f_terms = [((0.0,), np.eye(1))]
    g_terms = [((0.25,), c * np.eye(1))]
    value = oscillatory_pair_integral(f_terms, g_terms, 1, 1, OscIntegralConfig())
    assert_allclose(value, [[c]], atol=1e-6)


def test_regularization_orders_must_exceed_half_dimension():
    with pytest.raises(ValueError):
        OscIntegralConfig(n_reg=0).resolve(1)


def test_fourier_inversion_on_plane_wave():
    f = random_plane_wave(1, 4.0, 1, 2, 3)
    for x in (-1.0, 0.0, 0.7):
        assert fourier_inversion_check(f, np.array([x])) <= 1e-6


def test_fourier_inversion_on_constant_is_sharper():
    f = PlaneWaveSymbol(1, 4.0, 1, (((0,), 1.0),))
    for x in (-1.0, 0.0, 0.7):
        assert fourier_inversion_check(f, np.array([x])) <= 1e-8


def test_fourier_inversion_on_grid_gaussian():
    g = GridSymbol(1, 64, 6.0, gaussian_grid_values(1, 64, 6.0, 2.0))
    for x in (-1.0, 0.5):
        assert fourier_inversion_check(g, np.array([x])) <= 1e-6
