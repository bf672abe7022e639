"""Tip-expansion fitting: idempotence, robustness, exponent detection."""

from fractions import Fraction

import numpy as np
import pytest

from conelab.asymptotics import AsymptoticsBasis, AsymptoticsTerm, enumerate_asymptotics
from conelab.cone_geometry import CrossSection
from conelab.errors import ConfigError, IllConditionedFitError
from conelab.heat_solver import HeatConfig, solve_heat
from conelab.mellin_sobolev import LogGrid, RadialField
from conelab.rational import QRat
from conelab.symbol_algebra import ConeOperatorSpec, pole_set
from conelab.tip_analysis import decomposition_track, fit_tip_expansion

CIRCLE = CrossSection.circle(length_over_pi=2)


def _circle_basis(gamma=Fraction(-1, 2), max_modes=2):
    spec = ConeOperatorSpec.laplacian(CIRCLE, max_modes)
    return enumerate_asymptotics(pole_set(spec, gamma))


def test_fit_idempotence_random_draws():
    g = LogGrid(-8.0, 513)
    basis = _circle_basis()
    rng = np.random.default_rng(21)
    for _ in range(100):
        u = RadialField.zeros(g, CIRCLE, 2)
        coeffs = {}
        for rho, m, mode in basis.terms:
            c = complex(rng.standard_normal(), rng.standard_normal())
            coeffs[(complex(rho.to_complex() if isinstance(rho, QRat) else rho), m, mode)] = c
            u.values[u.mode_index(mode)] += c * AsymptoticsTerm(rho, m, mode).evaluate(g.x)
        fit = fit_tip_expansion(u, basis)
        for (rho, m, mode), want in coeffs.items():
            assert abs(fit.coefficient(rho, m, mode) - want) < 1e-8
        assert fit.residual_norm < 1e-10


def test_fit_exact_synthesized_example():
    # 3.0 * constant + 0.5 * x^2-profile on a nu=2 mode (circle of
    # circumference pi, mode k=+1)
    cs = CrossSection.circle(length_over_pi=1)
    g = LogGrid(-8.0, 513)
    triples = ((QRat(0), 0, "k=0"), (QRat(-2), 0, "k=+1"))
    basis = AsymptoticsBasis(terms=triples, provenance=None)
    u = RadialField.zeros(g, cs, 2)
    u.values[u.mode_index("k=0")] = 3.0
    u.values[u.mode_index("k=+1")] = 0.5 * g.x ** 2
    fit = fit_tip_expansion(u, basis)
    assert abs(fit.coefficient(0.0, 0, "k=0") - 3.0) < 1e-8
    assert abs(fit.coefficient(-2.0, 0, "k=+1") - 0.5) < 1e-8


def test_fit_orthogonal_mode_zero():
    g = LogGrid(-8.0, 513)
    basis = _circle_basis()
    u = RadialField.zeros(g, CIRCLE, 2)
    u.values[u.mode_index("k=0")] = 1.0
    fit = fit_tip_expansion(u, basis)
    assert abs(fit.coefficient(1.0, 0, "k=+1")) < 1e-8
    assert abs(fit.coefficient(0.0, 0, "k=0") - 1.0) < 1e-10


def test_window_robustness_on_heat_run():
    cs = CrossSection.circle(length_over_pi=1)
    g = LogGrid(-8.0, 1025)
    x = g.x
    prof = np.zeros_like(x)
    m = (x > 0.4) & (x < 0.8)
    prof[m] = np.exp(-1.0 / ((x[m] - 0.4) * (0.8 - x[m])))
    u0 = RadialField.zeros(g, cs, 2)
    u0.values[0] = prof
    u0.values[1] = 0.5 * prof
    u0.values[2] = 0.5 * prof
    cfg = HeatConfig(cross_section=cs, grid=g, T=0.05, dt=2e-4,
                     outer_bc="dirichlet", theta=0.5, max_modes=2)
    final = solve_heat(u0, None, cfg).final()
    spec = ConeOperatorSpec.laplacian(cs, 2)
    basis = enumerate_asymptotics(pole_set(spec, Fraction(0)))
    fit_a = fit_tip_expansion(final, basis, window=(0.01, 0.125))
    fit_b = fit_tip_expansion(final, basis, window=(0.02, 0.25))
    ca = fit_a.coefficient(0.0, 0, "k=0")
    cb = fit_b.coefficient(0.0, 0, "k=0")
    assert abs(ca - cb) <= 0.02 * abs(ca)


def test_track_constant_steady_state():
    g = LogGrid(-8.0, 257)
    basis = _circle_basis(max_modes=1)
    u0 = RadialField.zeros(g, CIRCLE, 1)
    u0.values[0] = 1.0
    cfg = HeatConfig(cross_section=CIRCLE, grid=g, T=0.05, dt=1e-3,
                     outer_bc="neumann", theta=0.5, max_modes=1,
                     snapshot_every=10)
    traj = solve_heat(u0, None, cfg)
    track = decomposition_track(traj, basis)
    paths = track.coefficient_path(0.0, 0, "k=0")
    assert all(abs(c - 1.0) < 1e-10 for c in paths)
    assert track.max_jump <= 1e-10


def test_track_zero_trajectory():
    g = LogGrid(-6.0, 129)
    basis = _circle_basis(max_modes=1)
    u0 = RadialField.zeros(g, CIRCLE, 1)
    cfg = HeatConfig(cross_section=CIRCLE, grid=g, T=0.02, dt=1e-3,
                     outer_bc="neumann", theta=0.5, max_modes=1,
                     snapshot_every=5)
    track = decomposition_track(solve_heat(u0, None, cfg), basis)
    assert track.max_jump == 0.0
    assert all(abs(c) == 0.0 for f in track.fits for c in
               [fc.c for fc in f.coefficients])


def test_ill_conditioned_window_rejected():
    g = LogGrid(-8.0, 513)
    # two nearly identical exponents make the design singular on any window
    triples = ((QRat(0), 0, "k=0"), (complex(1e-13, 0.0), 0, "k=0"))
    basis = AsymptoticsBasis(terms=triples, provenance=None)
    u = RadialField.zeros(g, CIRCLE, 1)
    u.values[0] = 1.0
    with pytest.raises(IllConditionedFitError):
        fit_tip_expansion(u, basis)


def test_window_validation():
    g = LogGrid(-6.0, 129)
    basis = _circle_basis(max_modes=1)
    u = RadialField.zeros(g, CIRCLE, 1)
    with pytest.raises(ConfigError):
        fit_tip_expansion(u, basis, window=(0.5, 0.4))
    with pytest.raises(ConfigError):
        fit_tip_expansion(u, basis, window=(0.01, 0.3))
