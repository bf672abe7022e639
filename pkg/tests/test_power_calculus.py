"""Sectorial probes, R-bounds, Dunford powers, domain probes."""

import math

import numpy as np
import pytest

from conelab.asymptotics import AsymptoticsTerm
from conelab.cone_geometry import CrossSection
from conelab.errors import ConfigError, NotSectorialError, UnsupportedError
from conelab.heat_solver import assemble_mode_operator
from conelab.mellin_sobolev import LogGrid
from conelab.operators import OperatorMatrix
from conelab.power_calculus import (ContourSpec, PowerProbeConfig, dunford_apply,
                                    dunford_power, eig_power_oracle,
                                    find_sectorial_shift, fractional_apply,
                                    power_domain_probe, r_bound_estimate,
                                    sectorial_probe, sectorial_probe_weighted)
from conelab.rational import QRat

CIRCLE = CrossSection.circle(length_over_pi=2)


def _random_hpd(rng, dim=8, shift=0.5):
    A = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return OperatorMatrix.dense(A @ A.conj().T / dim + shift * np.eye(dim))


def test_scalar_powers():
    M = OperatorMatrix.dense([[2.0]])
    assert abs(dunford_power(M, -1.0).data[0, 0] - 0.5) < 1e-10
    assert abs(dunford_power(M, -0.5).data[0, 0] - 2.0 ** -0.5) < 1e-8


def test_diagonal_power():
    D = OperatorMatrix.dense(np.diag([1.0, 4.0]))
    P = dunford_power(D, -0.3).data
    assert abs(P[0, 0] - 1.0) < 1e-8 and abs(P[1, 1] - 4.0 ** -0.3) < 1e-8
    assert abs(P[0, 1]) < 1e-10 and abs(P[1, 0]) < 1e-10


def test_oracle_equivalence_and_semigroup():
    rng = np.random.default_rng(7)
    M = _random_hpd(rng)
    z1, z2 = -0.6 + 0.2j, -0.35 - 0.15j
    P1, P2 = dunford_power(M, z1).data, dunford_power(M, z2).data
    assert np.max(np.abs(P1 - eig_power_oracle(M, z1))) < 1e-7
    assert np.max(np.abs(P1 @ P2 - dunford_power(M, z1 + z2).data)) < 1e-7


def test_contour_independence():
    rng = np.random.default_rng(3)
    M = _random_hpd(rng)
    rho = 0.5 * float(np.min(np.abs(M.eigenvalues())))
    a = dunford_power(M, -0.4, ContourSpec(rho=rho, n_quad=64)).data
    b = dunford_power(M, -0.4, ContourSpec(rho=rho, n_quad=128)).data
    assert np.max(np.abs(a - b)) < 1e-8


def test_dunford_apply_matches_power():
    rng = np.random.default_rng(5)
    M = _random_hpd(rng)
    v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    assert np.max(np.abs(dunford_apply(M, -0.5, v) -
                         dunford_power(M, -0.5).data @ v)) < 1e-9


def test_fractional_apply_integer_and_fraction():
    rng = np.random.default_rng(9)
    M = _random_hpd(rng)
    v = rng.standard_normal(8)
    want = eig_power_oracle(M, 1.5) @ v
    got = fractional_apply(M, 1.5, v)
    assert np.max(np.abs(got - want)) < 1e-7
    # plain integer power
    got2 = fractional_apply(M, 2.0, v)
    assert np.max(np.abs(got2 - M.data @ (M.data @ v))) < 1e-9


def test_imaginary_power_regularized():
    rng = np.random.default_rng(13)
    M = _random_hpd(rng)
    v = rng.standard_normal(8)
    got = fractional_apply(M, 0.5j, v)
    want = eig_power_oracle(M, 0.5j) @ v
    assert np.max(np.abs(got - want)) < 1e-6


def test_sectorial_probe_diag_matches_closed_form():
    M = OperatorMatrix.dense(np.diag([1.0, 2.0]))
    rep = sectorial_probe(M, math.pi / 2, n_samples=200)
    closed = max((1.0 + abs(l)) / min(abs(1.0 + l), abs(2.0 + l))
                 for l, _ in rep.samples)
    assert abs(rep.K - closed) < 1e-9
    # the true supremum sqrt(2) sits at |lambda| = 1 on the imaginary rays
    assert rep.K <= math.sqrt(2) + 1e-9


def test_sectorial_probe_scalar_identity():
    rep = sectorial_probe(OperatorMatrix.dense([[1.0]]), 0.0, n_samples=60)
    assert abs(rep.K - 1.0) < 1e-12


def test_sectorial_rejects_sector_hit():
    M = OperatorMatrix.dense(np.diag([-1.0, 2.0]))
    with pytest.raises(NotSectorialError):
        sectorial_probe(M, 0.5)


def test_weighted_probe_matches_base():
    rng = np.random.default_rng(1)
    M = _random_hpd(rng, shift=1.0)
    a = sectorial_probe(M, 0.6 * math.pi, n_samples=25)
    b = sectorial_probe_weighted(M, 0.6 * math.pi, k=3, n_samples=25)
    assert abs(a.K - b.K) < 1e-9 * max(1.0, a.K)


def test_r_bound_examples():
    M = OperatorMatrix.dense(np.diag([1.0, 2.0]))
    rb = r_bound_estimate(M, 0.0, N=1, trials=300, rng_seed=2)
    assert rb.estimate <= 1.0 + 1e-9
    assert rb.lower_bound_only
    # normal operator: R-estimate bounded by the uniform bound
    rep = sectorial_probe(M, 0.0, n_samples=100)
    rb4 = r_bound_estimate(M, 0.0, N=4, trials=1000, rng_seed=3)
    assert rb4.estimate <= rep.K + 1e-6
    with pytest.raises(UnsupportedError):
        r_bound_estimate(M, 0.0, N=13, trials=1)


def test_r_bound_collapsing_sum():
    # all lambda_k and x_k equal: ratio is exactly ||lam (M+lam)^-1 x|| / ||x||
    M = OperatorMatrix.dense(np.diag([1.0, 2.0]))
    lam = 3.0
    x = np.array([1.0, 1.0]) / math.sqrt(2.0)
    y = lam * np.linalg.solve(M.data + lam * np.eye(2), x)
    want = np.linalg.norm(y) / np.linalg.norm(x)
    signs = np.array([[1.0], [-1.0]])
    num = float(np.mean(np.linalg.norm(signs * y[None, :], axis=1) ** 2))
    den = float(np.mean(np.linalg.norm(signs * x[None, :], axis=1) ** 2))
    assert abs(math.sqrt(num / den) - want) < 1e-14


def test_find_sectorial_shift_ladder():
    g = LogGrid(-5.0, 129)
    L = assemble_mode_operator(1, 0, g, "neumann")
    c, rep = find_sectorial_shift(L, 0.75 * math.pi, n_samples=40)
    assert c >= 1.0 and math.isfinite(rep.K)


def test_power_domain_probe_verdicts():
    pc0 = PowerProbeConfig(cross_section=CIRCLE, mode_label="k=0", gamma=-0.5,
                           shift=1.0, tau_min=-3.0, points=121, levels=3)
    r = power_domain_probe(AsymptoticsTerm(QRat(0), 0, "k=0"), 0.5, pc0)
    assert r.verdict == "member"
    pc1 = PowerProbeConfig(cross_section=CIRCLE, mode_label="k=+1", gamma=-0.5,
                           shift=1.0, tau_min=-3.0, points=121, levels=3)
    r2 = power_domain_probe(AsymptoticsTerm(QRat(1), 0, "k=+1"), 0.9, pc1)
    assert r2.verdict == "non-member"
    assert all(rr >= r2.thresholds[1] for rr in r2.ratios)


def test_dunford_rejects_nonnegative_exponent():
    M = OperatorMatrix.dense([[2.0]])
    with pytest.raises(ConfigError):
        dunford_power(M, 0.5)


def test_tail_bound_guard():
    M = OperatorMatrix.dense([[2.0]])
    contour = ContourSpec(rho=1.0, r_max=10.0, tol_tail=1e-10)
    with pytest.raises(Exception):
        dunford_power(M, -0.2, contour)
