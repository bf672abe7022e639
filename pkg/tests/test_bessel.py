"""Hand-rolled Bessel evaluation against library and high-precision oracles."""

import math

import mpmath
import numpy as np
import pytest
from scipy.special import jv, jvp

from conelab.bessel import (besselj, besselj_derivative, radial_eigenfunction,
                            radial_eigenvalue_roots)
from conelab.errors import NumericalError


@pytest.mark.parametrize("nu", [0.0, 0.3, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 7.7])
def test_besselj_matches_scipy(nu):
    z = np.concatenate([np.linspace(0.0, 11.9, 150), np.linspace(12.1, 60.0, 200)])
    assert np.max(np.abs(besselj(nu, z) - jv(nu, z))) < 5e-10


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.0, 3.5])
def test_derivative_matches_scipy(nu):
    z = np.linspace(0.01, 50.0, 173)
    assert np.max(np.abs(besselj_derivative(nu, z) - jvp(nu, z))) < 5e-10


def test_branch_agreement_at_switch():
    # series and large-argument branches evaluated at the same point
    from conelab.bessel import _besselj_series
    for nu in (0.0, 1.0, 2.5):
        z = np.array([12.05])
        assert abs(_besselj_series(nu, z)[0] - besselj(nu, 12.05)) < 1e-9


def test_dirichlet_zeros_vs_mpmath():
    roots = radial_eigenvalue_roots(0.0, 1, "dirichlet", 3)
    for j, r in enumerate(roots, start=1):
        assert abs(r - float(mpmath.besseljzero(0, j))) < 5e-12
    # the classical constant, recomputed to full precision
    assert abs(roots[0] - 2.404825557695773) < 1e-12


def test_neumann_zero_of_jprime():
    # mpmath counts z = 0 as the first zero of J0'; ours starts positive
    r = radial_eigenvalue_roots(0.0, 1, "neumann", 1)[0]
    assert abs(r - float(mpmath.besseljzero(0, 2, derivative=1))) < 1e-10


def test_radial_eigenfunction_constant_branch():
    x = np.linspace(0.01, 1.0, 17)
    assert np.allclose(radial_eigenfunction(1.0, 2, 0.0, x), 1.0)


def test_eigenfunction_satisfies_radial_ode():
    # u = x^{-(n-1)/2} J_nu(k x) must satisfy u'' + n/x u' + lam/x^2 u = -k^2 u
    n, lam = 2, -2.0
    nu = math.sqrt(((n - 1) / 2.0) ** 2 - lam)
    k = radial_eigenvalue_roots(nu, n, "dirichlet", 1)[0]
    x = np.linspace(0.2, 0.9, 301)
    h = x[1] - x[0]
    u = radial_eigenfunction(nu, n, k, x)
    upp = (u[2:] - 2 * u[1:-1] + u[:-2]) / h ** 2
    up = (u[2:] - u[:-2]) / (2 * h)
    xm = x[1:-1]
    res = upp + n / xm * up + lam / xm ** 2 * u[1:-1] + k * k * u[1:-1]
    assert np.max(np.abs(res)) < 5e-3 * k * k * np.max(np.abs(u))


def test_negative_argument_rejected():
    with pytest.raises(NumericalError):
        besselj(0.0, -1.0)
    with pytest.raises(NumericalError):
        besselj(-1.0, 1.0)
