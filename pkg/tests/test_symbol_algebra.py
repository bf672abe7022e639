"""Conormal symbols, recursion families, pole sets."""

from fractions import Fraction

import pytest

from conelab.cone_geometry import CrossSection, indicial_roots_closed_form
from conelab.errors import ConfigError, DegenerateSymbolError, UnsupportedError
from conelab.rational import Poly, RationalFamily
from conelab.symbol_algebra import (ConeOperatorSpec, conormal_symbol, pole_set,
                                    pole_set_power, recursive_symbols,
                                    strip_bounds, taylor_symbols)

CIRCLE = CrossSection.circle(length_over_pi=2)
SPHERE = CrossSection.sphere(2)


def test_conormal_symbol_laplacian():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 3)
    assert conormal_symbol(spec, "k=+2") == Poly([-4, 0, 1])
    spec2 = ConeOperatorSpec.laplacian(SPHERE, 1)
    assert conormal_symbol(spec2, "l=0") == Poly([0, -1, 1])


def test_conormal_symbol_identity_coefficient():
    modes = CIRCLE.mode_table(1)
    spec = ConeOperatorSpec(mu=1, n=1, modes=modes,
                            coeffs={"k=0": (Poly([1]), Poly([]))})
    assert conormal_symbol(spec, "k=0") == Poly([1])


def test_unknown_mode_rejected():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 2)
    with pytest.raises(ConfigError):
        conormal_symbol(spec, "k=+9")


def test_taylor_symbols_straight_and_warped():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 2)
    fs = taylor_symbols(spec, "k=+1")
    assert fs[0] == conormal_symbol(spec, "k=+1")
    assert fs[1].is_zero()
    warped = ConeOperatorSpec.laplacian(CIRCLE, 2, warp_a0=1)
    fw = taylor_symbols(warped, "k=+1")
    assert fw[1] == Poly([-1])  # lambda_mode = -1


def test_recursive_symbols_reciprocal():
    modes = CIRCLE.mode_table(1)
    spec = ConeOperatorSpec(mu=1, n=1, modes=modes,
                            coeffs={"k=0": (Poly([]), Poly([1]))})
    g = recursive_symbols(spec, "k=0")
    assert g == [RationalFamily(Poly([1]), Poly([0, 1]))]


def test_recursive_symbols_warped_hand_value():
    # g_1 = -(T^-1 f0^-1) f_1 g_0 = 1/(x (x-2) (x-1) (x+1)) for mode k=1
    warped = ConeOperatorSpec.laplacian(CIRCLE, 2, warp_a0=1)
    g = recursive_symbols(warped, "k=+1")
    want = RationalFamily(Poly([1]),
                          Poly([0, 1]) * Poly([-2, 1]) * Poly([-1, 1]) * Poly([1, 1]))
    assert g[1] == want


def test_recursive_symbols_straight_vanish():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 2)
    g = recursive_symbols(spec, "k=0")
    assert g[1].is_zero()


def test_degenerate_symbol_rejected():
    modes = CIRCLE.mode_table(1)
    spec = ConeOperatorSpec(mu=1, n=1, modes=modes,
                            coeffs={"k=0": (Poly([]), Poly([]))})
    with pytest.raises(DegenerateSymbolError):
        recursive_symbols(spec, "k=0")


def test_pole_set_circle_example():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 3)
    ps = pole_set(spec, Fraction(-1, 2))
    assert ps.exact
    table = {complex(e.rho_complex): e.mode_orders for e in ps.entries}
    assert table == {0 + 0j: {"k=0": 2}, 1 + 0j: {"k=+1": 1, "k=-1": 1}}


def test_pole_set_sphere_example():
    spec = ConeOperatorSpec.laplacian(SPHERE, 3)
    ps = pole_set(spec, Fraction(0))
    table = {complex(e.rho_complex): e.mode_orders for e in ps.entries}
    assert table == {0 + 0j: {"l=0": 1}, 1 + 0j: {"l=0": 1}}


def test_pole_set_empty_for_constant_symbol():
    modes = CIRCLE.mode_table(1)
    spec = ConeOperatorSpec(mu=1, n=1, modes=modes,
                            coeffs={"k=0": (Poly([1]), Poly([]))})
    assert pole_set(spec, 0).entries == ()


def test_pole_set_closed_form_agreement():
    for cs, gamma in [(CIRCLE, Fraction(-1, 2)), (SPHERE, Fraction(0))]:
        spec = ConeOperatorSpec.laplacian(cs, 5)
        left, right = strip_bounds(cs.n, gamma, 2)
        ps = pole_set(spec, gamma)
        for mode in cs.mode_table(5):
            want = sorted({float(r) for r in
                           indicial_roots_closed_form(cs.n, mode.eigenvalue)
                           if left <= Fraction(r) < right})
            got = sorted(e.rho_complex.real for e in ps.entries
                         if mode.label in e.mode_orders)
            assert len(want) == len(got)
            assert all(abs(a - b) < 1e-12 for a, b in zip(got, want))


def test_pole_set_gamma_translation():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 4)
    for num in range(-8, 2):
        gamma = Fraction(num, 8)
        ps = pole_set(spec, gamma)
        left, right = strip_bounds(1, gamma, 2)
        assert ps.strip == (left, right)
        rhos = {e.rho_complex.real for e in ps.entries}
        # membership is exactly the strip filter over the closed-form roots
        want = set()
        for mode in CIRCLE.mode_table(4):
            for r in indicial_roots_closed_form(1, mode.eigenvalue):
                if left <= Fraction(r) < right:
                    want.add(float(r))
        assert rhos == want


def test_pole_set_power_k1_identical():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 3)
    a = pole_set(spec, Fraction(-1, 2))
    b = pole_set_power(spec, Fraction(-1, 2), 1)
    assert [(e.rho, e.mode_orders) for e in a.entries] == \
        [(e.rho, e.mode_orders) for e in b.entries]


def test_pole_set_power_circle_k2():
    spec = ConeOperatorSpec.laplacian(CIRCLE, 4)
    ps = pole_set_power(spec, Fraction(-1, 2), 2)
    table = {complex(e.rho_complex): e.mode_orders for e in ps.entries}
    assert table[0 + 0j]["k=0"] == 2
    assert table[0 + 0j]["k=+2"] == 1 and table[0 + 0j]["k=-2"] == 1
    assert table[-2 + 0j]["k=0"] == 2
    assert table[-2 + 0j]["k=+2"] == 1
    # merged double across the two +/-1 factors
    assert table[-1 + 0j] == {"k=+1": 2, "k=-1": 2}
    assert table[1 + 0j] == {"k=+1": 1, "k=-1": 1, "k=+3": 1, "k=-3": 1}


def test_pole_set_power_sphere_l0():
    spec = ConeOperatorSpec.laplacian(SPHERE, 1)
    ps = pole_set_power(spec, Fraction(0), 2)
    assert sorted(e.rho_complex.real for e in ps.entries) == [-2.0, -1.0, 0.0, 1.0]


def test_pole_set_power_warped_unsupported():
    warped = ConeOperatorSpec.laplacian(CIRCLE, 2, warp_a0=1)
    with pytest.raises(UnsupportedError):
        pole_set_power(warped, Fraction(-1, 2), 2)


def test_warped_pole_set_flagged():
    warped = ConeOperatorSpec.laplacian(CIRCLE, 2, warp_a0=1)
    ps = pole_set(warped, Fraction(-1, 2))
    assert ps.convention_pending
