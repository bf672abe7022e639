"""Compiled kernels against the numpy/scipy fallback path."""

import json
import os
import subprocess
import sys
import textwrap

import numpy as np

from conelab import _kernels


def _random_bands(rng, nb, J):
    dl = rng.standard_normal((nb, J)) * 0.1 + 0j
    du = rng.standard_normal((nb, J)) * 0.1 + 0j
    d = (2.0 + np.abs(rng.standard_normal((nb, J)))).astype(complex)  # diagonally dominant
    dl[:, 0] = 0.0
    du[:, -1] = 0.0
    return dl, d, du


def test_thomas_batch_matches_dense_solve():
    rng = np.random.default_rng(8)
    dl, d, du = _random_bands(rng, 3, 40)
    rhs = rng.standard_normal((3, 40)) + 1j * rng.standard_normal((3, 40))
    out = _kernels.thomas_batch(dl, d, du, rhs)
    for b in range(3):
        A = np.diag(d[b]) + np.diag(dl[b, 1:], -1) + np.diag(du[b, :-1], 1)
        assert np.allclose(A @ out[b], rhs[b], atol=1e-11)


def test_matvec_matches_dense():
    rng = np.random.default_rng(2)
    dl, d, du = _random_bands(rng, 2, 17)
    u = rng.standard_normal((2, 17)) + 0j
    out = _kernels.tridiag_matvec(dl, d, du, u)
    for b in range(2):
        A = np.diag(d[b]) + np.diag(dl[b, 1:], -1) + np.diag(du[b, :-1], 1)
        assert np.allclose(out[b], A @ u[b])


def test_evolve_theta_equals_stepwise():
    rng = np.random.default_rng(5)
    dl, d, du = _random_bands(rng, 2, 25)
    Adl, Ad, Adu = -0.5 * dl, 1.0 - 0.5 * d, -0.5 * du
    Bdl, Bd, Bdu = 0.5 * dl, 1.0 + 0.5 * d, 0.5 * du
    u0 = rng.standard_normal((2, 25)) + 0j
    final, snaps = _kernels.evolve_theta(Adl, Ad, Adu, Bdl, Bd, Bdu, u0, 6, 2)
    u = u0.copy()
    for _ in range(6):
        rhs = _kernels.tridiag_matvec(Bdl, Bd, Bdu, u)
        u = _kernels.thomas_batch(Adl, Ad, Adu, rhs)
    assert np.allclose(final, u, atol=1e-12)
    assert snaps.shape == (3, 2, 25)
    assert np.allclose(snaps[-1], u, atol=1e-12)


def test_fallback_backend_agrees():
    """Run the same evolution under CONELAB_NUMBA=0 in a subprocess."""
    code = textwrap.dedent("""
        import json, sys
        import numpy as np
        from conelab import _kernels
        assert _kernels.backend_name() == "numpy", _kernels.backend_name()
        rng = np.random.default_rng(5)
        dl = rng.standard_normal((2, 25)) * 0.1 + 0j
        du = rng.standard_normal((2, 25)) * 0.1 + 0j
        d = (2.0 + np.abs(rng.standard_normal((2, 25)))).astype(complex)
        dl[:, 0] = 0.0; du[:, -1] = 0.0
        Adl, Ad, Adu = -0.5*dl, 1.0-0.5*d, -0.5*du
        Bdl, Bd, Bdu = 0.5*dl, 1.0+0.5*d, 0.5*du
        u0 = rng.standard_normal((2, 25)) + 0j
        final, snaps = _kernels.evolve_theta(Adl, Ad, Adu, Bdl, Bd, Bdu, u0, 6, 2)
        print(json.dumps([final.real.tolist(), final.imag.tolist()]))
    """)
    env = dict(os.environ, CONELAB_NUMBA="0")
    proc = subprocess.run([sys.executable, "-c", code], env=env,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    re_part, im_part = json.loads(proc.stdout)
    other = np.array(re_part) + 1j * np.array(im_part)

    rng = np.random.default_rng(5)
    dl = rng.standard_normal((2, 25)) * 0.1 + 0j
    du = rng.standard_normal((2, 25)) * 0.1 + 0j
    d = (2.0 + np.abs(rng.standard_normal((2, 25)))).astype(complex)
    dl[:, 0] = 0.0
    du[:, -1] = 0.0
    Adl, Ad, Adu = -0.5 * dl, 1.0 - 0.5 * d, -0.5 * du
    Bdl, Bd, Bdu = 0.5 * dl, 1.0 + 0.5 * d, 0.5 * du
    u0 = rng.standard_normal((2, 25)) + 0j
    final, _ = _kernels.evolve_theta(Adl, Ad, Adu, Bdl, Bd, Bdu, u0, 6, 2)
    assert np.allclose(final, other, atol=1e-12)
