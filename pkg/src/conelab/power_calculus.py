"""Sectoriality probes, randomized R-bound estimates, Dunford complex powers.

Operators here are finite-dimensional stand-ins (discretized per-mode radial
operators or plain matrices). The Dunford integral runs over the keyhole
contour: in along the lower ray arg(-theta), around the circle of radius
rho through the negative axis, out along arg(+theta); the branch of
(-lambda)^z is the principal one, cut along the positive real axis.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConfigError, NotSectorialError, NumericalError, UnsupportedError
from .operators import OperatorMatrix


@dataclass(frozen=True)
class ContourSpec:
    rho: float                   # circle radius, below min |spectrum|
    theta: float = 0.75 * math.pi
    n_quad: int = 64             # Gauss-Legendre points per segment
    r_max: float | None = None   # ray truncation; None derives it from tol_tail
    tol_tail: float = 1e-10
    sectorial_bound: float = 10.0  # K used in the analytic tail bound

    def __post_init__(self):
        if not 0.0 < self.theta < math.pi:
            raise ConfigError("contour angle must lie in (0, pi)")
        if self.rho < 0:
            raise ConfigError("contour radius must be >= 0")
        if self.r_max is not None and self.r_max <= self.rho:
            raise ConfigError("r_max must exceed the circle radius")


@dataclass
class SectorialReport:
    K: float
    theta: float
    samples: list                # (lambda, (1+|lambda|)*norm) pairs
    spectrum_checked: bool
    min_abs_eig: float

    def __float__(self):
        return self.K


def _sector_samples(theta: float, n_samples: int, lam_max: float) -> list[complex]:
    radii = np.geomspace(1e-6, lam_max, n_samples)
    lams: list[complex] = [0.0 + 0.0j]
    rays = [0.0] if theta == 0.0 else [0.0, theta, -theta]
    for ang in rays:
        lams.extend(r * cmath.exp(1j * ang) for r in radii)
    return lams


def _check_sector_clear(M: OperatorMatrix, theta: float):
    """Verify spec(-M) stays out of the closed sector |arg| <= theta."""
    if M.dim <= 1500:
        eigs = M.eigenvalues()
        for e in eigs:
            me = -e
            if abs(me) < 1e-14 or abs(cmath.phase(me)) <= theta + 1e-12:
                raise NotSectorialError(
                    f"not sectorial at angle {theta:.4f}: eigenvalue {e} puts "
                    f"-M inside the sector")
        return True, float(np.min(np.abs(eigs)))
    # too large for dense eigenvalues: fall back to an inverse-iteration
    # estimate of the closest eigenvalue and report the check as partial
    mu = M.min_abs_eigenvalue_estimate()
    if mu < 1e-12:
        raise NotSectorialError("operator numerically singular; sector contains 0")
    return False, mu


def sectorial_probe(M: OperatorMatrix, theta: float, n_samples: int = 200,
                    lam_max: float = 1e6) -> SectorialReport:
    """K = max over sampled lambda in S_theta of (1+|lambda|) ||(M+lambda)^-1||.

    Samples run log-spaced along the boundary rays +/- theta, the positive
    real axis, and lambda = 0 exactly. The spectrum/sector separation is
    verified by dense eigenvalues when affordable.
    """
    checked, min_eig = _check_sector_clear(M, theta)
    samples = []
    K = 0.0
    for lam in _sector_samples(theta, n_samples, lam_max):
        nrm = M.inv_norm2_estimate(lam) if M.kind == "tridiag" else \
            float(np.linalg.norm(np.linalg.inv(M.to_dense() + lam * np.eye(M.dim)), 2))
        val = (1.0 + abs(lam)) * nrm
        samples.append((lam, val))
        K = max(K, val)
    return SectorialReport(K=max(K, 1.0), theta=theta, samples=samples,
                           spectrum_checked=checked, min_abs_eig=min_eig)


def sectorial_probe_weighted(M: OperatorMatrix, theta: float, k: int,
                             n_samples: int = 50, lam_max: float = 1e6) -> SectorialReport:
    """Probe on the power-scale restriction: resolvent norm in ||M^{k-1} .||.

    Finite-dimensional content of the power-scale lemma: the weighted-norm
    resolvent is the conjugate W (M+lambda)^-1 W^-1 with W = M^{k-1}, which
    commutes back to the base resolvent. Values must match sectorial_probe.
    """
    if k < 1:
        raise ConfigError("k must be >= 1")
    A = M.to_dense()
    W = np.linalg.matrix_power(A, k - 1)
    Winv = np.linalg.inv(W) if k > 1 else np.eye(M.dim)
    checked, min_eig = _check_sector_clear(M, theta)
    samples = []
    K = 0.0
    for lam in _sector_samples(theta, n_samples, lam_max):
        R = np.linalg.inv(A + lam * np.eye(M.dim))
        val = (1.0 + abs(lam)) * float(np.linalg.norm(W @ R @ Winv, 2))
        samples.append((lam, val))
        K = max(K, val)
    return SectorialReport(K=max(K, 1.0), theta=theta, samples=samples,
                           spectrum_checked=checked, min_abs_eig=min_eig)


def find_sectorial_shift(L: OperatorMatrix, theta: float, c0: float = 1.0,
                         max_doublings: int = 24, n_samples: int = 60) -> tuple[float, SectorialReport]:
    """Doubling-ladder search for a shift c with c - L sectorial of angle theta.

    A numerical surrogate for the existence statement; reports the first c
    on the ladder whose shifted operator clears the sector.
    """
    c = c0
    for _ in range(max_doublings):
        try:
            report = sectorial_probe((-L).shifted(c), theta, n_samples=n_samples)
            return c, report
        except NotSectorialError:
            c *= 2.0
    raise NotSectorialError(f"no sectorial shift found on the ladder up to c={c}")


@dataclass
class RBoundReport:
    estimate: float              # lower bound only
    theta: float
    N: int
    trials: int
    seed: int
    lower_bound_only: bool = True


def r_bound_estimate(M: OperatorMatrix, theta: float, N: int, trials: int,
                     rng_seed: int = 0) -> RBoundReport:
    """Monte-Carlo lower estimate of the randomized resolvent bound.

    Each trial draws lambda_k in the sector and unit vectors x_k, then forms
    the exact Rademacher average over all 2^N sign patterns of
    || sum e_k lambda_k (M+lambda_k)^-1 x_k || / || sum e_k x_k ||
    in the L2(0,1) sense. The maximum over trials is reported, flagged as a
    lower bound.
    """
    if N < 1:
        raise ConfigError("N must be >= 1")
    if N > 12:
        raise UnsupportedError("exact sign-pattern expectation limited to N <= 12")
    rng = np.random.default_rng(rng_seed)
    dim = M.dim
    best = 0.0
    signs = np.array([[1.0 if (p >> k) & 1 == 0 else -1.0 for k in range(N)]
                      for p in range(2 ** N)])
    for _ in range(trials):
        radii = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), N))
        angs = rng.uniform(-theta, theta, N)
        lams = radii * np.exp(1j * angs)
        xs = rng.standard_normal((N, dim)) + 1j * rng.standard_normal((N, dim))
        xs /= np.linalg.norm(xs, axis=1, keepdims=True)
        ys = np.stack([lam * M.solve_shifted(lam, x) for lam, x in zip(lams, xs)])
        num = float(np.mean(np.linalg.norm(signs @ ys, axis=1) ** 2))
        den = float(np.mean(np.linalg.norm(signs @ xs, axis=1) ** 2))
        if den > 0:
            best = max(best, math.sqrt(num / den))
    return RBoundReport(estimate=best, theta=theta, N=N, trials=trials, seed=rng_seed)


# -- Dunford complex powers -------------------------------------------------

def default_contour(M: OperatorMatrix, z: complex, theta: float = 0.75 * math.pi,
                    n_quad: int = 64, tol_tail: float = 1e-10,
                    sectorial_bound: float = 10.0) -> ContourSpec:
    """Circle radius at half the closest eigenvalue; r_max from the tail bound."""
    if M.dim <= 600:
        min_eig = float(np.min(np.abs(M.eigenvalues())))
    else:
        min_eig = M.min_abs_eigenvalue_estimate()
    if min_eig <= 0:
        raise NotSectorialError("operator has (numerically) zero eigenvalue")
    return ContourSpec(rho=0.5 * min_eig, theta=theta, n_quad=n_quad,
                       tol_tail=tol_tail, sectorial_bound=sectorial_bound)


def _contour_nodes(contour: ContourSpec, z: complex):
    """Quadrature nodes/weights for (1/2 pi i) * integral over the keyhole.

    Returns (lams, weights) with the 1/(2 pi i) factor and the orientation
    folded into the weights, plus the reported analytic tail bound.
    """
    rez = z.real
    if rez >= 0:
        raise ConfigError("Dunford quadrature needs Re z < 0")
    rho, theta = contour.rho, contour.theta
    if contour.r_max is not None:
        r_max = contour.r_max
        tail = contour.sectorial_bound / math.pi * r_max ** rez / (-rez)
    else:
        target = contour.tol_tail
        r_max = (target * math.pi * (-rez) / contour.sectorial_bound) ** (1.0 / rez)
        r_max = min(max(r_max, 10.0 * max(rho, 1.0)), 1e300)
        tail = contour.sectorial_bound / math.pi * r_max ** rez / (-rez)
    xg, wg = leggauss(contour.n_quad)
    lams, weights = [], []
    # circle arc, traversed from 2pi-theta down to theta (through the cut-free
    # negative axis): contributes minus the increasing-angle integral
    a, b = theta, 2.0 * math.pi - theta
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    for xi, wi in zip(xg, wg):
        phi = mid + half * xi
        lam = rho * cmath.exp(1j * phi)
        lams.append(lam)
        weights.append(-wi * half * 1j * lam * _neglam_pow(lam, z))
    # rays, integrated in log r segment by segment (one per decade)
    n_dec = max(1, int(math.ceil(math.log10(max(r_max / max(rho, 1e-300), 10.0)))))
    edges = np.geomspace(max(rho, 1e-300), r_max, n_dec + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        smid, shalf = 0.5 * (math.log(lo) + math.log(hi)), 0.5 * (math.log(hi) - math.log(lo))
        for xi, wi in zip(xg, wg):
            r = math.exp(smid + shalf * xi)
            for sgn in (+1.0, -1.0):
                lam = r * cmath.exp(sgn * 1j * theta)
                lams.append(lam)
                # dr = r ds; ray direction e^{sgn i theta}; lower ray reversed
                weights.append(sgn * wi * shalf * r * cmath.exp(sgn * 1j * theta)
                               * _neglam_pow(lam, z))
    scale = 1.0 / (2.0j * math.pi)
    return np.array(lams), scale * np.array(weights), tail


def _neglam_pow(lam: complex, z: complex) -> complex:
    return cmath.exp(z * cmath.log(-lam))


def dunford_power(M: OperatorMatrix, z: complex, contour: ContourSpec | None = None) -> OperatorMatrix:
    """A^z for Re z < 0 by contour quadrature of (-lambda)^z (A+lambda)^-1.

    Dense result; the tail bound of the ray truncation is recorded in the
    provenance and must sit below the contour tolerance.
    """
    z = complex(z)
    contour = contour or default_contour(M, z)
    lams, weights, tail = _contour_nodes(contour, z)
    if tail > 10.0 * contour.tol_tail:
        raise NumericalError(f"ray truncation tail bound {tail:.2e} above tolerance; "
                             "increase R_max")
    dim = M.dim
    acc = np.zeros((dim, dim), dtype=complex)
    eye = np.eye(dim)
    if M.kind == "dense":
        for lam, w in zip(lams, weights):
            acc += w * np.linalg.inv(M.data + lam * eye)
    else:
        for j in range(dim):
            cols = M.solve_shifted_batch(lams, eye[j])
            acc[:, j] = weights @ cols
    prov = {"z": z, "contour": contour, "tail_bound": tail, "base": M.provenance}
    return OperatorMatrix.dense(acc, **prov)


def dunford_apply(M: OperatorMatrix, z: complex, v: np.ndarray,
                  contour: ContourSpec | None = None) -> np.ndarray:
    """A^z v for Re z < 0 without forming the matrix (batched resolvent solves)."""
    z = complex(z)
    contour = contour or default_contour(M, z)
    lams, weights, tail = _contour_nodes(contour, z)
    if tail > 10.0 * contour.tol_tail:
        raise NumericalError(f"ray truncation tail bound {tail:.2e} above tolerance; "
                             "increase R_max")
    sols = M.solve_shifted_batch(lams, np.asarray(v, dtype=complex))
    return weights @ sols


def fractional_apply(M: OperatorMatrix, z: complex, v: np.ndarray,
                     contour: ContourSpec | None = None) -> np.ndarray:
    """M^z v for Re z >= 0, z != 0: integer part direct, remainder by Dunford.

    Purely imaginary powers go through the regularized route M * M^(it-1);
    they are experimental, like the underlying theory's passing treatment.
    """
    z = complex(z)
    if z.real < 0 or z == 0:
        raise ConfigError("fractional_apply expects Re z >= 0 and z != 0")
    m_int = max(1, int(math.ceil(z.real)))
    w = z - m_int                   # Re w in [-1, 0]
    out = np.asarray(v, dtype=complex)
    if w != 0:
        out = dunford_apply(M, w, out, contour)
    for _ in range(m_int):
        out = M.matvec(out)
    return out


def eig_power_oracle(M: OperatorMatrix, z: complex) -> np.ndarray:
    """Eigendecomposition power for diagonalizable M with spectrum off the cut."""
    A = M.to_dense()
    evals, V = np.linalg.eig(A)
    if np.any((np.abs(evals.imag) < 1e-14) & (evals.real <= 0)):
        raise NumericalError("eigenvalue on the branch cut; oracle undefined")
    pz = np.exp(complex(z) * np.log(evals.astype(complex)))
    return V @ np.diag(pz) @ np.linalg.inv(V)


# -- complex-power domain membership probe -----------------------------------

@dataclass(frozen=True)
class PowerProbeConfig:
    """Shifted per-mode realization and the refinement ladder for the probe."""

    cross_section: object
    mode_label: str
    gamma: float
    shift: float                 # c in M = c - L, found by the shift ladder
    outer_bc: str = "neumann"
    tau_min: float = -3.0
    points: int = 161
    levels: int = 3
    stabilize_ratio: float = 1.2
    blowup_ratio: float = 5.0
    theta: float = 0.75 * math.pi
    n_quad: int = 48


@dataclass
class PowerProbeReport:
    verdict: str                 # 'member' | 'non-member' | 'inconclusive'
    z: complex
    norms: list
    ratios: list
    grids: list                  # (tau_min, points) per level
    thresholds: tuple
    config: PowerProbeConfig


def power_domain_probe(target, z: complex, probe: PowerProbeConfig) -> PowerProbeReport:
    """Verdict on membership of a term/field in D(M^z) for the shifted realization.

    Levels extend the grid toward the tip (tau_min doubles, spacing fixed)
    and evaluate the weighted base-space norm of M^z applied to the sampled
    data. Stabilizing norms mean membership, blow-up by the configured
    factor per level means non-membership, anything else is inconclusive;
    the thresholds are heuristics and travel with the report.
    """
    from .asymptotics import AsymptoticsTerm
    from .heat_solver import assemble_mode_operator
    from .mellin_sobolev import LogGrid, RadialField, mellin_norm

    z = complex(z)
    if not 0.0 < z.real:
        raise ConfigError("probe expects 0 < Re z")
    cs = probe.cross_section
    mode = next(m for m in cs.mode_table(64) if m.label == probe.mode_label)
    norms = []
    grids = []
    grid = LogGrid(probe.tau_min, probe.points)
    for _ in range(probe.levels):
        M = (-assemble_mode_operator(cs.n, mode.eigenvalue, grid, probe.outer_bc)
             ).shifted(probe.shift)
        if isinstance(target, AsymptoticsTerm):
            vals = target.evaluate(grid.x)
        elif callable(target):
            vals = np.asarray(target(grid.x), dtype=complex)
        else:
            vals = target.resample(grid).values[target.mode_index(probe.mode_label)]
        contour = ContourSpec(rho=0.5 * min(probe.shift, M.min_abs_eigenvalue_estimate()),
                              theta=probe.theta, n_quad=probe.n_quad)
        w = fractional_apply(M, z, vals, contour)
        f = RadialField(grid, (mode,), w[None, :], n=cs.n, vol=cs.vol)
        norms.append(mellin_norm(f, s=0, gamma=probe.gamma))
        grids.append((grid.tau_min, grid.points))
        grid = grid.extended()
    ratios = [norms[i + 1] / norms[i] if norms[i] > 0 else math.inf
              for i in range(len(norms) - 1)]
    if all(r <= probe.stabilize_ratio for r in ratios):
        verdict = "member"
    elif all(r >= probe.blowup_ratio for r in ratios):
        verdict = "non-member"
    else:
        verdict = "inconclusive"
    return PowerProbeReport(verdict=verdict, z=z, norms=norms, ratios=ratios,
                            grids=grids,
                            thresholds=(probe.stabilize_ratio, probe.blowup_ratio),
                            config=probe)
