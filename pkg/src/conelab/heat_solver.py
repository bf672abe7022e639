"""Heat evolution on the model cone [0,1] x cross-section, per radial mode.

The Laplacian acts per mode as e^{-2 tau} (d_tt + (n-1) d_t + lambda) on the
log-radial grid. The inner truncation row selects the regular solution:
modes with lambda != 0 extrapolate along the decaying indicial root, the
zero mode carries a zero-(x d/dx) closure so constants are admitted, which
is exactly the constants-extended realization the evolution theory uses.
A classical Bessel series solution on the same geometry serves as the
independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bessel
from ._kernels import evolve_theta, thomas_batch, tridiag_matvec
from .cone_geometry import CrossSection, Mode, bessel_order
from .errors import ConfigError, NumericalError
from .mellin_sobolev import LogGrid, RadialField
from .operators import OperatorMatrix


@dataclass
class HeatConfig:
    cross_section: CrossSection
    grid: LogGrid
    T: float
    dt: float
    outer_bc: str = "dirichlet"          # 'dirichlet' | 'neumann' at x = 1
    theta: float = 0.5                   # 1/2 trapezoidal .. 1 implicit Euler
    max_modes: int = 1
    snapshot_every: int = 0              # 0: only the final state

    def __post_init__(self):
        if self.T <= 0 or self.dt <= 0:
            raise ConfigError("T and dt must be positive")
        if self.dt > 1.0:
            raise ConfigError("dt > 1 rejected as a sanity bound")
        if not 0.5 <= self.theta <= 1.0:
            raise ConfigError("theta-scheme supported for theta in [1/2, 1]")
        if self.outer_bc not in ("dirichlet", "neumann"):
            raise ConfigError(f"unknown outer boundary condition {self.outer_bc!r}")

    @property
    def n_steps(self) -> int:
        n = int(round(self.T / self.dt))
        if abs(n * self.dt - self.T) > 1e-9 * self.T:
            raise ConfigError("T must be an integer multiple of dt")
        return n


@dataclass
class HeatTrajectory:
    times: list
    fields: list                          # RadialField snapshots, t increasing
    config: HeatConfig

    def __post_init__(self):
        if any(t2 <= t1 for t1, t2 in zip(self.times, self.times[1:])):
            raise ConfigError("snapshot times must increase strictly")

    def final(self) -> RadialField:
        return self.fields[-1]


def regular_indicial_root(n: int, eigenvalue) -> float:
    """The non-negative root of s^2 + (n-1)s + lambda = 0 (bounded solution)."""
    return -0.5 * (n - 1) + float(bessel_order(n, eigenvalue))


def assemble_mode_operator(n: int, eigenvalue, grid: LogGrid, outer_bc: str) -> OperatorMatrix:
    """Tridiagonal discretization of e^{-2 tau}(d_tt + (n-1) d_t + lambda).

    Interior rows use central differences. The inner row eliminates the
    ghost node via the regularity closure (mirror for the zero mode, power
    extrapolation x^{s+} otherwise); the outer row encodes the boundary
    condition (zero row for dirichlet so the boundary value is frozen,
    mirror ghost for neumann).
    """
    J = grid.points
    h = grid.h
    lam = float(eigenvalue)
    w = np.exp(-2.0 * grid.tau)
    lo = 1.0 / h**2 - (n - 1) / (2.0 * h)     # u_{j-1} coefficient
    hi = 1.0 / h**2 + (n - 1) / (2.0 * h)     # u_{j+1} coefficient
    mid = -2.0 / h**2 + lam

    dl = np.full(J, lo, dtype=complex)
    d = np.full(J, mid, dtype=complex)
    du = np.full(J, hi, dtype=complex)

    # inner closure at tau_min
    if lam == 0.0:
        # zero-(x d/dx): ghost u_{-1} = u_{+1}
        d[0] = mid
        du[0] = hi + lo
    else:
        s_plus = regular_indicial_root(n, eigenvalue)
        ghost = math.exp(-h * s_plus)         # u ~ x^{s+}: u_{-1} = ghost * u_0
        d[0] = mid + lo * ghost
        du[0] = hi

    # outer row at x = 1
    if outer_bc == "dirichlet":
        dl[-1] = 0.0
        d[-1] = 0.0
    else:
        dl[-1] = lo + hi                      # ghost u_J = u_{J-2}
        d[-1] = mid

    dl *= w
    d *= w
    du *= w
    dl[0] = 0.0
    du[-1] = 0.0
    return OperatorMatrix.tridiag(dl, d, du, role="mode-laplacian", n=n,
                                  eigenvalue=lam, outer_bc=outer_bc,
                                  tau_min=grid.tau_min, points=J)


def _mode_operators(cfg: HeatConfig) -> tuple[tuple[Mode, ...], list[OperatorMatrix]]:
    modes = cfg.cross_section.mode_table(cfg.max_modes)
    ops = [assemble_mode_operator(cfg.cross_section.n, m.eigenvalue, cfg.grid,
                                  cfg.outer_bc) for m in modes]
    return modes, ops


def _theta_bands(ops, dt: float, theta: float):
    J = ops[0].dim
    nb = len(ops)
    Adl = np.zeros((nb, J), complex); Ad = np.zeros((nb, J), complex); Adu = np.zeros((nb, J), complex)
    Bdl = np.zeros((nb, J), complex); Bd = np.zeros((nb, J), complex); Bdu = np.zeros((nb, J), complex)
    for b, op in enumerate(ops):
        dl, d, du = op.data
        Adl[b] = -theta * dt * dl
        Ad[b] = 1.0 - theta * dt * d
        Adu[b] = -theta * dt * du
        Bdl[b] = (1.0 - theta) * dt * dl
        Bd[b] = 1.0 + (1.0 - theta) * dt * d
        Bdu[b] = (1.0 - theta) * dt * du
    return (Adl, Ad, Adu), (Bdl, Bd, Bdu)


def step(state: RadialField, t: float, dt: float, f_provider, cfg: HeatConfig,
         _ops=None) -> RadialField:
    """One theta step: solve (I - theta dt L) u+ = (I + (1-theta) dt L) u + dt f.

    The forcing blend matches the scheme, theta f(t+dt) + (1-theta) f(t);
    dirichlet rows carry no forcing so the boundary value stays frozen.
    """
    modes, ops = _ops if _ops is not None else _mode_operators(cfg)
    (Adl, Ad, Adu), (Bdl, Bd, Bdu) = _theta_bands(ops, dt, cfg.theta)
    rhs = tridiag_matvec(Bdl, Bd, Bdu, state.values)
    if f_provider is not None:
        fb = cfg.theta * np.asarray(f_provider(t + dt), dtype=complex) \
            + (1.0 - cfg.theta) * np.asarray(f_provider(t), dtype=complex)
        if cfg.outer_bc == "dirichlet":
            fb = fb.copy()
            fb[:, -1] = 0.0
        rhs = rhs + dt * fb
    new_vals = thomas_batch(Adl, Ad, Adu, rhs)
    if not np.all(np.isfinite(new_vals)):
        raise NumericalError(f"step failure at t={t}: non-finite state "
                             f"(theta={cfg.theta}, dt={dt})")
    out = state.copy()
    out.values = new_vals
    return out


def solve_heat(u0: RadialField, f_provider, cfg: HeatConfig) -> HeatTrajectory:
    """March u' = L u + f from u0 to T, collecting configured snapshots.

    With no forcing the whole loop runs inside the compiled kernel; with a
    forcing provider the steps run one by one so arbitrary callables work.
    """
    if u0.grid.points != cfg.grid.points or u0.grid.tau_min != cfg.grid.tau_min:
        raise ConfigError("initial field lives on a different grid than the config")
    modes, ops = _mode_operators(cfg)
    if len(u0.modes) != len(modes):
        raise ConfigError("initial field mode table does not match the config")
    n_steps = cfg.n_steps
    every = cfg.snapshot_every if cfg.snapshot_every > 0 else n_steps
    times = [0.0]
    fields = [u0.copy()]

    if f_provider is None:
        (Adl, Ad, Adu), (Bdl, Bd, Bdu) = _theta_bands(ops, cfg.dt, cfg.theta)
        _final, snaps = evolve_theta(Adl, Ad, Adu, Bdl, Bd, Bdu, u0.values,
                                     n_steps, every)
        if not np.all(np.isfinite(snaps)):
            raise NumericalError("non-finite state during homogeneous evolution")
        for k in range(snaps.shape[0]):
            f = u0.copy()
            f.values = snaps[k]
            times.append((k + 1) * every * cfg.dt)
            fields.append(f)
        if n_steps % every:
            f = u0.copy()
            f.values = _final
            times.append(n_steps * cfg.dt)
            fields.append(f)
    else:
        state = u0
        for s in range(1, n_steps + 1):
            state = step(state, (s - 1) * cfg.dt, cfg.dt, f_provider, cfg,
                         _ops=(modes, ops))
            if s % every == 0 or s == n_steps:
                times.append(s * cfg.dt)
                fields.append(state.copy())
    return HeatTrajectory(times=times, fields=fields, config=cfg)


def bessel_series_solution(u0_modal_coeffs, n: int, eigenvalue, t: float,
                           x_points, outer_bc: str, n_terms: int | None = None):
    """Separation-of-variables oracle for one mode on the straight cone.

    The expansion basis is x^{-(n-1)/2} J_nu(k_j x) with k_j the outer-BC
    roots (neumann on the zero mode starts with the k = 0 constant branch);
    the solution scales each coefficient by exp(-k_j^2 t).
    """
    coeffs = list(u0_modal_coeffs)
    if n_terms is None:
        n_terms = len(coeffs)
    if n_terms < len(coeffs):
        raise ConfigError("n_terms smaller than the given coefficient list")
    nu = float(bessel_order(n, eigenvalue))
    x = np.asarray(x_points, dtype=float)
    ks = []
    if outer_bc == "neumann" and float(eigenvalue) == 0.0:
        ks.append(0.0)
    remaining = n_terms - len(ks)
    if remaining > 0:
        ks.extend(bessel.radial_eigenvalue_roots(nu, n, outer_bc, remaining))
    out = np.zeros_like(x, dtype=complex)
    for c, k in zip(coeffs, ks):
        out = out + c * math.exp(-k * k * t) * bessel.radial_eigenfunction(nu, n, k, x)
    return out


def bessel_mode_roots(n: int, eigenvalue, outer_bc: str, count: int) -> list[float]:
    """Outer-BC eigenvalue roots k_j for one mode (k = 0 first when admitted)."""
    nu = float(bessel_order(n, eigenvalue))
    ks = []
    if outer_bc == "neumann" and float(eigenvalue) == 0.0:
        ks.append(0.0)
    ks.extend(bessel.radial_eigenvalue_roots(nu, n, outer_bc, count - len(ks)))
    return ks[:count]


def grid_l2(field_values: np.ndarray, grid: LogGrid, n: int) -> float:
    """L2 norm on the cone: integral of |u|^2 x^n dx as a tau trapezoid."""
    w = np.ones(grid.points)
    w[0] = w[-1] = 0.5
    integrand = np.abs(np.atleast_2d(field_values)) ** 2 * np.exp((n + 1) * grid.tau)
    return float(np.sqrt(np.sum(integrand @ w) * grid.h))


def relative_l2_error(a: RadialField, b: RadialField) -> float:
    diff = grid_l2(a.values - b.values, a.grid, a.n)
    ref = grid_l2(b.values, b.grid, b.n)
    if ref == 0.0:
        return diff
    return diff / ref
