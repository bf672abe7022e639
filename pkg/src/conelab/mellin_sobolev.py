"""Weighted Mellin-Sobolev norms on log-radial grids, plus membership probes.

The collar quadrature norm is the package's reference norm: with tau = log x
the weighted integrals become trapezoid sums on a uniform tau grid and
(x d/dx) becomes d/dtau, realized by second-order finite differences.
Cross-section derivatives enter through |lambda_mode|^(|alpha|/2) spectral
weights; modal coefficient fields are taken against eigenfunctions with
squared L2 mass equal to the cross-section volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import AsymptoticsTerm
from .cone_geometry import CrossSection, Mode
from .errors import ConfigError, CriticalExponentError, UnsupportedError
from .rational import QRat


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in tau = log x over [tau_min, 0]; the last node is x = 1."""

    tau_min: float
    points: int

    def __post_init__(self):
        if self.tau_min >= 0:
            raise ConfigError("tau_min must be negative")
        if self.points < 8:
            raise ConfigError("need at least 8 grid points")

    @property
    def h(self) -> float:
        return -self.tau_min / (self.points - 1)

    @property
    def tau(self) -> np.ndarray:
        return np.linspace(self.tau_min, 0.0, self.points)

    @property
    def x(self) -> np.ndarray:
        return np.exp(self.tau)

    def refined(self) -> "LogGrid":
        """Same span, halved spacing."""
        return LogGrid(self.tau_min, 2 * self.points - 1)

    def extended(self) -> "LogGrid":
        """Doubled span toward the tip, same spacing."""
        return LogGrid(2.0 * self.tau_min, 2 * self.points - 1)

    def window_indices(self, x_lo: float, x_hi: float) -> np.ndarray:
        x = self.x
        idx = np.nonzero((x >= x_lo) & (x <= x_hi))[0]
        if idx.size < 4:
            raise ConfigError(f"window [{x_lo}, {x_hi}] covers fewer than 4 grid points")
        return idx


def smooth_cutoff(x: np.ndarray) -> np.ndarray:
    """C-infinity profile: 1 on x <= 1/2, 0 on x >= 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x <= 0.5] = 1.0
    mid = (x > 0.5) & (x < 1.0)
    t = (x[mid] - 0.5) / 0.5
    f1 = np.exp(-1.0 / (1.0 - t))
    f0 = np.exp(-1.0 / t)
    out[mid] = f1 / (f1 + f0)
    return out


def sharp_cutoff(x: np.ndarray, edge: float = 0.5, edge_value: float = 0.5) -> np.ndarray:
    """Indicator of x <= edge with an adjustable value on the edge node.

    When the edge lands on a grid node, edge_value = 2**(-1/p) keeps the
    trapezoid quadrature of |u|^p second order through the jump (the
    closed-form norm oracles use p = 2, hence 2**-0.5).
    """
    x = np.asarray(x, dtype=float)
    out = np.where(x < edge, 1.0, 0.0)
    out[np.isclose(x, edge, rtol=1e-12, atol=1e-14)] = edge_value
    return out


@dataclass
class RadialField:
    """Per-mode complex samples on a shared LogGrid."""

    grid: LogGrid
    modes: tuple[Mode, ...]
    values: np.ndarray           # shape (n_modes, points), complex
    n: int = 1                   # cross-section dimension
    vol: float = 1.0             # cross-section volume
    cutoff: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (len(self.modes), self.grid.points):
            raise ConfigError(f"field shape {self.values.shape} does not match "
                              f"({len(self.modes)}, {self.grid.points})")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("field contains non-finite values")
        if self.cutoff is None:
            self.cutoff = smooth_cutoff(self.grid.x)

    @staticmethod
    def zeros(grid: LogGrid, cs: CrossSection, max_modes: int) -> "RadialField":
        modes = cs.mode_table(max_modes)
        return RadialField(grid, modes, np.zeros((len(modes), grid.points), complex),
                           n=cs.n, vol=cs.vol)

    @staticmethod
    def from_profiles(grid: LogGrid, cs: CrossSection, profiles: dict, max_modes: int,
                      ) -> "RadialField":
        """profiles: mode label -> callable x -> complex values."""
        f = RadialField.zeros(grid, cs, max_modes)
        x = grid.x
        for label, fn in profiles.items():
            f.values[f.mode_index(label)] = np.asarray(fn(x), dtype=complex)
        return f

    @staticmethod
    def from_term(grid: LogGrid, cs: CrossSection, term: AsymptoticsTerm,
                  max_modes: int) -> "RadialField":
        f = RadialField.zeros(grid, cs, max_modes)
        f.values[f.mode_index(term.mode)] = term.evaluate(grid.x)
        return f

    def mode_index(self, label: str) -> int:
        for i, m in enumerate(self.modes):
            if m.label == label:
                return i
        raise ConfigError(f"unknown mode {label!r}")

    def copy(self) -> "RadialField":
        return RadialField(self.grid, self.modes, self.values.copy(), self.n, self.vol,
                           None if self.cutoff is None else self.cutoff.copy())

    def resample(self, grid: LogGrid) -> "RadialField":
        """Linear interpolation in tau; zero extension beyond the old span."""
        old, new = self.grid.tau, grid.tau
        vals = np.zeros((len(self.modes), grid.points), complex)
        for i in range(len(self.modes)):
            vals[i] = np.interp(new, old, self.values[i].real, left=0.0, right=0.0) \
                + 1j * np.interp(new, old, self.values[i].imag, left=0.0, right=0.0)
        return RadialField(grid, self.modes, vals, self.n, self.vol)


def dtau(values: np.ndarray, h: float) -> np.ndarray:
    """d/dtau along the last axis: central inside, 2nd-order one-sided at ends."""
    v = np.asarray(values)
    out = np.empty_like(v, dtype=complex)
    out[..., 1:-1] = (v[..., 2:] - v[..., :-2]) / (2.0 * h)
    out[..., 0] = (-3.0 * v[..., 0] + 4.0 * v[..., 1] - v[..., 2]) / (2.0 * h)
    out[..., -1] = (3.0 * v[..., -1] - 4.0 * v[..., -2] + v[..., -3]) / (2.0 * h)
    return out


def _trapz(integrand: np.ndarray, h: float) -> float:
    w = np.ones(integrand.shape[-1])
    w[0] = w[-1] = 0.5
    return float(np.real(np.sum(integrand * w, axis=-1))) * h


def mellin_norm(u: RadialField, s: int, gamma: float, p: float = 2.0) -> float:
    """Collar-quadrature H^{s,gamma}_p norm of a radial field.

    For s >= 1 only p = 2 is supported (spectral cross-section weights).
    The collar part integrates |x^{(n+1)/2-gamma} (x d/dx)^k u|^p against
    dx/x with |lambda|^a weights for a + k <= s and the cut-off applied;
    the interior part repeats the sums for (1-cutoff) u without the weight.
    """
    if s < 0 or int(s) != s:
        raise ConfigError("s must be a non-negative integer")
    if not (1.0 < p < math.inf):
        raise ConfigError("p must lie in (1, inf)")
    if s >= 1 and p != 2.0:
        raise UnsupportedError("s >= 1 requires p = 2 (spectral derivative weights)")
    if not np.all(np.isfinite(u.values)):
        raise ConfigError("field contains non-finite values")

    n = u.n
    h = u.grid.h
    x = u.grid.x
    weight = np.exp(((n + 1) / 2.0 - gamma) * u.grid.tau)
    omega = u.cutoff
    total = 0.0
    for i, mode in enumerate(u.modes):
        lam = abs(float(mode.eigenvalue))
        collar = omega * u.values[i]
        interior = (1.0 - omega) * u.values[i]
        dk_c, dk_i = collar, interior
        for k in range(s + 1):
            if k > 0:
                dk_c = dtau(dk_c, h)
                dk_i = dtau(dk_i, h)
            for a in range(s + 1 - k):
                lamw = lam ** a
                total += u.vol * mode.multiplicity * lamw * _trapz(
                    np.abs(weight * dk_c) ** p, h)
                total += u.vol * mode.multiplicity * lamw * _trapz(
                    np.abs(dk_i) ** p, h)
    return total ** (1.0 / p)


def membership_probe(term: AsymptoticsTerm, n: int, s: int, gamma, p: float = 2.0) -> bool:
    """Analytic H^{s,gamma}_p membership of a power-log term near the tip.

    True iff Re(-rho) + (n+1)/2 - gamma > 0; log factors never matter under
    the strict inequality, and equality raises CriticalExponentError since
    the verdict would depend on the log fine structure.
    """
    if isinstance(term.rho, QRat) and isinstance(gamma, (int, float)) \
            and term.rho.im == 0:
        from fractions import Fraction
        crit = -term.rho.re + Fraction(n + 1, 2) - Fraction(gamma)
        if crit == 0:
            raise CriticalExponentError(f"critical exponent: Re rho = {term.rho.re}, "
                                        f"(n+1)/2 - gamma = {Fraction(n+1,2) - Fraction(gamma)}")
        return crit > 0
    crit = -term.rho_complex.real + (n + 1) / 2.0 - float(gamma)
    if abs(crit) <= 1e-12:
        raise CriticalExponentError("critical exponent within float tolerance")
    return crit > 0
