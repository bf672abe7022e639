"""Near-tip expansion extraction and decomposition tracking.

Snapshots are fitted per mode against the predicted power-log columns
x^{-rho} log^m x over an inner window; what the fit cannot explain is the
residual, whose log-log slope against x estimates the next exponent in the
expansion. Tracking the fitted coefficients along a trajectory is how the
package observes that the singular-part decomposition survives the
evolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .asymptotics import AsymptoticsBasis
from .errors import ConfigError, IllConditionedFitError
from .mellin_sobolev import RadialField
from .rational import root_to_complex

MAX_FIT_POINTS = 200
COND_LIMIT = 1e10


@dataclass
class FitCoefficient:
    rho: complex
    m: int
    mode: str
    c: complex


@dataclass
class TipFit:
    t: float
    coefficients: list            # FitCoefficient entries
    window: tuple                 # (x_a, x_b)
    residual_norm: float
    residual_decay_exponent: float
    mode_residual_exponents: dict  # label -> slope of log|residual| vs log x
    condition: float

    def coefficient(self, rho, m: int, mode: str) -> complex:
        for fc in self.coefficients:
            if fc.mode == mode and fc.m == m and abs(fc.rho - complex(rho)) < 1e-9:
                return fc.c
        raise ConfigError(f"no fitted coefficient for ({rho}, {m}, {mode})")


def default_window(grid) -> tuple[float, float]:
    """Stay above the truncation closure and below the outer boundary."""
    return (4.0 * math.exp(grid.tau_min), 0.125)


def _log_spaced_subsample(idx: np.ndarray, limit: int) -> np.ndarray:
    if idx.size <= limit:
        return idx
    pick = np.unique(np.geomspace(1, idx.size, limit).astype(int) - 1)
    return idx[pick]


def _decay_exponent(x: np.ndarray, r: np.ndarray, floor: float) -> float:
    """Robust slope of log|r| against log x above a resolution floor.

    Two-bin median estimator: the slope between the median magnitudes of the
    lower and upper halves of the log range. Immune to isolated residual
    zero crossings that wreck a plain regression.
    """
    mag = np.abs(r)
    keep = mag > max(3.0 * floor, 1e-300)
    if keep.sum() < 6:
        if float(mag.max(initial=0.0)) <= max(3.0 * floor, 1e-300):
            return math.inf  # residual fully below resolution: nothing left
        keep = mag > 1e-300
        if keep.sum() < 6:
            return math.inf
    xs, rm = x[keep], mag[keep]
    gm = math.sqrt(xs[0] * xs[-1])
    lo, hi = xs <= gm, xs > gm
    if lo.sum() < 2 or hi.sum() < 2:
        return 0.0
    num = math.log(float(np.median(rm[hi]))) - math.log(float(np.median(rm[lo])))
    den = float(np.mean(np.log(xs[hi])) - np.mean(np.log(xs[lo])))
    return num / den


def fit_tip_expansion(snapshot: RadialField, basis: AsymptoticsBasis,
                      window: tuple[float, float] | None = None, t: float = 0.0,
                      max_points: int = MAX_FIT_POINTS) -> TipFit:
    """Fit the basis terms to one snapshot over a window, per mode.

    Coefficients come from a relative-error weighted least-squares solve on
    the inner quarter (log scale) of the window: an asymptotic expansion is
    an x -> 0 statement, and estimating there keeps coefficients from
    absorbing the next, not-yet-modeled exponent. The residual is formed
    over the whole window; its decay exponent is measured on the inner half
    above the fit's own resolution floor. Modes without basis columns
    contribute their raw field as residual, which is how a not-yet-modeled
    exponent shows up.
    """
    grid = snapshot.grid
    if window is None:
        window = default_window(grid)
    x_a, x_b = window
    if not (math.exp(grid.tau_min) < x_a < x_b):
        raise ConfigError(f"window [{x_a}, {x_b}] must sit inside the grid")
    if x_b > 0.25 + 1e-12:
        raise ConfigError("window must stay at or below x = 1/4")
    idx = _log_spaced_subsample(grid.window_indices(x_a, x_b), max_points)
    x = grid.x[idx]
    inner = x <= math.sqrt(x_a * x_b)

    coefficients: list[FitCoefficient] = []
    res_sq = 0.0
    mode_exponents: dict[str, float] = {}
    worst_cond = 1.0
    inner_res_all = []
    floors = []
    for i, mode in enumerate(snapshot.modes):
        terms = basis.for_mode(mode.label)
        y = snapshot.values[i, idx]
        floor = 0.0
        if terms:
            cols = []
            for rho, m, _lbl in terms:
                col = np.exp(-root_to_complex(rho) * np.log(x))
                if m:
                    col = col * np.log(x) ** m
                cols.append(col)
            A = np.stack(cols, axis=1)
            x_cut = x_a * (x_b / x_a) ** 0.25
            sub = x <= x_cut
            if sub.sum() < 2 * A.shape[1] + 2:
                sub = np.ones_like(sub, dtype=bool)
            ymax = float(np.abs(y[sub]).max(initial=0.0))
            w = np.ones(int(sub.sum())) if ymax == 0.0 else \
                1.0 / np.maximum(np.abs(y[sub]), 1e-3 * ymax)
            Aw = A[sub] * w[:, None]
            sv = np.linalg.svd(Aw, compute_uv=False)
            cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
            worst_cond = max(worst_cond, cond)
            if cond > COND_LIMIT:
                raise IllConditionedFitError(
                    f"design condition {cond:.2e} on mode {mode.label}; "
                    "shift or shrink the fit window")
            c, *_ = np.linalg.lstsq(Aw, y[sub] * w, rcond=None)
            residual = y - A @ c
            floor = float(np.sqrt(np.mean(np.abs(residual[sub]) ** 2)))
            for (rho, m, _lbl), cv in zip(terms, c):
                coefficients.append(FitCoefficient(root_to_complex(rho), m,
                                                   mode.label, complex(cv)))
        else:
            residual = y
        res_sq += float(np.sum(np.abs(residual) ** 2))
        mode_exponents[mode.label] = _decay_exponent(x[inner], residual[inner], floor)
        inner_res_all.append(residual[inner])
        floors.append(floor)

    total_inner = np.sqrt(np.sum(np.abs(np.stack(inner_res_all)) ** 2, axis=0))
    overall = _decay_exponent(x[inner], total_inner,
                              math.sqrt(sum(f * f for f in floors)))
    return TipFit(t=t, coefficients=coefficients, window=(x_a, x_b),
                  residual_norm=math.sqrt(res_sq),
                  residual_decay_exponent=overall,
                  mode_residual_exponents=mode_exponents,
                  condition=worst_cond)


@dataclass
class DecompositionTrack:
    fits: list                    # one TipFit per snapshot
    max_jump: float               # worst coefficient jump between fits
    jumps: dict                   # (rho, m, mode) -> max jump

    def coefficient_path(self, rho, m: int, mode: str):
        return [f.coefficient(rho, m, mode) for f in self.fits]


def decomposition_track(traj, basis: AsymptoticsBasis,
                        window: tuple[float, float] | None = None,
                        max_points: int = MAX_FIT_POINTS) -> DecompositionTrack:
    """Fit every snapshot and report coefficient paths with jump diagnostics."""
    fits = [fit_tip_expansion(f, basis, window=window, t=t, max_points=max_points)
            for t, f in zip(traj.times, traj.fields)]
    jumps: dict = {}
    for a, b in zip(fits, fits[1:]):
        for fa, fb in zip(a.coefficients, b.coefficients):
            key = (fa.rho, fa.m, fa.mode)
            jump = abs(fb.c - fa.c)
            jumps[key] = max(jumps.get(key, 0.0), jump)
    return DecompositionTrack(fits=fits, max_jump=max(jumps.values(), default=0.0),
                              jumps=jumps)
