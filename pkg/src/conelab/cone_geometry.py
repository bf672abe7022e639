"""Model cross-sections: spectra, Bessel orders, admissible weight windows.

Cross-sections are spectrum-only. Everything downstream consumes pairs
(eigenvalue, multiplicity); eigenfunctions are never materialized. Circle
and sphere eigenvalues are kept as exact rationals so that coincident
conormal-symbol poles can be told apart from nearly coincident ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import ConfigError


class Mode(NamedTuple):
    label: str
    eigenvalue: object  # Fraction (exact) or float
    multiplicity: int


@dataclass(frozen=True)
class WeightWindow:
    lo: float
    hi: float

    def contains(self, gamma: float) -> bool:
        return self.lo < gamma < self.hi


def _eig_float(ev) -> float:
    return float(ev)


@dataclass(frozen=True)
class CrossSection:
    """kind in {circle, sphere, explicit}; n is the cross-section dimension."""

    kind: str
    n: int
    # circle: q = (2*pi/L)^2, exact Fraction when derivable, else float
    circle_q: object = None
    circle_length: float = 0.0
    explicit_eigs: tuple = ()
    vol: float = 1.0

    @staticmethod
    def circle(length: float | None = None, length_over_pi=None) -> "CrossSection":
        """Circle of circumference L; pass length_over_pi for exact spectra."""
        if length_over_pi is not None:
            lop = Fraction(length_over_pi)
            if lop <= 0:
                raise ConfigError("circle circumference must be positive")
            q = Fraction(2, 1) ** 2 / lop ** 2
            L = float(lop) * math.pi
        elif length is not None:
            if length <= 0:
                raise ConfigError("circle circumference must be positive")
            L = float(length)
            qf = (2.0 * math.pi / L) ** 2
            snap = Fraction(qf).limit_denominator(10**6)
            q = snap if abs(float(snap) - qf) < 1e-12 * max(1.0, qf) else qf
        else:
            raise ConfigError("circle needs 'L' or 'L_over_pi'")
        return CrossSection(kind="circle", n=1, circle_q=q, circle_length=L, vol=L)

    @staticmethod
    def sphere(n: int) -> "CrossSection":
        if n < 2:
            raise ConfigError("sphere cross-section requires n >= 2")
        area = 2.0 * math.pi ** ((n + 1) / 2.0) / math.gamma((n + 1) / 2.0)
        return CrossSection(kind="sphere", n=n, vol=area)

    @staticmethod
    def explicit(eigs, n: int = 1, volume: float = 1.0) -> "CrossSection":
        """Explicit (eigenvalue <= 0, multiplicity >= 1) list, sorted non-increasing."""
        clean = []
        for ev, mult in eigs:
            evx = Fraction(ev) if isinstance(ev, (int, Fraction, str)) else float(ev)
            if _eig_float(evx) > 0:
                raise ConfigError(f"positive eigenvalue {ev}: boundary Laplacian must be non-positive")
            if mult < 1:
                raise ConfigError("multiplicity must be >= 1")
            clean.append((evx, int(mult)))
        clean.sort(key=lambda t: -_eig_float(t[0]))
        return CrossSection(kind="explicit", n=n, explicit_eigs=tuple(clean), vol=volume)

    # -- spectrum ---------------------------------------------------------

    def eigen_data(self, max_modes: int):
        """Distinct eigenvalues with multiplicities, sorted decreasing.

        Returns at most max_modes triples (eigenvalue, multiplicity, label);
        the first entry is (0, 1, ...) for the connected kinds.
        """
        if max_modes < 1:
            raise ConfigError("max_modes must be >= 1")
        out = []
        if self.kind == "circle":
            for k in range(max_modes):
                ev = -self.circle_q * k * k if isinstance(self.circle_q, Fraction) \
                    else -self.circle_q * k * k
                out.append((ev, 1 if k == 0 else 2, f"k={k}"))
        elif self.kind == "sphere":
            for l in range(max_modes):
                ev = Fraction(-l * (l + self.n - 1))
                out.append((ev, sphere_multiplicity(self.n, l), f"l={l}"))
        else:
            out = [(ev, mult, f"e{i}") for i, (ev, mult) in enumerate(self.explicit_eigs)]
            out = out[:max_modes]
        return out

    def mode_table(self, max_modes: int) -> tuple[Mode, ...]:
        """Per-label modes; circle eigenvalues k >= 1 expand into +k/-k labels."""
        modes = []
        if self.kind == "circle":
            for k, (ev, _mult, _lbl) in enumerate(self.eigen_data(max_modes)):
                if k == 0:
                    modes.append(Mode("k=0", ev, 1))
                else:
                    modes.append(Mode(f"k=+{k}", ev, 1))
                    modes.append(Mode(f"k=-{k}", ev, 1))
        else:
            for ev, mult, lbl in self.eigen_data(max_modes):
                modes.append(Mode(lbl, ev, mult))
        return tuple(modes)

    def greatest_nonzero_eigenvalue(self):
        for ev, _mult, _lbl in self.eigen_data(max_modes=64):
            if _eig_float(ev) != 0.0:
                return ev
        raise ConfigError("cross-section has no non-zero eigenvalue")

    def is_connected(self) -> bool:
        data = self.eigen_data(max_modes=1)
        return _eig_float(data[0][0]) == 0.0 and data[0][1] == 1


def sphere_multiplicity(n: int, l: int) -> int:
    """Dimension of degree-l spherical harmonics on S^n."""
    if l == 0:
        return 1
    return math.comb(n + l, n) - math.comb(n + l - 2, n)


def bessel_order(n: int, eigenvalue):
    """nu = sqrt(((n-1)/2)^2 - eigenvalue); exact Fraction for perfect squares."""
    if _eig_float(eigenvalue) > 0:
        raise ConfigError("eigenvalue must be <= 0")
    if isinstance(eigenvalue, (int, Fraction)):
        rad = Fraction(n - 1, 2) ** 2 - Fraction(eigenvalue)
        num, den = rad.numerator, rad.denominator
        rn, rd = math.isqrt(num), math.isqrt(den)
        if rn * rn == num and rd * rd == den:
            return Fraction(rn, rd)
        return math.sqrt(float(rad))
    return math.sqrt(((n - 1) / 2.0) ** 2 - float(eigenvalue))


def weight_window(cs: CrossSection) -> WeightWindow:
    """Admissible gamma interval for the constants-extended Laplacian realization.

    lo = (n-3)/2, hi = min(-1 + sqrt(((n-1)/2)^2 - lambda_1), (n+1)/2) with
    lambda_1 the greatest non-zero eigenvalue. Empty windows raise instead of
    returning a degenerate interval.
    """
    if not cs.is_connected():
        raise ConfigError("weight window defined for connected cross-sections only "
                          "(zero eigenvalue must be simple)")
    lam1 = cs.greatest_nonzero_eigenvalue()
    n = cs.n
    lo = (n - 3) / 2.0
    hi = min(-1.0 + float(bessel_order(n, lam1)), (n + 1) / 2.0)
    if lo >= hi:
        raise ConfigError(f"no admissible weight: window ({lo}, {hi}) is empty")
    return WeightWindow(lo, hi)


def indicial_roots_closed_form(n: int, eigenvalue):
    """The two conormal-symbol poles (n-1)/2 +/- bessel_order for one mode."""
    nu = bessel_order(n, eigenvalue)
    if isinstance(nu, Fraction):
        half = Fraction(n - 1, 2)
        return (half - nu, half + nu)
    half = (n - 1) / 2.0
    return (half - nu, half + nu)
