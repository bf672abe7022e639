"""Discretized per-mode operators: tridiagonal core plus boundary rows."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._kernels import thomas_batch, tridiag_matvec
from .errors import ConfigError, NumericalError


@dataclass
class OperatorMatrix:
    """Dense or tridiagonal complex matrix with provenance metadata.

    Tridiagonal storage keeps three length-J bands (dl, d, du) with dl[0]
    and du[-1] unused; dense storage keeps the full array. Provenance
    records where the matrix came from so probe reports are reproducible.
    """

    kind: str                    # 'tridiag' | 'dense'
    data: tuple | np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind == "tridiag":
            dl, d, du = (np.asarray(a, dtype=complex) for a in self.data)
            if not (dl.shape == d.shape == du.shape) or d.ndim != 1:
                raise ConfigError("tridiagonal bands must be three equal-length 1-d arrays")
            self.data = (dl, d, du)
        elif self.kind == "dense":
            self.data = np.asarray(self.data, dtype=complex)
            if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
                raise ConfigError("dense operator must be a square matrix")
        else:
            raise ConfigError(f"unknown operator storage {self.kind!r}")
        if not np.all(np.isfinite(self.to_dense() if self.dim <= 4 else
                                  (self.data if self.kind == 'dense' else np.concatenate(self.data)))):
            raise ConfigError("operator contains non-finite entries")

    @staticmethod
    def tridiag(dl, d, du, **provenance) -> "OperatorMatrix":
        return OperatorMatrix("tridiag", (dl, d, du), dict(provenance))

    @staticmethod
    def dense(a, **provenance) -> "OperatorMatrix":
        return OperatorMatrix("dense", a, dict(provenance))

    @property
    def dim(self) -> int:
        return len(self.data[1]) if self.kind == "tridiag" else self.data.shape[0]

    def to_dense(self) -> np.ndarray:
        if self.kind == "dense":
            return np.array(self.data)
        dl, d, du = self.data
        a = np.diag(d)
        a += np.diag(dl[1:], -1)
        a += np.diag(du[:-1], 1)
        return a

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self.kind == "dense":
            return self.data @ v
        dl, d, du = self.data
        return tridiag_matvec(dl[None, :], d[None, :], du[None, :], v[None, :])[0]

    def shifted(self, c: complex) -> "OperatorMatrix":
        """M + c*I with provenance recording the shift."""
        prov = dict(self.provenance)
        prov["shift"] = prov.get("shift", 0.0) + c
        if self.kind == "dense":
            return OperatorMatrix("dense", self.data + c * np.eye(self.dim), prov)
        dl, d, du = self.data
        return OperatorMatrix("tridiag", (dl.copy(), d + c, du.copy()), prov)

    def __neg__(self) -> "OperatorMatrix":
        if self.kind == "dense":
            return OperatorMatrix("dense", -self.data, dict(self.provenance))
        dl, d, du = self.data
        return OperatorMatrix("tridiag", (-dl, -d, -du), dict(self.provenance))

    def solve_shifted(self, lam: complex, rhs: np.ndarray) -> np.ndarray:
        """(M + lam*I)^-1 rhs."""
        rhs = np.asarray(rhs, dtype=complex)
        if self.kind == "dense":
            return np.linalg.solve(self.data + lam * np.eye(self.dim), rhs)
        dl, d, du = self.data
        sol = thomas_batch(dl[None, :], (d + lam)[None, :], du[None, :], rhs[None, :])
        if not np.all(np.isfinite(sol)):
            raise NumericalError(f"singular tridiagonal solve at lam={lam}")
        return sol[0]

    def solve_shifted_batch(self, lams: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        """(M + lam_i)^-1 rhs for a batch of shifts; returns (len(lams), dim)."""
        if self.kind == "dense":
            eye = np.eye(self.dim)
            return np.stack([np.linalg.solve(self.data + l * eye, rhs) for l in lams])
        dl, d, du = self.data
        nb = len(lams)
        DL = np.broadcast_to(dl, (nb, self.dim)).copy()
        DU = np.broadcast_to(du, (nb, self.dim)).copy()
        D = d[None, :] + np.asarray(lams, dtype=complex)[:, None]
        R = np.broadcast_to(np.asarray(rhs, dtype=complex), (nb, self.dim)).copy()
        return thomas_batch(DL, D, DU, R)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.to_dense())

    def min_abs_eigenvalue_estimate(self, iters: int = 60, seed: int = 7) -> float:
        """Inverse-iteration estimate of min |eig|, cheap for tridiagonal storage."""
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        v /= np.linalg.norm(v)
        mu = np.inf
        for _ in range(iters):
            w = self.solve_shifted(0.0, v)
            nw = np.linalg.norm(w)
            if nw == 0 or not np.isfinite(nw):
                raise NumericalError("inverse iteration broke down (singular operator?)")
            mu = 1.0 / nw
            v = w / nw
        return float(mu)

    def inv_norm2_estimate(self, lam: complex, iters: int = 40, seed: int = 3) -> float:
        """Power iteration for ||(M+lam)^-1||_2 via the normal equations."""
        if self.kind == "dense":
            inv = np.linalg.inv(self.data + lam * np.eye(self.dim))
            return float(np.linalg.norm(inv, 2))
        dl, d, du = self.data
        # bands of the adjoint: sub/super diagonals swap and conjugate
        dlh = np.zeros_like(dl)
        dlh[1:] = np.conj(du[:-1])
        duh = np.zeros_like(du)
        duh[:-1] = np.conj(dl[1:])
        herm = OperatorMatrix.tridiag(dlh, np.conj(d + lam), duh)
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        v /= np.linalg.norm(v)
        sigma = 0.0
        for _ in range(iters):
            w = self.solve_shifted(lam, v)
            w = herm.solve_shifted(0.0, w)
            nw = np.linalg.norm(w)
            if not np.isfinite(nw) or nw == 0:
                raise NumericalError(f"resolvent norm estimate failed at lam={lam}")
            sigma, v = nw, w / nw
        return float(np.sqrt(sigma))
