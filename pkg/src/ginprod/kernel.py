"""Finite-N kernel, density and k-point correlations of the product ensemble.

The monomials z**k are orthogonal for the radial weight w_n with squared
norms h_k = (pi k!)**n, so

    K_N(z_i, z_j) = sqrt(w_n(z_i) w_n(z_j)) * sum_{k<N} (z_i conj(z_j))**k / h_k.

For |z|**2 of order N**n the individual terms overflow near k ~ |z|**(2/n)
while w_n underflows, so every sum is carried as (log-magnitude, phase).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import DomainError
from .special import erfc
from .weight import WeightEvaluator


@dataclass(frozen=True)
class KernelContext:
    """Precomputed data for K_N^{(n)}: the log squared norms and the weight."""

    n: int
    N: int
    weight: WeightEvaluator | None = None
    log_norms: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be a positive integer, got {self.N}")
        if self.weight is None:
            object.__setattr__(self, "weight", WeightEvaluator(self.n))
        elif self.weight.n != self.n:
            raise DomainError("weight evaluator has a different n")
        k = np.arange(self.N)
        norms = self.n * (math.log(math.pi) + gammaln(k + 1.0))
        norms.setflags(write=False)
        object.__setattr__(self, "log_norms", norms)

    # -- truncated sums ---------------------------------------------------

    def log_T(self, x):
        """log T_n(x, N) = log sum_{k<N} x**k / (pi k!)**n for x >= 0."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("log_T: x must be >= 0")
        flat = x.ravel()
        out = np.full(flat.shape, -self.log_norms[0])
        pos = flat > 0
        if self.N > 1 and np.any(pos):
            k = np.arange(self.N)
            terms = np.log(flat[pos])[:, None] * k[None, :] - self.log_norms[None, :]
            out[pos] = logsumexp(terms, axis=1)
        out = out.reshape(x.shape)
        return out[()] if out.ndim == 0 else out

    def _log_series(self, u: complex) -> tuple[float, complex]:
        """(log|S|, S/|S|) for S = sum_{k<N} u**k / h_k."""
        if u == 0 or self.N == 1:
            return -self.log_norms[0], 1.0 + 0.0j
        k = np.arange(self.N)
        mag = k * math.log(abs(u)) - self.log_norms
        top = mag.max()
        s = np.sum(np.exp(mag - top) * np.exp(1j * k * np.angle(u)))
        return top + math.log(abs(s)), s / abs(s)

    # -- kernel and correlations -----------------------------------------

    def _log_w(self, z: complex) -> float:
        r = abs(z)
        if r == 0 and self.n >= 2:
            raise DomainError(f"kernel: weight w_{self.n} is singular at z = 0")
        return float(self.weight.log_weight(r))

    def kernel(self, zi: complex, zj: complex) -> complex:
        """K_N(z_i, z_j); Hermitian in its two arguments."""
        zi, zj = complex(zi), complex(zj)
        log_mag, phase = self._log_series(zi * zj.conjugate())
        return phase * math.exp(0.5 * self._log_w(zi) + 0.5 * self._log_w(zj) + log_mag)

    def log_density(self, r):
        """log R_1 at radius r (vectorised)."""
        r = np.asarray(r, dtype=float)
        if self.n >= 2 and np.any(r <= 0):
            raise DomainError(f"density: weight w_{self.n} is singular at z = 0")
        out = self.weight.log_weight(r) + self.log_T(r * r)
        return out

    def density(self, z):
        """R_1(z) = K_N(z, z); depends on |z| only. Accepts arrays."""
        return np.exp(self.log_density(np.abs(z)))

    def kernel_matrix(self, points) -> np.ndarray:
        pts = [complex(p) for p in points]
        k = len(pts)
        mat = np.empty((k, k), dtype=complex)
        for i in range(k):
            mat[i, i] = self.density(pts[i])
            for j in range(i + 1, k):
                mat[i, j] = self.kernel(pts[i], pts[j])
                mat[j, i] = mat[i, j].conjugate()
        return mat

    def correlation(self, points) -> float:
        """R_k(z_1, ..., z_k) = det[K_N(z_i, z_j)] for k <= 8 points."""
        if not 1 <= len(points) <= 8:
            raise DomainError("correlation: between 1 and 8 points supported")
        # LU with partial pivoting; the determinant of a Hermitian matrix is real
        return float(np.linalg.det(self.kernel_matrix(points)).real)


def log_T_truncated(ctx: KernelContext, x):
    return ctx.log_T(x)


def kernel_eval(ctx: KernelContext, zi: complex, zj: complex) -> complex:
    return ctx.kernel(zi, zj)


def density(ctx: KernelContext, z):
    return ctx.density(z)


def correlation_Rk(ctx: KernelContext, points) -> float:
    return ctx.correlation(points)


def finite_size_density(n: int, N: int, r):
    """Large-N erfc form of R_1 at radius r > 0 (unrescaled variables)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("finite_size_density: r must be > 0")
    q = r ** (1.0 / n)
    arg = math.sqrt(n) * (q * q - N) / (math.sqrt(2.0) * q)
    return r ** (2.0 / n - 2.0) / (n * math.pi) * 0.5 * erfc(arg)
