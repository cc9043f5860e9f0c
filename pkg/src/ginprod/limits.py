"""Large-N limit laws of the product ensemble and the unfolding map.

Coordinates: s = |z| / N**(n/2) is the macroscopic radius (support -> unit
disc); xi = sqrt(n) z**(1/n) is the unfolded variable in which the bulk
density is flat, 1/pi.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .special import erfc, hyper_0F_q
from .weight import WeightEvaluator


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    return int(n)


def _out(a):
    a = np.asarray(a, dtype=float)
    return a[()] if a.ndim == 0 else a


def rho_macro(n: int, s):
    """|w|**(2/n-2) / (n pi) inside the unit disc, 0 outside (s = 1 is inside)."""
    n = _check_n(n)
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or (n >= 2 and np.any(s == 0)):
        raise DomainError("rho_macro: s must be > 0 (>= 0 for n = 1)")
    with np.errstate(divide="ignore"):
        val = s ** (2.0 / n - 2.0) / (n * math.pi) if n > 1 else np.full(s.shape, 1 / math.pi)
    return _out(np.where(s <= 1.0, val, 0.0))


def rho_finite_rescaled(n: int, N: int, s):
    """Macroscopic density with the finite-N erfc edge, width sqrt(n / 2N)."""
    n = _check_n(n)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("rho_finite_rescaled: s must be > 0")
    return _out(s ** (2.0 / n - 2.0) / (n * math.pi) * 0.5
                * erfc(math.sqrt(2.0 * N / n) * (s - 1.0)))


def power_density(n: int, N: int, s):
    """Density of the n-th power of one Ginibre matrix, edge width n / sqrt(2N)."""
    n = _check_n(n)
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0):
        raise DomainError("power_density: s must be > 0")
    return _out(s ** (2.0 / n - 2.0) / (n * math.pi) * 0.5
                * erfc(math.sqrt(2.0 * N) / n * (s - 1.0)))


def crossover_width(n: int, N: int, kind: str = "product") -> float:
    """Predicted erfc edge width in s: sqrt(n/2N) (product) or n/sqrt(2N) (power)."""
    if kind == "product":
        return math.sqrt(n / (2.0 * N))
    if kind == "power":
        return n / math.sqrt(2.0 * N)
    raise DomainError(f"unknown kind {kind!r}")


def rho_edge(xi):
    """Universal edge profile erfc(sqrt(2) xi) / (2 pi)."""
    return _out(erfc(math.sqrt(2.0) * np.asarray(xi, dtype=float)) / (2 * math.pi))


def bulk_kernel(n: int, xi_i: complex, xi_j: complex) -> complex:
    """Limiting unfolded bulk kernel.

    (1/pi) * phase**((1-n)/2) * exp(-(|xi_i|**2 + |xi_j|**2)/2 + xi_i conj(xi_j)),
    phase = xi_i conj(xi_j) / |xi_i xi_j| taken on the principal branch.
    """
    n = _check_n(n)
    xi_i, xi_j = complex(xi_i), complex(xi_j)
    if xi_i == 0 or xi_j == 0:
        raise DomainError("bulk_kernel: phase factor undefined at xi = 0")
    u = xi_i * xi_j.conjugate()
    theta = cmath.phase(u)
    expo = -0.5 * (abs(xi_i) ** 2 + abs(xi_j) ** 2) + u
    return cmath.exp(1j * theta * (1 - n) / 2 + expo) / math.pi


def bulk_R2(delta):
    """Unfolded bulk two-point function (1 - exp(-|delta|**2)) / pi**2."""
    d = np.abs(np.asarray(delta))
    return _out((1.0 - np.exp(-d * d)) / math.pi ** 2)


def bulk_g2(s):
    """Normalised bulk pair correlation 1 - exp(-s**2)."""
    s = np.asarray(s, dtype=float)
    return _out(-np.expm1(-s * s))


def origin_kernel(n: int, zi: complex, zj: complex, weight: WeightEvaluator | None = None) -> complex:
    """N -> infinity kernel at |z| = O(1): sqrt(w w) 0F_{n-1}(z_i conj(z_j)) / pi**n."""
    n = _check_n(n)
    if n < 2:
        raise DomainError("origin_kernel: defined for n >= 2 (n = 1 is the bulk kernel)")
    zi, zj = complex(zi), complex(zj)
    if zi == 0 or zj == 0:
        raise DomainError("origin_kernel: weight is singular at z = 0")
    if weight is None:
        weight = WeightEvaluator(n)
    elif weight.n != n:
        raise DomainError("weight evaluator has a different n")
    lw = 0.5 * (float(weight.log_weight(abs(zi))) + float(weight.log_weight(abs(zj))))
    return math.exp(lw - n * math.log(math.pi)) * hyper_0F_q(n - 1, zi * zj.conjugate())


def unfold(z, n: int):
    """xi = sqrt(n) z**(1/n), principal branch. Accepts arrays."""
    n = _check_n(n)
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise DomainError("unfold: z = 0 has no unfolded image")
    out = math.sqrt(n) * z ** (1.0 / n)
    return out[()] if out.ndim == 0 else out


def unfold_radius(r, n: int):
    """|xi| = sqrt(n) r**(1/n); branch independent, defined at r = 0."""
    n = _check_n(n)
    return _out(math.sqrt(n) * np.asarray(r, dtype=float) ** (1.0 / n))


def macro_radius(r, n: int, N: int):
    """s = r / N**(n/2)."""
    return _out(np.asarray(r, dtype=float) / float(N) ** (n / 2.0))


@dataclass(frozen=True)
class LimitModels:
    """The limit laws bound to a fixed n."""

    n: int

    def __post_init__(self):
        _check_n(self.n)

    def macro(self, s):
        return rho_macro(self.n, s)

    def finite(self, N: int, s):
        return rho_finite_rescaled(self.n, N, s)

    def power(self, N: int, s):
        return power_density(self.n, N, s)

    def edge(self, xi):
        return rho_edge(xi)

    def bulk(self, xi_i, xi_j):
        return bulk_kernel(self.n, xi_i, xi_j)

    def origin(self, zi, zj, weight: WeightEvaluator | None = None):
        return origin_kernel(self.n, zi, zj, weight)

    def unfold(self, z):
        return unfold(z, self.n)
