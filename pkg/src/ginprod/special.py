"""Scalar special functions used throughout the package.

``log_gamma`` is a Lanczos approximation written for the right half-plane,
where the Mellin contours live. The Bessel functions and erfc delegate to
``scipy.special`` and add log-domain variants so callers can combine
exponentially small weights with exponentially large sums.

Switch radii and term caps (fixed, platform independent):

=====================  =========  ==========================================
constant               value      meaning
=====================  =========  ==========================================
HYPER_SWITCH_RADIUS    1.0e4      |x| above which hyper_0F_q refuses series
HYPER_MAX_TERMS        20000      term cap for the 0F_q power series
HYPER_RTOL             1.0e-16    relative size of the last accepted term
=====================  =========  ==========================================
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy import special as _sp

from .errors import ConvergenceError, DomainError

HYPER_SWITCH_RADIUS = 1.0e4
HYPER_MAX_TERMS = 20000
HYPER_RTOL = 1.0e-16

# Godfrey's coefficients, g = 607/128, 15 terms.
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(s):
    """Principal-branch log Gamma for Re(s) > 0.

    Accepts a scalar or an array; complex input gives complex output, real
    input gives real output.
    """
    arr = np.asarray(s)
    if not np.all(np.isfinite(arr)):
        raise DomainError("log_gamma: non-finite argument")
    if np.any(np.real(arr) <= 0):
        raise DomainError("log_gamma: requires Re(s) > 0")
    real_input = not np.iscomplexobj(arr)
    z = arr.astype(complex) - 1.0
    acc = np.full(z.shape, _LANCZOS_COEF[0], dtype=complex)
    for k in range(1, _LANCZOS_COEF.size):
        acc = acc + _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    out = _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(acc)
    if real_input:
        out = out.real
    return out[()] if out.ndim == 0 else out


def erfc(x):
    """Complementary error function (0 once the tail underflows)."""
    return _sp.erfc(x)


def log_erfc(x):
    """log erfc(x), finite for every finite x."""
    # erfc(x) = 2 * Phi(-sqrt(2) x)
    return math.log(2.0) + _sp.log_ndtr(-math.sqrt(2.0) * np.asarray(x, dtype=float))


def bessel_K0(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("bessel_K0: requires x > 0")
    out = _sp.k0(x)
    return out[()] if out.ndim == 0 else out


def log_bessel_K0(x):
    """log K0(x) without underflow for large x."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("log_bessel_K0: requires x > 0")
    out = np.log(_sp.k0e(x)) - x
    return out[()] if out.ndim == 0 else out


def bessel_I0(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("bessel_I0: requires x >= 0")
    out = _sp.i0(x)
    return out[()] if out.ndim == 0 else out


def log_bessel_I0(x):
    """log I0(x) without overflow for large x."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("log_bessel_I0: requires x >= 0")
    out = np.log(_sp.i0e(x)) + x
    return out[()] if out.ndim == 0 else out


def hyper_0F_q(q: int, x: complex) -> complex:
    """sum_k x**k / (k!)**(q+1), i.e. 0F_q(; 1, ..., 1; x).

    q = 0 is returned as exp(x) directly; the series would lose all digits
    to cancellation for large negative x.
    """
    if q < 0:
        raise DomainError("hyper_0F_q: q must be >= 0")
    x = complex(x)
    if not (math.isfinite(x.real) and math.isfinite(x.imag)):
        raise DomainError("hyper_0F_q: non-finite argument")
    if q == 0:
        return cmath.exp(x)
    if abs(x) > HYPER_SWITCH_RADIUS:
        raise ConvergenceError(
            f"hyper_0F_q: |x| = {abs(x):.3g} beyond series switch radius",
            partial=None, bound=math.inf)
    # terms peak near k ~ |x|**(1/(q+1)); only stop after that
    k_peak = abs(x) ** (1.0 / (q + 1))
    term = 1.0 + 0.0j
    total = term
    for k in range(1, HYPER_MAX_TERMS + 1):
        term *= x / float(k) ** (q + 1)
        total += term
        if k > k_peak and abs(term) <= HYPER_RTOL * abs(total):
            return total
    raise ConvergenceError(
        f"hyper_0F_q: no convergence within {HYPER_MAX_TERMS} terms",
        partial=total, bound=abs(term) * HYPER_MAX_TERMS)
