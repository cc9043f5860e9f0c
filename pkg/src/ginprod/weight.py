"""Weight function w_n(|z|) of the product of n Ginibre matrices.

w_n is the inverse Mellin transform (in R = |z|**2) of pi**(n-1) Gamma(s)**n,
i.e. pi**(n-1) times the Meijer G-function G^{n,0}_{0,n}(R | 0, ..., 0).
Three evaluation routes are provided:

* closed forms for n = 1 (Gaussian) and n = 2 (2 pi K0(2r)),
* trapezoidal quadrature along a vertical Mellin contour,
* the leading saddle-point tail for large r.

The recursion integral ``weight_recursion`` and ``weight_moment`` are
quadrature oracles for the production path, not part of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy import special as _sp

from .errors import ConfigurationError, ConvergenceError, DomainError
from .special import log_bessel_K0, log_gamma

LOG_PI = math.log(math.pi)
# Scale variable n * r**(2/n) beyond which the saddle-point tail is used when
# an evaluator opts into it.
SADDLE_TAIL_SWITCH = 40.0


@dataclass(frozen=True)
class WeightEvaluator:
    """Evaluates log w_n(r) for a fixed number of factors n.

    By default the contour runs through the real saddle s* of
    Gamma(s)**n R**(-s), the root of n digamma(s) = log R. On that line the
    integrand has no stationary oscillation, so the result keeps full
    relative accuracy whether w_n is tiny (large R) or dominated by the
    log singularity at the origin (s* -> 0 as R -> 0). Passing ``c`` pins
    the abscissa instead; accuracy then degrades by roughly R**(-c) / w_n.

    ``contour_step`` and ``contour_halfwidth`` fix the quadrature grid when
    given; otherwise both are chosen per point from the local Gaussian width
    of the integrand and the decay of |Gamma(c + it)|**n.

    ``tail_switch`` defaults to infinity: the quadrature is accurate and
    O(1) in cost at every r, whereas the saddle-point tail carries relative
    errors of order 1/(n r**(2/n)). Pass ``SADDLE_TAIL_SWITCH`` to dispatch
    to the tail beyond n r**(2/n) = 40.
    """

    n: int
    c: float | None = None
    contour_step: float | None = None
    contour_halfwidth: float | None = None
    tail_switch: float = math.inf
    quad_tol: float = 1e-13

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigurationError(f"n must be a positive integer, got {self.n}")
        if self.c is not None and not self.c > 0:
            raise ConfigurationError("contour abscissa c must be > 0")
        if not 0 < self.quad_tol < 1:
            raise ConfigurationError("quad_tol must lie in (0, 1)")
        if self.contour_step is not None and not self.contour_step > 0:
            raise ConfigurationError("contour_step must be > 0")
        if self.contour_halfwidth is not None:
            if not self.contour_halfwidth > 0:
                raise ConfigurationError("contour_halfwidth must be > 0")
            # relative decay of |Gamma(c+it)|**n at the reference abscissa;
            # log_mellin re-checks the bound on the contour actually used
            c_ref = 0.5 if self.c is None else self.c
            drop = self.n * (log_gamma(complex(c_ref, self.contour_halfwidth)).real
                             - log_gamma(c_ref))
            if drop > math.log(self.quad_tol):
                raise ConfigurationError(
                    f"contour halfwidth {self.contour_halfwidth} leaves a truncation "
                    f"term e^{drop:.1f} above quad_tol={self.quad_tol:g}")

    def method(self, r: float) -> str:
        """Name of the route ``log_weight`` takes at radius r."""
        if self.n == 1:
            return "closed_form"
        if self.n == 2:
            return "bessel_k0"
        if self.n * r ** (2.0 / self.n) > self.tail_switch:
            return "asymptotic"
        return "mellin"

    def log_weight(self, r):
        """log w_n(r); accepts a scalar or an array of radii."""
        arr = np.asarray(r, dtype=float)
        if np.any(~np.isfinite(arr)):
            raise DomainError("log_weight: non-finite radius")
        if self.n == 1:
            if np.any(arr < 0):
                raise DomainError("log_weight: r must be >= 0")
            out = -arr * arr
        else:
            if np.any(arr <= 0):
                raise DomainError(f"log_weight: w_{self.n} diverges at r = 0; r must be > 0")
            if self.n == 2:
                out = math.log(2 * math.pi) + log_bessel_K0(2.0 * arr)
            else:
                flat = arr.ravel()
                vals = np.empty(flat.shape)
                for i, ri in enumerate(flat):
                    if self.method(ri) == "asymptotic":
                        vals[i] = log_weight_asymptotic(self.n, ri)
                    else:
                        vals[i] = self.log_mellin(ri * ri)
                out = vals.reshape(arr.shape)
        out = np.asarray(out, dtype=float)
        return out[()] if out.ndim == 0 else out

    def weight(self, r):
        return np.exp(self.log_weight(r))

    # -- Mellin inversion -------------------------------------------------

    def contour(self, R: float) -> tuple[float, float, float]:
        """(abscissa, step, halfwidth) of the trapezoid grid used at R."""
        n = self.n
        log_R = math.log(R)
        c = self.c if self.c is not None else real_saddle(n, log_R)
        curvature = n * float(_sp.polygamma(1, c))
        sigma = 1.0 / math.sqrt(curvature)
        if self.contour_step is not None:
            h = self.contour_step
        else:
            # discretisation error ~ exp(-2 pi a / h) times the growth of the
            # integrand when the line is shifted by +-a (poles at s = 0, -1, ...)
            base = n * log_gamma(c)
            budget = 5.0 - math.log(self.quad_tol)
            h = 0.0
            for a in c * np.array([0.1, 0.2, 0.35, 0.5, 0.7, 0.9]):
                grow = max(n * log_gamma(c - a) - base + a * log_R,
                           n * log_gamma(c + a) - base - a * log_R, 0.0)
                h = max(h, 2 * math.pi * a / (grow + budget))
            h = float(min(h, sigma / 2.0))
        if self.contour_halfwidth is not None:
            T = self.contour_halfwidth
        else:
            target = math.log(self.quad_tol) - 5.0
            base = n * log_gamma(c)
            T = 6.0 * sigma
            while n * log_gamma(complex(c, T)).real - base > target:
                T *= 1.5
        return c, h, T

    def log_mellin(self, R: float) -> float:
        """log Omega_n(R) = log w_n(sqrt(R)) by Mellin inversion."""
        if not R > 0 or not math.isfinite(R):
            raise DomainError("mellin_inversion: R must be finite and > 0")
        n = self.n
        c, h, T = self.contour(R)
        log_R = math.log(R)
        t = np.arange(0.0, T + 0.5 * h, h)
        phase = n * log_gamma(c + 1j * t) - (c + 1j * t) * log_R
        top = phase[0].real
        f = np.exp(phase - top).real
        f[0] *= 0.5
        if self.contour_halfwidth is not None:
            tail = math.exp(n * (log_gamma(complex(c, T)).real - log_gamma(c)))
            if tail > self.quad_tol:
                raise ConfigurationError(f"contour truncation bound {tail:.2e} exceeds quad_tol")
        total = h * f.sum()
        if not total > 0:
            raise ConvergenceError("mellin_inversion: non-positive quadrature sum",
                                   partial=total, bound=None)
        # (1/2 pi) * 2 * int_0^inf Re(...) dt, times pi**(n-1)
        return (n - 2) * LOG_PI + top + math.log(total)

    def mellin_inversion(self, R: float) -> float:
        """Omega_n(R) = w_n(sqrt(R))."""
        return math.exp(self.log_mellin(R))


def real_saddle(n: int, log_R: float) -> float:
    """Root s > 0 of n digamma(s) = log R (digamma is increasing on s > 0)."""
    t = log_R / n
    # digamma(s) ~ log(s - 1/2) for large s and ~ -1/s near 0
    guess = math.exp(t) + 0.5 if t > -1.0 else -1.0 / (t - 0.5772156649015329)
    lo, hi = 0.5 * guess, 2.0 * guess
    while _sp.digamma(lo) > t:
        lo *= 0.5
    while _sp.digamma(hi) < t:
        hi *= 2.0
    return optimize.brentq(lambda s: _sp.digamma(s) - t, lo, hi, xtol=1e-15, rtol=1e-13)


def mellin_inversion(ev: WeightEvaluator, R: float) -> float:
    return ev.mellin_inversion(R)


def log_weight(ev: WeightEvaluator, r):
    return ev.log_weight(r)


def log_weight_asymptotic(n: int, r):
    """Leading saddle-point form of log w_n(r) for large r (exact for n = 1)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("log_weight_asymptotic: r must be > 0")
    out = (-0.5 * math.log(n) + 0.5 * (n - 1) * math.log(2 * math.pi ** 3)
           + (1.0 - n) / n * np.log(r) - n * r ** (2.0 / n))
    return out[()] if out.ndim == 0 else out


def _log_quad(logf, lo_hint: float, hi_hint: float, epsrel: float):
    """log of int exp(logf(u)) du over the real line.

    The integrand is assumed unimodal; it is rescaled by its peak and
    integrated over the window where it exceeds exp(-60) of the peak.
    """
    res = optimize.minimize_scalar(lambda u: -logf(u), bracket=(lo_hint, hi_hint))
    u0 = res.x
    top = logf(u0)
    lo, hi = u0 - 0.5, u0 + 0.5
    while logf(lo) - top > -60:
        lo -= 0.5 + (u0 - lo)
    while logf(hi) - top > -60:
        hi += 0.5 + (hi - u0)
    val, err = integrate.quad(lambda u: math.exp(logf(u) - top), lo, hi,
                              points=[u0], epsabs=0.0, epsrel=epsrel, limit=400)
    if not err <= max(10 * epsrel * abs(val), 1e-300):
        raise ConvergenceError(f"quadrature did not converge (error estimate {err:.2e})",
                               partial=val * math.exp(top), bound=err * math.exp(top))
    return top + math.log(val)


def log_weight_recursion(ev_n: WeightEvaluator, r: float, epsrel: float = 1e-11) -> float:
    """log w_{n+1}(r) from w_n by the one-dimensional recursion integral.

    w_{n+1}(r) = 2 pi int_0^inf (d rho / rho) w_n(r / rho) exp(-rho**2),
    integrated in u = log rho.
    """
    if not r > 0:
        raise DomainError("weight_recursion: r must be > 0")
    log_r = math.log(r)

    def logf(u):
        return float(ev_n.log_weight(math.exp(log_r - u))) - math.exp(2.0 * u)

    # the integrand peaks near rho ~ r**(1/(n+1))
    guess = log_r / (ev_n.n + 1)
    return math.log(2 * math.pi) + _log_quad(logf, guess - 1.0, guess + 0.5, epsrel)


def weight_recursion(ev_n: WeightEvaluator, r: float, epsrel: float = 1e-11) -> float:
    """w_{n+1}(r) computed from ``ev_n`` by quadrature."""
    return math.exp(log_weight_recursion(ev_n, r, epsrel))


def weight_moment(ev: WeightEvaluator, k: int, epsrel: float = 1e-11) -> float:
    """2 pi int_0^inf r**(2k+1) w_n(r) dr by quadrature.

    Integrated in u = log r so the logarithmic singularity at the origin
    (n >= 2) becomes an exponentially decaying tail.
    """
    if int(k) != k or k < 0:
        raise DomainError("weight_moment: k must be a non-negative integer")
    if k > 20:
        raise DomainError("weight_moment: quadrature validated only for k <= 20")

    def logf(u):
        return (2 * k + 2) * u + float(ev.log_weight(math.exp(u)))

    guess = 0.25 * ev.n * math.log(k + 1.0)
    return math.exp(math.log(2 * math.pi) + _log_quad(logf, guess - 1.0, guess + 1.0, epsrel))
