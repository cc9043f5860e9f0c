"""Estimators that turn sampled spectra into densities and correlations.

All estimators are deterministic functions of the multiset of samples:
points are pooled in stream-index order and reduced with plain numpy sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, NumericalError, StatisticsError
from .limits import crossover_width, macro_radius, unfold_radius
from .sampler import SpectrumSample
from .special import erfc

RESCALES = ("raw", "macroscopic", "unfolded")


def _common_shape(samples: Sequence[SpectrumSample]) -> tuple[int, int]:
    if not samples:
        raise DomainError("no samples given")
    n, N = samples[0].n, samples[0].N
    for s in samples:
        if (s.n, s.N) != (n, N):
            raise DomainError("samples mix different (n, N)")
    return n, N


def _ordered(samples):
    return sorted(samples, key=lambda s: (s.kind, s.stream_index))


def to_coordinate(r, rescale: str, n: int, N: int):
    """Map radii to the histogram coordinate of ``rescale``."""
    if rescale == "raw":
        return np.asarray(r, dtype=float)
    if rescale == "macroscopic":
        return macro_radius(r, n, N)
    if rescale == "unfolded":
        return unfold_radius(r, n)
    raise DomainError(f"rescale must be one of {RESCALES}, got {rescale!r}")


@dataclass
class RadialHistogram:
    """Annular histogram of eigenvalue moduli.

    ``density`` is counts per unit area in the chosen coordinate, normalised
    to integrate to 1 for the macroscopic rescale and to N (eigenvalues per
    sample) for raw and unfolded coordinates.
    """

    edges: np.ndarray
    counts: np.ndarray
    total_points: int
    n_samples: int
    rescale: str
    n: int
    N: int
    outside: int = 0

    @property
    def normalisation(self) -> float:
        return float(self.total_points if self.rescale == "macroscopic" else self.n_samples)

    @property
    def areas(self) -> np.ndarray:
        area = math.pi * np.diff(self.edges ** 2)
        # z -> z**(1/n) maps each annulus onto a sector of angle 2 pi / n
        return area / self.n if self.rescale == "unfolded" else area

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.normalisation * self.areas)

    @property
    def sigma(self) -> np.ndarray:
        return np.sqrt(self.counts) / (self.normalisation * self.areas)


def radial_histogram(samples: Sequence[SpectrumSample], bins: int,
                     rescale: str = "macroscopic", r_max: float | None = None,
                     r_min: float = 0.0) -> RadialHistogram:
    """Histogram of |z| over ``bins`` equal-width annuli in the rescaled coordinate.

    ``r_max`` defaults to just beyond the largest point so no point is lost.
    """
    n, N = _common_shape(samples)
    if bins < 1:
        raise DomainError("bins must be >= 1")
    radii = np.concatenate([np.abs(s.eigenvalues) for s in _ordered(samples)])
    x = to_coordinate(radii, rescale, n, N)
    hi = float(x.max()) * (1 + 1e-12) + 1e-300 if r_max is None else float(r_max)
    if not hi > r_min >= 0:
        raise DomainError("need 0 <= r_min < r_max")
    edges = np.linspace(r_min, hi, bins + 1)
    counts, _ = np.histogram(x, bins=edges)
    return RadialHistogram(edges, counts.astype(np.int64), int(x.size), len(samples),
                           rescale, n, N, outside=int(x.size - counts.sum()))


def bin_average(model: Callable, edges: np.ndarray) -> np.ndarray:
    """Area-weighted mean of a radial density over each annulus.

    Integrating the bin mass handles integrable singularities at r = 0 that
    a midpoint rule would misrepresent.
    """
    out = np.empty(len(edges) - 1)
    for i, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        mass, _ = integrate.quad(lambda s: 2 * math.pi * s * float(model(s)), a, b,
                                 epsabs=0.0, epsrel=1e-10, limit=200)
        out[i] = mass / (math.pi * (b * b - a * a))
    return out


@dataclass
class ComparisonReport:
    max_abs_sigma: float
    chi2_per_dof: float
    worst_bin: int
    dof: int
    pulls: np.ndarray = field(repr=False)
    model_density: np.ndarray = field(repr=False)
    excluded: list[int] = field(default_factory=list)

    def passed(self, max_sigma: float = 4.0, chi2_range=(0.5, 1.8)) -> bool:
        return (self.max_abs_sigma <= max_sigma
                and chi2_range[0] <= self.chi2_per_dof <= chi2_range[1])

    def as_dict(self) -> dict:
        return {
            "max_abs_sigma": float(self.max_abs_sigma),
            "chi2_per_dof": float(self.chi2_per_dof),
            "worst_bin": int(self.worst_bin),
            "dof": int(self.dof),
            "excluded_bins": [int(i) for i in self.excluded],
        }


def compare_to_model(hist: RadialHistogram, model: Callable,
                     min_expected: float = 0.0) -> ComparisonReport:
    """Pulls and chi-square of ``hist`` against a radial model density.

    The model is averaged over each annulus. Pull variances are the
    model-expected Poisson counts (floored at one count), so empty bins
    where the model vanishes carry no weight. Bins whose model average is
    not finite, or whose expected count is below ``min_expected``, are
    excluded and listed in the report.
    """
    with np.errstate(all="ignore"):
        avg = bin_average(model, hist.edges)
    scale = hist.normalisation * hist.areas
    expected = avg * scale
    keep = np.isfinite(avg) & (expected >= min_expected)
    excluded = [int(i) for i in np.flatnonzero(~keep)]
    if not keep.any():
        raise DomainError("compare_to_model: every bin was excluded")
    var = np.maximum(np.where(keep, expected, 1.0), 1.0)
    pulls = np.where(keep, (hist.counts - np.where(keep, expected, 0.0)) / np.sqrt(var), 0.0)
    dof = int(keep.sum())
    worst = int(np.argmax(np.abs(pulls)))
    return ComparisonReport(float(np.abs(pulls).max()), float(np.sum(pulls[keep] ** 2) / dof),
                            worst, dof, pulls, avg, excluded)


# -- edge ---------------------------------------------------------------------

@dataclass
class EdgeProfile:
    """Unfolded density across the spectral edge.

    ``xi`` is the signed unfolded distance sqrt(n) |z|**(1/n) - sqrt(n N)
    from the edge; ``density`` is eigenvalues per sample per unit unfolded
    area, which tends to 1/pi inside and to erfc(sqrt(2) xi) / (2 pi) across
    the edge.
    """

    edges: np.ndarray
    counts: np.ndarray
    density: np.ndarray
    sigma: np.ndarray
    n: int
    N: int
    n_samples: int

    @property
    def xi(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    def model_average(self, model: Callable) -> np.ndarray:
        """Bin averages of ``model(xi)`` weighted by the unfolded ring area."""
        r0 = math.sqrt(self.n * self.N)
        out = np.empty(self.xi.size)
        for i, (a, b) in enumerate(zip(self.edges[:-1], self.edges[1:])):
            m, _ = integrate.quad(lambda x: float(model(x)) * (x + r0), a, b, epsrel=1e-10)
            out[i] = m / (0.5 * ((b + r0) ** 2 - (a + r0) ** 2))
        return out

    def pulls(self, model: Callable) -> np.ndarray:
        """(density - model) / sigma with model-expected Poisson variance.

        The variance is floored at one count so bins where the model
        vanishes do not dominate.
        """
        expected = self.expected_counts(model)
        return (self.counts - expected) / np.sqrt(np.maximum(expected, 1.0))

    def expected_counts(self, model: Callable) -> np.ndarray:
        return self.model_average(model) / self._unit()

    def _unit(self) -> np.ndarray:
        r0 = math.sqrt(self.n * self.N)
        return self.n / (self.n_samples * math.pi * np.diff((self.edges + r0) ** 2))

    def consistency(self, other: "EdgeProfile") -> np.ndarray:
        """Per-bin difference to another profile in units of the joint error."""
        if not np.allclose(self.edges, other.edges):
            raise DomainError("edge profiles use different bins")
        sa = self._unit() * np.sqrt(np.maximum(self.counts, 1))
        sb = other._unit() * np.sqrt(np.maximum(other.counts, 1))
        return (self.density - other.density) / np.hypot(sa, sb)


def edge_profile(samples: Sequence[SpectrumSample], window_halfwidth: float = 3.0,
                 bins: int = 24, min_count: int = 400) -> EdgeProfile:
    n, N = _common_shape(samples)
    radii = np.concatenate([np.abs(s.eigenvalues) for s in _ordered(samples)])
    r0 = math.sqrt(n * N)
    xi = unfold_radius(radii, n) - r0
    if window_halfwidth >= r0:
        raise DomainError("edge window reaches the origin")
    edges = np.linspace(-window_halfwidth, window_halfwidth, bins + 1)
    counts, _ = np.histogram(xi, bins=edges)
    total = int(counts.sum())
    if total < min_count:
        per_sample = max(total / len(samples), 1e-9)
        raise StatisticsError(
            f"only {total} eigenvalues in the edge window; need >= {min_count} "
            f"(about {math.ceil(min_count / per_sample)} samples)")
    area = math.pi * np.diff((edges + r0) ** 2) / n
    dens = counts / (len(samples) * area)
    sig = np.sqrt(counts) / (len(samples) * area)
    return EdgeProfile(edges, counts, dens, sig, n, N, len(samples))


# -- bulk pair correlation ----------------------------------------------------

@dataclass
class PairCorrelation:
    edges: np.ndarray
    g2: np.ndarray
    sigma: np.ndarray
    n_reference: int

    @property
    def s(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])


def bulk_window(N: int) -> tuple[float, float]:
    """Operational bulk band of unfolded radii, [0.3, 0.7] * sqrt(N)."""
    return 0.3 * math.sqrt(N), 0.7 * math.sqrt(N)


def bulk_pair_correlation(samples: Sequence[SpectrumSample], window: tuple[float, float] | None = None,
                          s_max: float = 3.0, bins: int = 30,
                          density: float = 1.0 / math.pi) -> PairCorrelation:
    """Pair correlation of unfolded eigenvalues, normalised to 1 at large distance.

    Reference points are those with unfolded radius inside ``window``;
    neighbours are counted anywhere. Distances use the branch of z**(1/n)
    continued from the reference point, which preserves short distances
    across the branch cut. The error bars come from the spread of per-sample
    ratio estimates, so correlations between pairs are accounted for.
    """
    n, N = _common_shape(samples)
    lo, hi = bulk_window(N) if window is None else window
    if not 0 < lo < hi:
        raise DomainError("bulk window must satisfy 0 < lo < hi")
    edges = np.linspace(0.0, s_max, bins + 1)
    ring = density * math.pi * np.diff(edges ** 2)
    pair_counts = []
    refs = []
    for smp in _ordered(samples):
        z = smp.eigenvalues[smp.eigenvalues != 0]
        rad = unfold_radius(np.abs(z), n)
        sel = np.flatnonzero((rad >= lo) & (rad < hi))
        hist = np.zeros(bins)
        for i in sel:
            ratio = z / z[i]
            xi_i = rad[i]
            # |xi_i - xi_j| with xi_j continued from xi_i: xi_i |1 - ratio**(1/n)|
            d = xi_i * np.abs(1.0 - ratio ** (1.0 / n))
            d[i] = np.inf
            hist += np.histogram(d, bins=edges)[0]
        pair_counts.append(hist)
        refs.append(sel.size)
    pair_counts = np.array(pair_counts)
    refs = np.array(refs, dtype=float)
    if refs.sum() == 0:
        raise StatisticsError("no reference points in the bulk window")
    expected = refs.sum() * ring
    g2 = pair_counts.sum(axis=0) / expected
    S = len(samples)
    if S < 2:
        raise StatisticsError("need at least two samples for error bars")
    resid = pair_counts - g2[None, :] * refs[:, None] * ring[None, :]
    var = S / (S - 1.0) * np.sum(resid ** 2, axis=0) / expected ** 2
    # floor at one pair so empty bins (strong repulsion at small s) keep a finite error
    var = np.maximum(var, 1.0 / expected ** 2)
    return PairCorrelation(edges, g2, np.sqrt(var), int(refs.sum()))


# -- crossover width ------------------------------------------------------------

@dataclass
class WidthFit:
    width: float
    width_sigma: float
    amplitude: float
    chi2_per_dof: float


def _edge_model(n):
    def f(s, amp, width):
        return amp * s ** (2.0 / n - 2.0) * 0.5 * erfc((s - 1.0) / width)
    return f


def fit_crossover_width(hist: RadialHistogram, s_range=(0.7, 1.3)) -> WidthFit:
    """Least-squares fit of A s**(2/n-2) erfc((s-1)/w) / 2 to a macroscopic histogram."""
    if hist.rescale != "macroscopic":
        raise DomainError("fit_crossover_width needs a macroscopic histogram")
    n = hist.n
    w_pred = crossover_width(n, hist.N, "product")
    bin_width = float(np.max(np.diff(hist.edges)))
    if 2 * w_pred / bin_width < 6:
        raise DomainError(f"bins too coarse: need width <= {2 * w_pred / 6:.4g} to resolve the edge")
    c = hist.centers
    sel = (c >= s_range[0]) & (c <= s_range[1])
    if sel.sum() < 6:
        raise DomainError("fewer than 6 bins inside the fit range")
    y = hist.density[sel]
    # Poisson errors, floored at one count for empty bins
    sig = np.sqrt(np.maximum(hist.counts[sel], 1)) / (hist.normalisation * hist.areas[sel])
    f = _edge_model(n)
    try:
        popt, pcov = optimize.curve_fit(f, c[sel], y, p0=(1.0 / (n * math.pi), w_pred),
                                        sigma=sig, absolute_sigma=True, maxfev=20000)
    except (RuntimeError, optimize.OptimizeWarning) as exc:
        raise NumericalError(f"crossover fit did not converge: {exc}") from exc
    resid = (y - f(c[sel], *popt)) / sig
    dof = max(int(sel.sum()) - 2, 1)
    if not np.all(np.isfinite(pcov)):
        raise NumericalError(f"crossover fit singular; residual chi2/dof = {np.sum(resid ** 2) / dof:.3g}")
    return WidthFit(abs(float(popt[1])), float(math.sqrt(pcov[1, 1])), float(popt[0]),
                    float(np.sum(resid ** 2) / dof))
