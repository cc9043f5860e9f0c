"""Monte Carlo spectra of products and powers of complex Ginibre matrices.

Entries have density proportional to exp(-|x|**2), i.e. real and imaginary
parts are N(0, 1/2) and E|x|**2 = 1. Every sample owns a random stream
derived from (seed, stream_index) alone, so a run is reproducible
whatever the number of worker threads or the order in which they finish.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .errors import DomainError, NumericalError

KINDS = ("product", "power")
THREADS_ENV = "GINPROD_THREADS"


@dataclass(frozen=True)
class GinibreSpec:
    N: int
    n: int
    seed: int
    samples: int

    def __post_init__(self):
        for name in ("N", "n", "samples"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v}")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.n * math.log2(max(self.N, 2)) >= 900:
            raise DomainError("n * log2(N) >= 900: product entries leave double range")


@dataclass(frozen=True)
class SpectrumSample:
    eigenvalues: np.ndarray
    kind: str
    n: int
    N: int
    seed: int
    stream_index: int

    def to_record(self) -> dict:
        return {
            "stream_index": self.stream_index,
            "kind": self.kind,
            "n": self.n,
            "N": self.N,
            "seed": self.seed,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
        }

    @classmethod
    def from_record(cls, rec: dict) -> "SpectrumSample":
        ev = np.array([complex(re, im) for re, im in rec["eigenvalues"]], dtype=complex)
        if ev.size != rec["N"]:
            raise DomainError(f"record {rec.get('stream_index')}: expected {rec['N']} eigenvalues")
        if rec["kind"] not in KINDS:
            raise DomainError(f"unknown kind {rec['kind']!r}")
        return cls(ev, rec["kind"], int(rec["n"]), int(rec["N"]),
                   int(rec.get("seed", 0)), int(rec["stream_index"]))


def stream(seed: int, stream_index: int) -> np.random.Generator:
    """Independent generator for one sample, keyed by (seed, stream_index)."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream_index,))
    return np.random.Generator(np.random.PCG64(ss))


def sample_ginibre(N: int, rng: np.random.Generator) -> np.ndarray:
    """N x N complex Ginibre matrix with E|x_ab|**2 = 1."""
    if N < 1:
        raise DomainError("N must be >= 1")
    re = rng.standard_normal((N, N))
    im = rng.standard_normal((N, N))
    return (re + 1j * im) * math.sqrt(0.5)


def _eigvals_checked(mat: np.ndarray, stream_index: int) -> np.ndarray:
    try:
        lam = np.linalg.eigvals(mat)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigen-solver failed: {exc}", stream_index) from exc
    tr1 = np.trace(mat)
    tr2 = np.sum(mat * mat.T)
    scale1 = np.sum(np.abs(lam))
    scale2 = np.sum(np.abs(lam) ** 2)
    if abs(lam.sum() - tr1) > 1e-8 * scale1 or abs(np.sum(lam * lam) - tr2) > 1e-6 * scale2:
        raise NumericalError("eigenvalue trace invariants violated", stream_index)
    return lam


def _check_index(spec: GinibreSpec, stream_index: int):
    if not 0 <= stream_index < spec.samples:
        raise DomainError(f"stream_index {stream_index} outside [0, {spec.samples})")


def sample_product_spectrum(spec: GinibreSpec, stream_index: int) -> SpectrumSample:
    """Eigenvalues of X_1 X_2 ... X_n (multiplied left to right)."""
    _check_index(spec, stream_index)
    rng = stream(spec.seed, stream_index)
    prod = sample_ginibre(spec.N, rng)
    for _ in range(spec.n - 1):
        prod = prod @ sample_ginibre(spec.N, rng)
    lam = _eigvals_checked(prod, stream_index)
    return SpectrumSample(lam, "product", spec.n, spec.N, spec.seed, stream_index)


def sample_power_spectrum(spec: GinibreSpec, stream_index: int) -> SpectrumSample:
    """Eigenvalues of X**n, obtained as lambda**n from one Ginibre X."""
    _check_index(spec, stream_index)
    rng = stream(spec.seed, stream_index)
    lam = _eigvals_checked(sample_ginibre(spec.N, rng), stream_index)
    return SpectrumSample(lam ** spec.n, "power", spec.n, spec.N, spec.seed, stream_index)


def default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def sample_spectra(spec: GinibreSpec, kind: str = "product",
                   threads: int | None = None) -> list[SpectrumSample]:
    """All ``spec.samples`` spectra, ordered by stream index."""
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")
    fn = sample_product_spectrum if kind == "product" else sample_power_spectrum
    threads = default_threads() if threads is None else max(1, int(threads))
    # single-threaded BLAS inside every worker keeps results bit-identical
    # across thread counts
    with threadpool_limits(limits=1):
        if threads == 1:
            return [fn(spec, i) for i in range(spec.samples)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda i: fn(spec, i), range(spec.samples)))
