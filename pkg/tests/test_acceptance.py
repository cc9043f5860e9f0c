"""Acceptance criteria, one test each; a PASS/FAIL line per criterion is
printed and repeated in the terminal summary."""

import json
import math
import time

import numpy as np
import pytest
from scipy import integrate

from conftest import cached_samples
from ginprod.cli import compare_report, dump_bytes
from ginprod.harness import (bulk_pair_correlation, edge_profile, fit_crossover_width,
                             radial_histogram)
from ginprod.kernel import KernelContext, finite_size_density
from ginprod.limits import bulk_g2, origin_kernel, rho_edge
from ginprod.sampler import GinibreSpec, sample_spectra
from ginprod.special import bessel_K0
from ginprod.weight import (WeightEvaluator, log_weight_asymptotic, log_weight_recursion,
                            weight_moment)

ORIGIN_N2 = 0.3393467796324111164979389524  # (2/pi) K0(1) I0(1), 30-digit mpmath

# pinned seeds; the harness tests reuse the same spectra
SEED_FINITE, SEED_EDGE, SEED_BULK, SEED_WIDTH = 20240601, 20240602, 20240603, 20240604

# Monte Carlo configurations: name -> (N, n, samples, seed, kind)
MC_RUNS = {
    "finite": [(100, 2, 200, SEED_FINITE, "product")],
    "edge": [(100, n, 400, SEED_EDGE + n, "product") for n in (1, 2, 3)],
    "bulk": [(150, 2, 300, SEED_BULK, "product")],
    "width": [(100, 3, 400, SEED_WIDTH, "product"), (100, 3, 400, SEED_WIDTH + 1, "power")],
}


def report_finite(runs):
    return compare_report(runs[0], "finite")


def report_edge(runs):
    profiles = [edge_profile(s, 3.0, 24) for s in runs]
    out = {"pulls": [], "pairwise": []}
    for p in profiles:
        use = p.expected_counts(rho_edge) >= 5.0
        out["pulls"].append(float(np.max(np.abs(p.pulls(rho_edge)[use]))))
    for i in range(3):
        for j in range(i + 1, 3):
            out["pairwise"].append(float(np.max(np.abs(profiles[i].consistency(profiles[j])))))
    out["density"] = [p.density.tolist() for p in profiles]
    return out


def report_bulk(runs):
    pc = bulk_pair_correlation(runs[0], s_max=3.0, bins=28)
    sel = pc.s >= 0.2
    z = (pc.g2 - bulk_g2(pc.s)) / pc.sigma
    return {"max_abs_z": float(np.max(np.abs(z[sel]))), "g2": pc.g2.tolist(),
            "sigma": pc.sigma.tolist(), "references": pc.n_reference}


def report_width(runs):
    fits = [fit_crossover_width(radial_histogram(s, 60, "macroscopic", r_max=1.7, r_min=0.5))
            for s in runs]
    ratio = fits[1].width / fits[0].width
    return {"product": fits[0].width, "power": fits[1].width, "ratio": ratio,
            "ratio_sigma": ratio * math.hypot(fits[0].width_sigma / fits[0].width,
                                              fits[1].width_sigma / fits[1].width)}


REPORTS = {"finite": report_finite, "edge": report_edge, "bulk": report_bulk,
           "width": report_width}


def mc_runs(name):
    return [cached_samples(*cfg) for cfg in MC_RUNS[name]]


def test_01_moment_identities(record_criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for n in (1, 2, 3, 4):
        ev = WeightEvaluator(n)
        for k in range(7):
            exact = (math.pi * math.factorial(k)) ** n
            worst = max(worst, abs(weight_moment(ev, k) / exact - 1))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-7 and dt < 30
    record_criterion(1, "moment identities", ok, f"max rel err {worst:.2e} (tol 1e-7), {dt:.1f}s")
    assert ok


def test_02_weight_oracle_triangle(record_criterion):
    t0 = time.perf_counter()
    r = np.geomspace(1e-3, 10.0, 50)
    ev1, ev2 = WeightEvaluator(1), WeightEvaluator(2)
    closed = max(
        max(abs(math.expm1(ev1.log_mellin(x * x) + x * x)) for x in r),
        max(abs(math.expm1(ev2.log_mellin(x * x) - math.log(2 * math.pi * bessel_K0(2 * x))))
            for x in r))
    recursion = 0.0
    for n in (3, 4):
        lower, ev = WeightEvaluator(n - 1), WeightEvaluator(n)
        for x in np.geomspace(1e-3, 30.0, 50):
            recursion = max(recursion, abs(math.expm1(ev.log_mellin(x * x)
                                                      - log_weight_recursion(lower, x))))
    # overlap band: r^(2/n) in [20, 200]
    asym = 0.0
    for n in (2, 3, 4, 5):
        ev = WeightEvaluator(n)
        for x in np.geomspace(20.0, 200.0, 50):
            rr = x ** (n / 2)
            asym = max(asym, abs(math.expm1(float(log_weight_asymptotic(n, rr))
                                            - ev.log_mellin(rr * rr))))
    dt = time.perf_counter() - t0
    ok = closed <= 1e-8 and recursion <= 1e-6 and asym <= 0.02 and dt < 60
    record_criterion(2, "weight oracle triangle", ok,
                     f"closed/Mellin {closed:.1e} (1e-8), Mellin/recursion {recursion:.1e} (1e-6), "
                     f"Mellin/saddle {asym:.2%} (2%), {dt:.1f}s")
    assert ok


def _normalisation(n, N):
    ctx = KernelContext(n, N)

    def f(u):
        return 2 * math.pi * math.exp(2 * u + float(ctx.log_density(math.exp(u))))

    peak = 0.5 * n * math.log(N)
    top = 0.5 * n * math.log(N + 8 * math.sqrt(N) + 30)
    pieces = ((-40.0, peak - 3), (peak - 3, peak), (peak, top), (top, top + 4))
    return sum(integrate.quad(f, a, b, epsabs=0, epsrel=1e-12, limit=200)[0] for a, b in pieces)


def test_03_kernel_normalisation(record_criterion):
    t0 = time.perf_counter()
    worst = max(abs(_normalisation(n, N) / N - 1) for n in (1, 2, 3) for N in (5, 20))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-7 and dt < 60
    record_criterion(3, "kernel normalisation", ok, f"max rel err {worst:.1e} (tol 1e-7), {dt:.1f}s")
    assert ok


def test_04_finite_size_law(record_criterion):
    t0 = time.perf_counter()
    n, N = 3, 100
    r = np.linspace(0.1, 0.95, 200) * N ** (n / 2)
    worst = float(np.max(np.abs(finite_size_density(n, N, r) / KernelContext(n, N).density(r) - 1)))
    dt = time.perf_counter() - t0
    ok = worst <= 0.02 and dt < 60
    record_criterion(4, "finite-size erfc law", ok, f"max rel diff {worst:.2%} (tol 2%), {dt:.1f}s")
    assert ok


def test_05_origin_kernel(record_criterion):
    t0 = time.perf_counter()
    n2 = abs(float(KernelContext(2, 40).density(0.5)) / ORIGIN_N2 - 1)
    drift = agree = 0.0
    rng = np.random.default_rng(5)
    pts = [complex(*rng.uniform(-1.0, 1.0, 2)) for _ in range(6)]
    for n in (3, 4):
        a, b = KernelContext(n, 40), KernelContext(n, 80)
        for zi in pts:
            for zj in pts:
                ka, kb = a.kernel(zi, zj), b.kernel(zi, zj)
                drift = max(drift, abs(ka - kb) / abs(kb))
                agree = max(agree, abs(origin_kernel(n, zi, zj) - kb) / abs(kb))
    dt = time.perf_counter() - t0
    ok = n2 <= 1e-8 and drift <= 1e-10 and agree <= 1e-10 and dt < 10
    record_criterion(5, "origin kernel", ok,
                     f"n=2 rel err {n2:.1e} (1e-8), N-drift {drift:.1e} (1e-10), "
                     f"0F(n-1) {agree:.1e} (1e-10), {dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_06_monte_carlo_density(record_criterion):
    t0 = time.perf_counter()
    rep = report_finite(mc_runs("finite"))
    dt = time.perf_counter() - t0
    ok = rep["max_abs_sigma"] <= 4 and 0.5 <= rep["chi2_per_dof"] <= 1.8 and dt < 300
    record_criterion(6, "Monte Carlo finite-size density", ok,
                     f"max |pull| {rep['max_abs_sigma']:.2f} (4), chi2/dof "
                     f"{rep['chi2_per_dof']:.2f} ([0.5, 1.8]), {dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_07_edge_universality(record_criterion):
    t0 = time.perf_counter()
    rep = report_edge(mc_runs("edge"))
    dt = time.perf_counter() - t0
    pulls, pair = max(rep["pulls"]), max(rep["pairwise"])
    ok = pulls <= 3 and pair <= 3 and dt < 600
    record_criterion(7, "edge universality n=1,2,3", ok,
                     f"max |pull| vs erfc law {pulls:.2f} (3), max pairwise {pair:.2f} (3), {dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_08_bulk_pair_correlation(record_criterion):
    t0 = time.perf_counter()
    rep = report_bulk(mc_runs("bulk"))
    dt = time.perf_counter() - t0
    ok = rep["max_abs_z"] <= 3 and dt < 600
    record_criterion(8, "bulk pair correlation", ok,
                     f"max |z| on s in [0.2, 3] {rep['max_abs_z']:.2f} (3), {dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_09_width_contrast(record_criterion):
    t0 = time.perf_counter()
    rep = report_width(mc_runs("width"))
    dt = time.perf_counter() - t0
    dev = abs(rep["ratio"] / math.sqrt(3) - 1)
    ok = dev <= 0.15 and dt < 600
    record_criterion(9, "product vs power width", ok,
                     f"ratio {rep['ratio']:.3f} +- {rep['ratio_sigma']:.3f} vs sqrt(3) "
                     f"(dev {dev:.1%}, tol 15%), {dt:.1f}s")
    assert ok


@pytest.mark.slow
def test_10_determinism(record_criterion):
    t0 = time.perf_counter()
    identical = True
    for name, configs in MC_RUNS.items():
        base = [cached_samples(*cfg) for cfg in configs]
        rerun = [sample_spectra(GinibreSpec(N, n, seed, samples), kind, threads=4)
                 for N, n, samples, seed, kind in configs]
        identical &= all(dump_bytes(a) == dump_bytes(b) for a, b in zip(base, rerun))
        rep_a = json.dumps(REPORTS[name](base), sort_keys=True)
        rep_b = json.dumps(REPORTS[name](rerun), sort_keys=True)
        identical &= rep_a == rep_b
    dt = time.perf_counter() - t0
    record_criterion(10, "determinism across thread counts", identical,
                     f"dumps and reports byte-identical (1 vs 4 threads): {identical}, {dt:.1f}s")
    assert identical
