"""Command-line entry point: ``ginprod {weight,density,sample,compare}``.

Data files are byte-identical for identical command lines. Each run also
writes ``<out>.manifest.json`` recording inputs, timestamps and the sha256 of
every output; only that manifest carries wall-clock information.

Exit codes: 0 pass, 1 comparison failed, 2 usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConvergenceError, DomainError, GinprodError, NumericalError, StatisticsError
from .harness import (bulk_pair_correlation, compare_to_model, edge_profile,
                      radial_histogram)
from .kernel import KernelContext, finite_size_density
from .limits import bulk_g2, power_density, rho_edge, rho_finite_rescaled, rho_macro
from .sampler import GinibreSpec, SpectrumSample, sample_spectra
from .weight import SADDLE_TAIL_SWITCH, WeightEvaluator

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
MODELS = ("finite", "macro", "edge", "bulk-g2", "power")


class UsageError(GinprodError):
    pass


def parse_grid(text: str) -> np.ndarray:
    """``min:max:points[:log]`` -> array of radii."""
    parts = text.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise UsageError(f"grid must be min:max:points[:log], got {text!r}")
    try:
        lo, hi, pts = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"bad grid {text!r}") from None
    if not (0 < lo < hi and math.isfinite(hi)) or pts < 2:
        raise UsageError("grid needs 0 < min < max and at least 2 points")
    if len(parts) == 4:
        return np.geomspace(lo, hi, pts)
    return np.linspace(lo, hi, pts)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _inputs_hash(command: str, params: dict) -> str:
    blob = json.dumps({"command": command, "params": params, "version": __version__},
                      sort_keys=True).encode()
    return _sha256(blob)


def _write_outputs(out: Path, data: bytes, command: str, params: dict, started: str) -> None:
    out.write_bytes(data)
    manifest = {
        "command": command,
        **params,
        "tool_version": __version__,
        "started": started,
        "finished": _now(),
        "outputs": [{"path": str(out), "sha256": _sha256(data)}],
    }
    Path(str(out) + ".manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _csv_bytes(command: str, params: dict, header: list[str], rows) -> bytes:
    buf = io.StringIO()
    buf.write(f"# ginprod {__version__} {command}\n")
    buf.write(f"# params: {json.dumps(params, sort_keys=True)}\n")
    buf.write(f"# manifest_sha256: {_inputs_hash(command, params)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue().encode()


# -- commands -------------------------------------------------------------------

def cmd_weight(args) -> int:
    r = parse_grid(args.grid)
    ev = WeightEvaluator(args.n, tail_switch=args.tail_switch)
    params = {"n": args.n, "grid": args.grid, "tail_switch": args.tail_switch}
    log_w = ev.log_weight(r)
    rows = [(ri, lw, math.exp(lw), ev.method(ri)) for ri, lw in zip(r, log_w)]
    data = _csv_bytes("weight", params, ["r", "log_w", "w", "method_used"], rows)
    _write_outputs(Path(args.out), data, "weight", params, args.started)
    return EXIT_PASS


def cmd_density(args) -> int:
    r = parse_grid(args.grid)
    n, N = args.n, args.dim
    ctx = KernelContext(n, N)
    exact = ctx.density(r)
    approx = finite_size_density(n, N, r)
    macro = N ** (1.0 - n) * rho_macro(n, r / N ** (n / 2.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(exact > 0, approx / exact - 1.0, np.nan)
    params = {"n": n, "N": N, "grid": args.grid}
    rows = zip(r, exact, approx, macro, rel)
    data = _csv_bytes("density", params, ["r", "exact", "erfc_approx", "macro", "rel_diff"], rows)
    _write_outputs(Path(args.out), data, "density", params, args.started)
    return EXIT_PASS


def dump_bytes(samples) -> bytes:
    lines = [json.dumps(s.to_record(), separators=(",", ":")) for s in
             sorted(samples, key=lambda s: s.stream_index)]
    return ("\n".join(lines) + "\n").encode()


def read_dump(path: Path) -> list[SpectrumSample]:
    samples = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                samples.append(SpectrumSample.from_record(json.loads(line)))
    if not samples:
        raise UsageError(f"{path}: empty dump")
    return samples


def cmd_sample(args) -> int:
    spec = GinibreSpec(args.dim, args.n, args.seed, args.samples)
    samples = sample_spectra(spec, args.kind)
    params = {"n": args.n, "N": args.dim, "samples": args.samples, "seed": args.seed,
              "kind": args.kind}
    _write_outputs(Path(args.out), dump_bytes(samples), "sample", params, args.started)
    return EXIT_PASS


def _criterion(name, value, threshold, ok) -> dict:
    return {"name": name, "value": float(value), "threshold": threshold, "pass": bool(ok)}


def compare_report(samples, model: str, n: int | None = None, bins: int | None = None) -> dict:
    """Run one harness comparison and return the JSON-ready report."""
    if model not in MODELS:
        raise UsageError(f"model must be one of {MODELS}")
    n_data, N = samples[0].n, samples[0].N
    n = n_data if n is None else n
    if n != n_data:
        # analyse under the hypothesised n
        samples = [SpectrumSample(s.eigenvalues, s.kind, n, s.N, s.seed, s.stream_index)
                   for s in samples]
    report = {"model": model, "n": n, "N": N, "samples": len(samples),
              "kind": samples[0].kind}
    crit = []
    if model in ("finite", "macro", "power"):
        curve = {"finite": lambda s: rho_finite_rescaled(n, N, s),
                 "macro": lambda s: rho_macro(n, s),
                 "power": lambda s: power_density(n, N, s)}[model]
        span = 1.3 if model != "power" else 1.0 + 5 * n / math.sqrt(2 * N)
        hist = radial_histogram(samples, bins or 52, "macroscopic", r_max=span)
        rep = compare_to_model(hist, curve)
        report.update(rep.as_dict())
        crit.append(_criterion("max_abs_pull", rep.max_abs_sigma, 4.0, rep.max_abs_sigma <= 4.0))
        crit.append(_criterion("chi2_per_dof", rep.chi2_per_dof, [0.5, 1.8],
                               0.5 <= rep.chi2_per_dof <= 1.8))
    elif model == "edge":
        prof = edge_profile(samples, 3.0, bins or 24)
        pulls = prof.pulls(rho_edge)
        expected = prof.expected_counts(rho_edge)
        use = expected >= 5.0
        worst = float(np.max(np.abs(pulls[use])))
        report.update({"xi": prof.xi.tolist(), "density": prof.density.tolist(),
                       "pulls": pulls.tolist()})
        crit.append(_criterion("max_abs_pull", worst, 3.0, worst <= 3.0))
    else:
        pc = bulk_pair_correlation(samples, s_max=3.0, bins=bins or 28)
        sel = pc.s >= 0.2
        z = (pc.g2 - bulk_g2(pc.s)) / pc.sigma
        worst = float(np.max(np.abs(z[sel])))
        report.update({"s": pc.s.tolist(), "g2": pc.g2.tolist(), "sigma": pc.sigma.tolist()})
        crit.append(_criterion("max_abs_pull", worst, 3.0, worst <= 3.0))
    report["criteria"] = crit
    report["pass"] = all(c["pass"] for c in crit)
    return report


def cmd_compare(args) -> int:
    samples = read_dump(Path(getattr(args, "in")))
    report = compare_report(samples, args.model, args.n, args.bins)
    data = (json.dumps(report, indent=2, sort_keys=True) + "\n").encode()
    params = {"in": getattr(args, "in"), "model": args.model, "n": args.n, "bins": args.bins}
    _write_outputs(Path(args.out), data, "compare", params, args.started)
    print(("PASS" if report["pass"] else "FAIL") + f" {args.model}")
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ginprod", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"ginprod {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    w = sub.add_parser("weight", help="tabulate w_n(r)")
    w.add_argument("--n", type=int, required=True)
    w.add_argument("--grid", required=True, help="min:max:points[:log]")
    w.add_argument("--tail-switch", type=float, default=SADDLE_TAIL_SWITCH,
                   help="n r^(2/n) beyond which the saddle-point tail is used")
    w.add_argument("--out", required=True)
    w.set_defaults(func=cmd_weight)

    d = sub.add_parser("density", help="exact, erfc and macroscopic densities")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--dim", type=int, required=True)
    d.add_argument("--grid", required=True)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_density)

    s = sub.add_parser("sample", help="dump Monte Carlo spectra as JSON lines")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--kind", choices=("product", "power"), default="product")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sample)

    c = sub.add_parser("compare", help="compare a dump against a model")
    c.add_argument("--in", required=True)
    c.add_argument("--model", choices=MODELS, required=True)
    c.add_argument("--n", type=int, default=None, help="model n (defaults to the dump's n)")
    c.add_argument("--bins", type=int, default=None)
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.started = _now()
    for name in ("n", "dim", "samples"):
        v = getattr(args, name, None)
        if v is not None and v < 1:
            parser.error(f"--{name} must be >= 1")
    try:
        return args.func(args)
    except (NumericalError, ConvergenceError) as exc:
        print(f"ginprod: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, DomainError, StatisticsError, OSError, ValueError, KeyError) as exc:
        print(f"ginprod: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
