"""Command-line front end.

Exit codes: 0 success, 1 modified model left its width bounds
(boundary-check only), 2 configuration error, 3 numerical failure,
4 I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
import warnings

import numpy as np

from . import csvio
from .config import RunConfig, format_params, load_config, parse_config, preset_waveform
from .errors import ConfigError, UnknownKey, SimulationError, TunnelmemError
from .fitting import FITTABLE, BudgetExhausted, FitProblem, fit_parameters
from .metrics import Region, ReferenceTrace, trace_error
from .model import Variant
from .transient import simulate

EXIT_OK, EXIT_BOUNDS, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("tunnelmem")

STRESS_PRESETS = ("stress-high", "stress-low")


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else parse_config("", "<defaults>")
    if not args.quiet:
        for line in cfg.provenance:
            print(line, file=sys.stderr)
    return cfg


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def knee_points(trace) -> dict:
    """Largest-|i| sample of the positive and of the negative drive lobe."""
    out = {}
    for name, mask in (("off", trace.v > 0), ("on", trace.v < 0)):
        if not mask.any():
            out[name] = None
            continue
        idx = np.flatnonzero(mask)
        k = idx[np.argmax(np.abs(trace.i[idx]))]
        out[name] = {"t": float(trace.t[k]), "v": float(trace.v[k]), "i": float(trace.i[k])}
    return out


def cmd_simulate(args):
    cfg = _load(args)
    trace = simulate(cfg.drive, cfg.params, cfg.solver, cfg.w0)
    with _open_out(args.output or cfg.output) as fh:
        csvio.write_trace(trace, fh)
    return EXIT_OK


def _run_both(cfg):
    return {v.value: simulate(cfg.drive, cfg.params.replace(variant=v), cfg.solver, cfg.w0)
            for v in (Variant.ORIGINAL, Variant.MODIFIED)}


def cmd_compare(args):
    cfg = _load(args)
    traces = _run_both(cfg)
    os.makedirs(args.output, exist_ok=True)
    summary = {"drive": cfg.drive_name, "waveform": cfg.drive.describe(), "variants": {}}
    for name, tr in traces.items():
        with open(os.path.join(args.output, f"{name}.csv"), "w", newline="") as fh:
            csvio.write_trace(tr, fh)
        summary["variants"][name] = {
            "w_min": float(tr.w_eff.min()),
            "w_max": float(tr.w_eff.max()),
            "knees": knee_points(tr),
        }
    reference = ReferenceTrace.from_trace(traces["original"])
    errors = {}
    for region in Region:
        try:
            errors[region.value] = trace_error(traces["modified"], reference, region)
        except TunnelmemError as exc:
            log.warning("error for region %s unavailable: %s", region.value, exc)
            errors[region.value] = None
    summary["modified_vs_original_error"] = errors
    with open(os.path.join(args.output, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)
    for name, s in summary["variants"].items():
        print(f"{name:9s} w in [{s['w_min']:.4f}, {s['w_max']:.4f}] nm  knees: "
              + ", ".join(f"{k}=({p['v']:.3f} V, {p['i'] * 1e3:.4f} mA)"
                          for k, p in s["knees"].items() if p))
    for region, e in errors.items():
        print(f"modified vs original, {region:4s}: " + ("n/a" if e is None else f"{e:.6g}"))
    return EXIT_OK


def cmd_boundary_check(args):
    cfg = _load(args)
    status = EXIT_OK
    p = cfg.params
    for preset in STRESS_PRESETS:
        wf = preset_waveform(preset)
        for variant in (Variant.MODIFIED, Variant.ORIGINAL):
            params = p.replace(variant=variant)
            note = ""
            try:
                tr = simulate(wf, params, cfg.solver, cfg.w0)
            except SimulationError as exc:
                tr = exc.partial
                note = f"  stopped at t={exc.t:.4f} s: {exc.cause}"
                if variant is Variant.MODIFIED:
                    status = max(status, EXIT_NUMERIC)
            if tr is None:
                print(f"{preset:12s} {variant.value:9s} no samples{note}")
                continue
            lo, hi = float(tr.w_raw.min()), float(tr.w_raw.max())
            inside = p.w_min <= tr.w_eff.min() and tr.w_eff.max() <= p.w_max
            if variant is Variant.MODIFIED and not inside:
                status = max(status, EXIT_BOUNDS) if status != EXIT_NUMERIC else status
            print(f"{preset:12s} {variant.value:9s} w in [{lo:.4f}, {hi:.4f}] nm "
                  f"({'inside' if inside else 'OUTSIDE'} [{p.w_min}, {p.w_max}]){note}")
    return status


def cmd_error(args):
    model = csvio.read_reference(args.model)
    reference = csvio.read_reference(args.reference)
    print("%.17g" % trace_error(model, reference, Region(args.region)))
    return EXIT_OK


def _parse_bounds(items, names, base):
    bounds = {}
    for name in names:
        if name not in FITTABLE:
            raise UnknownKey(f"--free: {name!r} is not a fittable model parameter")
        x = getattr(base, name)
        bounds[name] = (x / 4.0, x * 4.0) if x > 0 else (x * 4.0, x / 4.0)
    for item in items or ():
        try:
            name, rng = item.split("=")
            lo, hi = (float(s) for s in rng.split(":"))
        except ValueError:
            raise ConfigError(f"--bounds expects name=lo:hi, got {item!r}") from None
        if name not in bounds:
            raise ConfigError(f"--bounds given for {name!r}, which is not in --free")
        bounds[name] = (lo, hi)
    return bounds


def cmd_fit(args):
    cfg = _load(args)
    reference = csvio.read_reference(args.reference)
    names = [n.strip() for n in args.free.split(",") if n.strip()]
    problem = FitProblem(_parse_bounds(args.bounds, names, cfg.params), reference, cfg.drive,
                         Region(args.region), args.budget, cfg.w0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", BudgetExhausted)  # reported below instead
        result = fit_parameters(problem, cfg.params, cfg.solver)
    with _open_out(args.output) as fh:
        fh.write(format_params(result.params))
    print(f"error {result.error:.6g} after {result.evaluations} evaluations"
          + (" (budget exhausted)" if result.exhausted else ""), file=sys.stderr)
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(prog="tunnelmem", description=__doc__.splitlines()[0])
    ap.add_argument("-q", "--quiet", action="store_true",
                    help="do not echo the config provenance listing")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="one transient run, trace CSV out")
    sp.add_argument("config", nargs="?")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="original vs modified on the same drive")
    sp.add_argument("config", nargs="?")
    sp.add_argument("-o", "--output", required=True, help="output directory")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("boundary-check", help="width-limit stress ramps on both variants")
    sp.add_argument("config", nargs="?")
    sp.set_defaults(func=cmd_boundary_check)

    sp = sub.add_parser("error", help="relative RMS error between two CSV traces")
    sp.add_argument("model")
    sp.add_argument("reference")
    sp.add_argument("--region", choices=[r.value for r in Region], default="full")
    sp.set_defaults(func=cmd_error)

    sp = sub.add_parser("fit", help="fit free parameters to a reference trace")
    sp.add_argument("config", nargs="?")
    sp.add_argument("reference")
    sp.add_argument("--free", required=True, help="comma-separated parameter names")
    sp.add_argument("--bounds", action="append", metavar="NAME=LO:HI")
    sp.add_argument("--region", choices=[r.value for r in Region], default="full")
    sp.add_argument("--budget", type=int, default=200)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_fit)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationError as exc:
        print(f"numerical failure at t={exc.t:.9g} s: {exc.cause}", file=sys.stderr)
        return EXIT_NUMERIC
    except TunnelmemError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (OSError, ValueError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
