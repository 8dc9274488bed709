"""Command-line interface: thresholds, sweeps and Fock-space states.

Single results are printed as JSON with sorted keys, sweeps as CSV; every
float is written with 17 significant digits.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .channel import DeviceParams, Regime, fiber, propagate_covariance, thermal_occupation
from .entanglement import degradation_length, estimate_value, tmsv_entanglement
from .errors import NoSolutionError, TmsvError
from .fock import FockDensityMatrix, output_density
from .gaussian import SqueezeSpec, tmsv_covariance
from .separability import excess_gain, gain_boundary, max_length, nth_threshold, simon_criterion

DEFAULT_MAX_NMAX = 64


def format_float(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps(obj) -> str:
    """JSON with sorted keys and 17-digit floats; non-finite floats become ``null``."""
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {dumps(obj[k])}" for k in sorted(obj))
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return "null"
        text = format(x, ".17g")
        if not any(ch in text for ch in ".en"):
            text += ".0"
        return text
    return json.dumps(obj)


class UsageError(Exception):
    pass


def _squeeze_from_args(args) -> SqueezeSpec:
    given = [name for name in ("zeta", "q", "photons") if getattr(args, name, None) is not None]
    if len(given) != 1:
        raise UsageError("give exactly one of --zeta, --q, --photons")
    if args.zeta is not None:
        return SqueezeSpec.from_zeta(args.zeta)
    if args.q is not None:
        return SqueezeSpec.from_q(args.q)
    return SqueezeSpec.from_mean_photons(args.photons)


def _nth_from_args(args, default=0.0) -> float:
    if args.nth is not None and args.hw_over_kt is not None:
        raise UsageError("give at most one of --nth, --hw-over-kt")
    if args.hw_over_kt is not None:
        return thermal_occupation(args.hw_over_kt)
    return default if args.nth is None else args.nth


def _add_squeeze_flags(p):
    g = p.add_argument_group("squeezing (exactly one)")
    g.add_argument("--zeta", type=float, help="squeeze parameter zeta >= 0")
    g.add_argument("--q", type=float, help="q = tanh(zeta)")
    g.add_argument("--photons", type=float, help="mean photon number per mode")


def _add_thermal_flags(p):
    p.add_argument("--nth", type=float, help="thermal occupation of the devices")
    p.add_argument("--hw-over-kt", type=float, help="hbar*omega/(k_B T); converted to n_th by the Bose factor")


# ---------------------------------------------------------------- threshold


def cmd_threshold(args) -> dict:
    modes = [args.max_length, args.gain, args.nth_threshold]
    if sum(bool(m) for m in modes) != 1:
        raise UsageError("choose exactly one of --max-length, --gain, --nth-threshold")
    spec = _squeeze_from_args(args)
    record = {"inputs": {"zeta": spec.zeta, "q": spec.q, "mean_photons": spec.mean_photons}}

    if args.max_length:
        n_th = _nth_from_args(args, default=None)
        if n_th is None:
            raise UsageError("--max-length needs --nth or --hw-over-kt")
        value = max_length(spec, n_th, args.la)
        record.update(kind="max_length", value=value)
        record["inputs"].update(n_th=n_th, l_A=args.la)
        if math.isinf(value):
            record["diverges"] = True
            record["message"] = "zero-temperature fibers never make an entangled input separable"
    elif args.gain:
        value = gain_boundary(spec, args.r)
        record.update(kind="gain_boundary", value=value, excess_gain=value - 1.0)
        record["inputs"]["R"] = args.r
        if args.r == 0.0:
            record["tanh_zeta"] = excess_gain(spec)
    else:
        regime = Regime.parse(args.regime)
        value = nth_threshold(spec, args.t, args.r, regime)
        record.update(kind="nth_threshold", value=value)
        record["inputs"].update(T=args.t, R=args.r, sigma=int(regime))
        if math.isinf(value):
            record["diverges"] = True
            record["message"] = "device adds no noise; the state stays inseparable at any temperature"
    return record


# ---------------------------------------------------------------- sweep

SWEEP_PARAMS = ("length", "gain", "n_th", "squeezing")


def _sweep_row(param: str, value: float, args, warn) -> list:
    n_th = _nth_from_args(args)
    if param == "squeezing":
        unit = args.squeeze_unit
        spec = {"zeta": SqueezeSpec.from_zeta, "q": SqueezeSpec.from_q, "photons": SqueezeSpec.from_mean_photons}[unit](value)
    else:
        spec = _squeeze_from_args(args)
    if param == "n_th":
        n_th = value

    if param == "gain":
        T = math.sqrt(value)
        dev = DeviceParams(T=T, R=0.0, sigma=Regime.AMPLIFYING, n_th=n_th)
    else:
        length = value if param == "length" else args.length
        dev = fiber(length, args.la, n_th)

    verdict = simon_criterion(propagate_covariance(tmsv_covariance(spec), dev, dev))
    row = [value, verdict.margin, verdict.verdict()]

    if dev.sigma is Regime.ABSORBING and n_th == 0.0:
        est = estimate_value(spec.q, dev.T, dev.T)
        initial = tmsv_entanglement(spec.q)
        ratio = est / initial if initial > 0.0 else math.nan
    else:
        warn("entanglement estimate needs zero-temperature absorbing fibers; emitting nan")
        est = ratio = math.nan
    row += [est, ratio]

    if param == "squeezing":
        try:
            row.append(degradation_length(spec, args.la))
        except NoSolutionError as exc:
            warn(f"{param}={format_float(value)}: {exc}; emitting nan")
            row.append(math.nan)
    return row


def cmd_sweep(args, out) -> None:
    if args.param not in SWEEP_PARAMS:
        raise UsageError(f"--param must be one of {', '.join(SWEEP_PARAMS)}")
    if not args.start < args.stop:
        raise UsageError("--start must be smaller than --stop")
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    if args.param != "squeezing":
        _squeeze_from_args(args)

    values = np.linspace(args.start, args.stop, args.steps)
    seen = set()

    def warn(msg):
        if msg not in seen:
            seen.add(msg)
            print(f"warning: {msg}", file=sys.stderr)

    def compute(v):
        return _sweep_row(args.param, float(v), args, warn)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(compute, values))  # map preserves sweep order
    else:
        rows = [compute(v) for v in values]

    name = {"squeezing": args.squeeze_unit, "gain": "gain_t2"}.get(args.param, args.param)
    header = [name, "simon_margin", "verdict", "estimate", "estimate_ratio"]
    if args.param == "squeezing":
        header.append("degradation_length")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])


# ---------------------------------------------------------------- state


def _max_nmax() -> int:
    raw = os.environ.get("TMSV_MAX_NMAX")
    return int(raw) if raw else DEFAULT_MAX_NMAX


def cmd_state(args) -> dict:
    limit = _max_nmax()
    if args.nmax > limit:
        raise UsageError(f"--nmax {args.nmax} exceeds the resource limit {limit} (set TMSV_MAX_NMAX to raise it)")
    if args.nmax < 0:
        raise UsageError("--nmax must be >= 0")
    spec = SqueezeSpec.from_q(args.q)
    T1, T2 = complex(args.t1), complex(args.t2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        rho = output_density(spec, T1, T2, n_max=args.nmax)
    doc = rho.to_json_dict()
    doc["trace"] = rho.trace()
    doc["tail_bound"] = rho.tail_bound
    doc["inputs"] = {"q": spec.q, "t1": [T1.real, T1.imag], "t2": [T2.real, T2.imag]}
    if args.witness:
        from .oracle import ppt_min_eigenvalue

        doc["ppt_min_eigenvalue"] = ppt_min_eigenvalue(rho)
    return doc


def parse_state(text: str) -> FockDensityMatrix:
    """Rebuild the density matrix from ``state`` output."""
    doc = json.loads(text)
    return FockDensityMatrix.from_json_dict(doc, doc.get("tail_bound", 0.0))


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> dict:
    from .verify import run_checks

    checks = run_checks(quick=args.quick)
    return {"checks": checks, "passed": all(c["passed"] for c in checks)}


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tmsvchannel",
        description="Two-mode squeezed vacuum through absorbing and amplifying fibers.",
    )
    sub = parser.add_subparsers(dest="command", metavar="{threshold,sweep,state}")
    sub.required = True

    p = sub.add_parser("threshold", help="separability thresholds as JSON")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--max-length", action="store_true", help="longest inseparable fiber pair (R = 0)")
    mode.add_argument("--gain", action="store_true", help="|T|^2 separability boundary of zero-temperature amplifiers")
    mode.add_argument("--nth-threshold", action="store_true", help="thermal occupation at which separability sets in")
    _add_squeeze_flags(p)
    _add_thermal_flags(p)
    p.add_argument("--la", type=float, default=1.0, help="absorption length l_A (default 1)")
    p.add_argument("--t", type=float, default=1.0, help="|T| for --nth-threshold")
    p.add_argument("--r", type=float, default=0.0, help="|R| of both devices")
    p.add_argument("--regime", default="absorbing", choices=["absorbing", "amplifying"])

    p = sub.add_parser("sweep", help="CSV parameter sweep")
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    _add_squeeze_flags(p)
    _add_thermal_flags(p)
    p.add_argument("--squeeze-unit", default="zeta", choices=["zeta", "q", "photons"],
                   help="meaning of the swept value for --param squeezing")
    p.add_argument("--la", type=float, default=1.0, help="absorption length l_A")
    p.add_argument("--length", type=float, default=0.0, help="fiber length when not swept")
    p.add_argument("--jobs", type=int, default=1, help="worker threads")
    p.add_argument("-o", "--output", help="write CSV here instead of stdout")

    p = sub.add_parser("state", help="Fock-space output density matrix as JSON")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--t1", type=complex, required=True, help="transmission of fiber 1 (complex allowed, e.g. 0.9+0.1j)")
    p.add_argument("--t2", type=complex, required=True)
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--witness", action="store_true", help="add the partial-transpose minimum eigenvalue")

    p = sub.add_parser("verify", help="cross-check closed forms against the oracles")
    p.add_argument("--quick", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            if args.output:
                with open(args.output, "w", newline="", encoding="utf-8") as fh:
                    cmd_sweep(args, fh)
            else:
                cmd_sweep(args, sys.stdout)
            return 0
        handler = {"threshold": cmd_threshold, "state": cmd_state, "verify": cmd_verify}[args.command]
        record = handler(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (TmsvError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(dumps(record) + "\n")
    if args.command == "verify" and not record["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
