"""Command-line front end: code tables, exports, decoding, sweeps, thresholds.

Every subcommand prints its resolved configuration before doing work, and
all outputs (CSV, JSON sidecars, alist files) are deterministic functions
of that configuration.  Exit codes: 0 success, 1 runtime failure, 2 usage
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import sim
from .construction import BUILTIN_NAMES, builtin_base, builtin_code, _LP_REGISTRY
from .decoder import SCHEDULES, DecoderConfig
from .gf2 import write_alist
from .gkp import ChannelConfig, p_of_sigma

DEFAULTS = {
    "analog": True,
    "schedule": "sequential",
    "beta": 0.75,
    "max_iters": 100,
    "seed": 0,
    "min_errors": 100,
    "max_trials": 1_000_000,
    "batch_size": sim.DEFAULT_BATCH_SIZE,
}


class UsageError(Exception):
    pass


def parse_sigma_grid(text: str) -> list[float]:
    """Parse 'start:stop:step' (endpoints inclusive within half a step) or a
    comma-separated list of values."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, step = (float(p) for p in parts)
            if step <= 0 or stop < start:
                raise ValueError
            vals = []
            i = 0
            v = start
            while v <= stop + step / 2:
                vals.append(round(v, 12))
                i += 1
                v = start + i * step
            return vals
        vals = [float(t) for t in text.split(",") if t.strip()]
        if not vals:
            raise ValueError
        return vals
    except ValueError:
        raise UsageError(f"malformed sigma grid {text!r}") from None


def _resolve(args: argparse.Namespace, config_keys: list[str]) -> dict:
    """Merge CLI flags over an optional --config JSON document over defaults."""
    file_cfg = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(config_keys) - {"code", "sigmas", "out"}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key in config_keys:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            resolved[key] = cli_val
        elif key in file_cfg:
            resolved[key] = file_cfg[key]
        else:
            resolved[key] = DEFAULTS[key]
    for key in ("code", "sigmas", "out"):
        if getattr(args, key, None) is not None:
            resolved[key] = getattr(args, key)
        elif key in file_cfg:
            resolved[key] = file_cfg[key]
    return resolved


def _check_code_name(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise UsageError(
            f"unknown code {name!r}; available: {', '.join(BUILTIN_NAMES)}"
        )
    return name


def _print_config(kind: str, cfg: dict) -> None:
    print(f"{kind} config: {json.dumps(cfg, sort_keys=True)}", flush=True)


def cmd_codes(args) -> int:
    _print_config("codes", {})
    header = f"{'name':<12}{'n':>6}{'k':>5}{'rate':>8}{'L':>5}{'girth':>7}{'d<=':>5}"
    print(header)
    for name in BUILTIN_NAMES:
        code = builtin_code(name)
        lift_size = _LP_REGISTRY[name][1].lift_size if name in _LP_REGISTRY else "-"
        print(
            f"{name:<12}{code.n:>6}{code.k:>5}{code.rate:>8.3f}"
            f"{lift_size:>5}{int(code.girth):>7}{code.distance_bound:>5}"
        )
    return 0


def cmd_export(args) -> int:
    name = _check_code_name(args.code)
    out_dir = args.out or "."
    _print_config("export", {"code": name, "out": out_dir})
    os.makedirs(out_dir, exist_ok=True)
    code = builtin_code(name)
    paths = []
    for suffix, mat in (("hx", code.hx), ("hz", code.hz)):
        path = os.path.join(out_dir, f"{name}_{suffix}.alist")
        write_alist(mat, path)
        paths.append(path)
    if name in _LP_REGISTRY:
        path = os.path.join(out_dir, f"{name}_base.txt")
        with open(path, "w") as fh:
            fh.write(builtin_base(name).to_text())
        paths.append(path)
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_decode(args) -> int:
    name = _check_code_name(args.code)
    cfg = _resolve(args, ["analog", "schedule", "beta", "max_iters", "seed"])
    cfg["code"] = name
    cfg["sigma"] = args.sigma
    _print_config("decode", cfg)
    code = builtin_code(name)
    channel = ChannelConfig(sigma=args.sigma, seed=cfg["seed"])
    dcfg = DecoderConfig(
        beta=cfg["beta"], max_iters=cfg["max_iters"], schedule=cfg["schedule"]
    )
    rng = np.random.default_rng([cfg["seed"], 0, 0])
    outcome = sim.run_trial(code, channel, dcfg, cfg["analog"], rng)
    print(f"x: {outcome.x_class} ({outcome.iterations_x} iterations)")
    print(f"z: {outcome.z_class} ({outcome.iterations_z} iterations)")
    print(f"logical error: {'yes' if outcome.is_logical_error else 'no'}")
    return 0


def _sweep_from_config(cfg: dict, code_name: str, sigmas, verbose=True):
    code = builtin_code(code_name)
    dcfg = DecoderConfig(
        beta=cfg["beta"], max_iters=cfg["max_iters"], schedule=cfg["schedule"]
    )
    stop = sim.StopRule(
        min_logical_errors=cfg["min_errors"], max_trials=cfg["max_trials"]
    )
    return sim.run_sweep(
        code,
        sigmas,
        stop=stop,
        dcfg=dcfg,
        use_analog=cfg["analog"],
        seed=cfg["seed"],
        batch_size=cfg["batch_size"],
        verbose=verbose,
    )


def cmd_sweep(args) -> int:
    cfg = _resolve(
        args,
        ["analog", "schedule", "beta", "max_iters", "seed", "min_errors",
         "max_trials", "batch_size"],
    )
    if "code" not in cfg:
        raise UsageError("--code is required")
    name = _check_code_name(cfg["code"])
    if "sigmas" not in cfg:
        raise UsageError("--sigmas is required")
    sigmas = cfg["sigmas"]
    if isinstance(sigmas, str):
        sigmas = parse_sigma_grid(sigmas)
    out = cfg.get("out") or f"{name}_sweep.csv"
    cfg_echo = dict(cfg, code=name, sigmas=sigmas, out=out)
    _print_config("sweep", cfg_echo)
    if args.workers:
        sim.set_workers(args.workers)
    result = _sweep_from_config(cfg, name, sigmas)
    sidecar = sim.write_sweep(result, out)
    print(f"wrote {out}")
    print(f"wrote {sidecar}")
    return 0


def cmd_threshold(args) -> int:
    cfg = _resolve(
        args,
        ["analog", "schedule", "beta", "max_iters", "seed", "min_errors",
         "max_trials", "batch_size"],
    )
    names = [_check_code_name(c) for c in args.codes]
    if len(names) < 2:
        raise UsageError("threshold needs at least two codes")
    sigmas = parse_sigma_grid(args.sigmas)
    cfg_echo = dict(cfg, codes=names, sigmas=sigmas)
    _print_config("threshold", cfg_echo)
    if args.workers:
        sim.set_workers(args.workers)
    results = []
    for name in names:
        print(f"sweeping {name} ...", flush=True)
        result = _sweep_from_config(cfg, name, sigmas)
        results.append(result)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            path = os.path.join(args.out, f"{name}.csv")
            sim.write_sweep(result, path)
            print(f"wrote {path}")
    est = sim.estimate_threshold(results)
    print(f"codes: {est.small_code} vs {est.large_code}")
    if est.crossing is None:
        print(f"no crossing: {est.message}")
    else:
        lo, hi = est.bracket
        print(f"crossing: sigma = {est.crossing:.4f} (bracket [{lo:.4g}, {hi:.4g}])")
        print(f"confident: {'yes' if est.confident else 'no'} ({est.message})")
    return 0


def cmd_bound(args) -> int:
    _print_config("bound", {"rate": args.rate})
    if not (0.0 < args.rate < 1.0):
        raise UsageError(f"rate must lie in (0, 1), got {args.rate}")
    sigma = sim.css_hamming_sigma(args.rate)
    print(f"rate {args.rate}: sigma = {sigma:.4f}, p = {p_of_sigma(sigma):.4f}")
    return 0


def _add_decoder_flags(p: argparse.ArgumentParser) -> None:
    analog = p.add_mutually_exclusive_group()
    analog.add_argument(
        "--analog", dest="analog", action="store_true", default=None,
        help="use per-qubit analog LLRs (default)",
    )
    analog.add_argument(
        "--no-analog", dest="analog", action="store_false", default=None,
        help="ignore analog information (uniform LLR)",
    )
    p.add_argument("--schedule", choices=SCHEDULES, default=None)
    p.add_argument("--beta", type=float, default=None, help="min-sum normalization")
    p.add_argument("--max-iters", type=int, default=None, dest="max_iters")
    p.add_argument("--seed", type=int, default=None)


def _add_stop_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--min-errors", type=int, default=None, dest="min_errors",
                   help="stop a sigma point after this many logical errors")
    p.add_argument("--max-trials", type=int, default=None, dest="max_trials")
    p.add_argument("--batch-size", type=int, default=None, dest="batch_size")
    p.add_argument("--workers", type=int, default=None,
                   help="worker threads (results are worker-count independent)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gkpldpc",
        description="GKP + lifted-product QLDPC Monte Carlo simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("codes", help="list builtin codes and their parameters")
    p.set_defaults(func=cmd_codes)

    p = sub.add_parser("export", help="write Hx/Hz alist files and the base matrix")
    p.add_argument("--code", required=True)
    p.add_argument("--out", default=None, help="output directory")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("decode", help="run a single sampled trial")
    p.add_argument("--code", required=True)
    p.add_argument("--sigma", type=float, required=True)
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("sweep", help="Monte Carlo sweep over a sigma grid")
    p.add_argument("--code", default=None)
    p.add_argument("--sigmas", default=None, help="start:stop:step or comma list")
    p.add_argument("--config", default=None, help="JSON config document")
    p.add_argument("--out", default=None, help="output CSV path")
    _add_decoder_flags(p)
    _add_stop_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("threshold", help="sweep several codes and locate the crossing")
    p.add_argument("--codes", nargs="+", required=True)
    p.add_argument("--sigmas", required=True)
    p.add_argument("--out", default=None, help="directory for per-code CSVs")
    _add_decoder_flags(p)
    _add_stop_flags(p)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("bound", help="CSS Hamming bound: sigma and p at a given rate")
    p.add_argument("--rate", type=float, required=True)
    p.set_defaults(func=cmd_bound)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
