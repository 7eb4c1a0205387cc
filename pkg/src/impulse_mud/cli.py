"""Command-line front end.

Sweeps read a flat ``key=value`` config (``#`` starts a comment), apply
overrides given on the command line, and write the BER CSV. Exit status:
0 on success, 1 for configuration errors, 2 for runtime failures.
"""
from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import capacity as cap
from .channel import SystemParams
from .codes import AlistError, LinearCode, bundled_ldpc, emit_alist, load_alist, repetition_code
from .sim import DETECTORS, ConfigError, ExperimentConfig, StopRule, run_sweep, write_csv

log = logging.getLogger("impulse_mud")

RANGE_TOL = 1e-9


def parse_range(text: str, kind: Callable = float) -> tuple:
    """``start:step:stop`` (endpoints inclusive), a comma list, or a single value."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            start, step, stop = parts
            if step == 0 or (stop - start) * step < 0:
                raise ValueError
            count = int(math.floor((stop - start) / step + RANGE_TOL)) + 1
            values = [start + i * step for i in range(count)]
            values = [round(v, 9) for v in values]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
        if not values:
            raise ValueError
    except ValueError:
        raise ConfigError(f"cannot parse range {text!r}; use start:step:stop or a comma list") from None
    if kind is int:
        if any(v != int(v) for v in values):
            raise ConfigError(f"range {text!r} must contain integers")
        return tuple(int(v) for v in values)
    return tuple(values)


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"expected an integer, got {text!r}") from None


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _choice(options):
    def parse(text: str) -> str:
        value = text.strip().lower()
        if value not in options:
            raise ConfigError(f"{text!r} is not one of {', '.join(options)}")
        return value

    return parse


@dataclass(frozen=True)
class Key:
    parse: Callable
    default: str | None
    help: str


KEYS: dict[str, Key] = {
    "system.users": Key(_int, "1", "number of users K"),
    "system.chips_per_frame": Key(_int, "20", "chips per frame Nc"),
    "system.frames": Key(_int, None, "frames per symbol Nf (default 3; must equal n for alist codes)"),
    "system.amplitudes": Key(_float_list, "1", "per-user amplitudes; a single value applies to all"),
    "detector.kind": Key(_choice(DETECTORS), "fg3", "detector: " + ", ".join(DETECTORS)),
    "detector.iterations": Key(_int, "8", "message-passing iterations"),
    "code.kind": Key(_choice(("repetition", "alist", "bundled")), None,
                     "repetition (over Nf frames), alist (needs code.alist) or bundled (120,56) LDPC"),
    "code.alist": Key(str, None, "path to an alist parity-check file"),
    "sweep.ebn0_db": Key(parse_range, "0:2:10", "Eb/N0 grid in dB, start:step:stop or list"),
    "sweep.users": Key(lambda t: parse_range(t, int), None, "users grid (sweep-users)"),
    "sweep.iterations": Key(lambda t: parse_range(t, int), None, "iterations grid (sweep-iterations)"),
    "run.master_seed": Key(_int, "0", "64-bit master seed"),
    "run.min_errors": Key(_int, "100", "stop a point after this many bit errors"),
    "run.max_trials": Key(_int, "10000000", "stop a point after this many trials"),
    "run.threads": Key(_int, None, "worker processes, 0 = all cores (env IMPULSE_MUD_THREADS)"),
}


def keys_help() -> str:
    width = max(map(len, KEYS))
    lines = ["config keys (key=value, in --config files or as overrides):"]
    for name, key in KEYS.items():
        default = "" if key.default is None else f" [default: {key.default}]"
        lines.append(f"  {name:<{width}}  {key.help}{default}")
    return "\n".join(lines)


def read_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r} (see --help for accepted keys)")
        values[key] = value
    return values


def apply_overrides(values: dict[str, str], overrides) -> dict[str, str]:
    out = dict(values)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, value = (p.strip() for p in item.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r} (see --help for accepted keys)")
        out[key] = value
    return out


def _load_code(kind: str | None, path: str | None) -> LinearCode | None:
    if kind is None:
        kind = "alist" if path else "repetition"
    if kind == "repetition":
        return None
    if kind == "bundled":
        return bundled_ldpc()
    if not path:
        raise ConfigError("code.kind=alist needs code.alist=<path>")
    if not os.path.isfile(path):
        raise ConfigError(f"alist file not found: {path}")
    try:
        with open(path) as fh:
            return load_alist(fh.read(), name=os.path.splitext(os.path.basename(path))[0])
    except AlistError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def build_experiment(values: dict[str, str], subcommand: str) -> tuple[ExperimentConfig, int | None]:
    parsed = {name: key.parse(values.get(name, key.default)) for name, key in KEYS.items()
              if values.get(name, key.default) is not None}
    code = _load_code(parsed.get("code.kind"), parsed.get("code.alist"))
    frames = parsed.get("system.frames")
    if code is not None:
        if frames is not None and frames != code.n:
            raise ConfigError(f"system.frames={frames} but the code has length {code.n}")
        frames = code.n
    frames = 3 if frames is None else frames
    detector = parsed["detector.kind"]
    if code is None and detector == "cfg3":
        if frames < 2:
            raise ConfigError("cfg3 with repetition transmission needs system.frames >= 2")
        code = repetition_code(frames)
    users = parsed["system.users"]
    try:
        params = SystemParams(users, parsed["system.chips_per_frame"], frames, np.array(parsed["system.amplitudes"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    users_grid = iterations_grid = None
    if subcommand == "sweep-users":
        if "sweep.users" not in parsed:
            raise ConfigError("sweep-users needs sweep.users")
        users_grid = parsed["sweep.users"]
    elif subcommand == "sweep-iterations":
        if "sweep.iterations" not in parsed:
            raise ConfigError("sweep-iterations needs sweep.iterations")
        iterations_grid = parsed["sweep.iterations"]
    config = ExperimentConfig(
        params=params,
        detector=detector,
        code=code,
        ebn0_db_grid=parsed["sweep.ebn0_db"],
        users_grid=users_grid,
        iterations=parsed["detector.iterations"],
        iterations_grid=iterations_grid,
        stop_rule=StopRule(parsed["run.min_errors"], parsed["run.max_trials"]),
        master_seed=parsed["run.master_seed"],
    )
    return config, parsed.get("run.threads")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="impulse-mud", description="TH-IR multiuser detection simulator")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    blurbs = {
        "sweep-ebn0": "BER versus Eb/N0 (grid from sweep.ebn0_db)",
        "sweep-users": "BER versus number of users (grid from sweep.users)",
        "sweep-iterations": "BER versus iteration count (grid from sweep.iterations)",
    }
    for name, blurb in blurbs.items():
        p = sub.add_parser(name, help=blurb, description=blurb, epilog=keys_help(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("overrides", nargs="*", metavar="KEY=VALUE", help="config overrides")
        p.add_argument("-c", "--config", help="config file of key=value lines")
        p.add_argument("-s", "--set", action="append", default=[], metavar="KEY=VALUE",
                       help="config override (repeatable)")
        p.add_argument("-o", "--output", help="CSV output path (default: stdout)")
        p.add_argument("--no-timing", action="store_true",
                       help="write wall_time_s as 0 so reruns are byte-identical")

    p = sub.add_parser("capacity", help="SMUD capacity table",
                       description="Erasure probability and hard/soft/high-SNR capacities. "
                                   "snr_db is Es/N0 per pulse in dB (A^2/sigma^2 = 2 Es/N0).")
    p.add_argument("--nc", type=int, default=20, help="chips per frame [default: 20]")
    p.add_argument("--users", default="3", help="users grid, e.g. 3 or 1:1:11 [default: 3]")
    p.add_argument("--snr-db", default="0:2:20", help="Es/N0 grid in dB [default: 0:2:20]")
    p.add_argument("-o", "--output", help="CSV output path (default: stdout)")

    p = sub.add_parser("code-info", help="describe a code or emit it as alist",
                       description="Summarise a parity-check code; --emit-alist writes it in alist form.")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--alist", help="alist file to read")
    src.add_argument("--repetition", type=int, metavar="N", help="repetition code of length N")
    src.add_argument("--bundled", action="store_true", help="the bundled (120,56) LDPC code")
    p.add_argument("--emit-alist", action="store_true", help="print the code as alist instead")
    p.add_argument("-o", "--output", help="output path (default: stdout)")
    return parser


def _capacity_csv(nc: int, users, snrs) -> str:
    lines = ["nc,k_users,snr_db,e,c_hard,c_soft,c_high_snr"]
    for k in users:
        e = cap.erasure_probability(nc, k)
        high = cap.capacity_high_snr(nc, k)
        for snr_db in snrs:
            snr = 2.0 * 10 ** (snr_db / 10)
            mu = cap.q_function(math.sqrt(snr))
            row = [nc, k, f"{snr_db:g}", f"{e:.6g}", f"{cap.capacity_hard(mu, e):.6g}",
                   f"{cap.capacity_soft(e, snr):.6g}", f"{high:.6g}"]
            lines.append(",".join(map(str, row)))
    return "\n".join(lines) + "\n"


def _code_info(args) -> str:
    if args.repetition is not None:
        try:
            code = repetition_code(args.repetition)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    elif args.bundled:
        code = bundled_ldpc()
    else:
        code = _load_code("alist", args.alist)
    if args.emit_alist:
        return emit_alist(code)
    h = code.h
    row = [code.name or "code", code.n, code.k, h.shape[0], f"{code.rate:.6g}",
           int(h.sum(axis=0).max()), int(h.sum(axis=1).max())]
    return "code,n,k,m,rate,max_col_weight,max_row_weight\n" + ",".join(map(str, row)) + "\n"


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def parse_and_run(argv=None) -> int:
    parser = make_parser()
    try:
        # overrides may be interleaved with options, which argparse leaves over
        args, extra = parser.parse_known_args(argv)
        if extra and (not hasattr(args, "overrides") or any(e.startswith("-") or "=" not in e for e in extra)):
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as exc:
        return int(exc.code or 0)
    if extra:
        args.overrides = list(args.overrides) + extra
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "capacity":
            users = parse_range(args.users, int)
            snrs = parse_range(args.snr_db)
            if args.nc < 1 or any(u < 1 for u in users):
                raise ConfigError("--nc and --users must be positive")
            _emit(_capacity_csv(args.nc, users, snrs), args.output)
            return 0
        if args.command == "code-info":
            _emit(_code_info(args), args.output)
            return 0
        values = {}
        if args.config:
            if not os.path.isfile(args.config):
                raise ConfigError(f"config file not found: {args.config}")
            with open(args.config) as fh:
                values = read_config_text(fh.read(), args.config)
        values = apply_overrides(values, list(args.set) + list(args.overrides))
        config, threads = build_experiment(values, args.command)
    except ConfigError as exc:
        print(f"impulse-mud: config error: {exc}", file=sys.stderr)
        return 1
    try:
        records = run_sweep(
            config,
            threads=threads,
            progress=lambda r: log.info("K=%d iterations=%d ebn0_db=%g: %d errors / %d trials",
                                        r.K, r.iterations, r.ebn0_db, r.bit_errors, r.trials),
        )
        if args.no_timing:
            records = [replace(r, wall_time_s=0.0) for r in records]
        _emit(write_csv(records), args.output)
    except ConfigError as exc:
        print(f"impulse-mud: config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - reported as a runtime failure
        print(f"impulse-mud: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(parse_and_run())
