"""Command-line entry point: ``grreduce <command> [options]``.

Exit codes: 0 pass, 1 verification failed, 2 configuration error,
3 degraded run (too many samples could not be reconstructed).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import GeometryError
from .reports import (
    ConfigError,
    RunConfig,
    census_report,
    delzant_report,
    delzant_samples,
    dumps,
    lagrangian_report,
    level_sample_csv,
    moment_report,
    parse_c,
    parse_pairs,
    samples_csv,
)

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_DEGRADED = 0, 1, 2, 3
DEGRADED_FRACTION = 0.1

# Per-command defaults that sit below the config file and CLI flags.
COMMAND_DEFAULTS = {"verify-moment": {"samples": 1000}}

_ALIASES = {"h": "fd_step", "fd-step": "fd_step"}
_INT_KEYS = {"n", "k", "samples", "seed"}
_FLOAT_KEYS = {"fd_step", "tau_pluck", "tau_solve", "tau_lag", "tau_open"}


def _coerce(key: str, value):
    key = _ALIASES.get(key, key).replace("-", "_")
    if key not in RunConfig.keys():
        raise ConfigError(f"unknown config key {key!r}")
    try:
        if key in _INT_KEYS:
            if isinstance(value, float) and not value.is_integer():
                raise ValueError(value)
            return key, int(value)
        if key in _FLOAT_KEYS:
            return key, float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r}") from exc
    if key == "c":
        return key, [float(x) for x in value] if isinstance(value, list) else parse_c(value)
    return key, parse_pairs(value)


def load_config_file(path) -> dict:
    """Read a JSON object or ``key = value`` lines ('#' starts a comment)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            raw = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad JSON config: {exc}") from exc
        if isinstance(raw.get("tolerances"), dict):
            raw.update(raw.pop("tolerances"))
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            raw[key] = value
    return dict(_coerce(k, v) for k, v in raw.items())


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, then the config file, then explicit flags."""
    merged = dict(COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        merged.update(load_config_file(args.config))
    for key in ("n", "k", "samples", "seed", "fd_step"):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if args.c is not None:
        merged["c"] = parse_c(args.c)
    if args.pairs is not None:
        merged["pairs"] = parse_pairs(args.pairs)
    try:
        return RunConfig(**merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _write(text: str, path) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _emit(report: dict, args) -> None:
    _write(dumps(report), args.out)


def run_verify_moment(cfg: RunConfig, args) -> int:
    cfg.validate(need_descriptor=False)
    report = moment_report(cfg, corrupt=args.inject_corrupt)
    _emit(report, args)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def run_delzant(cfg: RunConfig, args) -> int:
    cfg.validate(need_descriptor=False)
    samples = delzant_samples(cfg)
    report = delzant_report(cfg, samples)
    if args.format == "csv":
        _write(samples_csv(samples), args.out)
        summary = dumps(report)
        if args.summary:
            Path(args.summary).write_text(summary)
        else:
            sys.stderr.write(summary)
    else:
        _emit(report, args)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def run_verify_lagrangian(cfg: RunConfig, args) -> int:
    cfg.validate()
    report = lagrangian_report(cfg, negative_control=args.negative_control, jobs=args.jobs)
    _emit(report, args)
    if len(report["failures"]) > DEGRADED_FRACTION * cfg.samples:
        return EXIT_DEGRADED
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def run_count_types(cfg: RunConfig, args) -> int:
    if cfg.n < 2:
        raise ConfigError("n must be at least 2")
    report = census_report(cfg)
    _emit(report, args)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


def run_level_sample(cfg: RunConfig, args) -> int:
    cfg.validate()
    try:
        text = level_sample_csv(cfg, real=args.real_base)
    except GeometryError as exc:
        sys.stderr.write(f"level-sample: {type(exc).__name__}: {exc}\n")
        return EXIT_DEGRADED
    _write(text, args.out)
    return EXIT_PASS


COMMANDS = {
    "verify-moment": run_verify_moment,
    "delzant": run_delzant,
    "verify-lagrangian": run_verify_lagrangian,
    "count-types": run_count_types,
    "level-sample": run_level_sample,
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON object or key=value file; flags override it")
    p.add_argument("--n", type=int, help="ambient dimension of CP^n (default 3)")
    p.add_argument("--k", type=int, help="number of reduced moments (default 2)")
    p.add_argument("--c", help="comma-separated moment values, e.g. 0.2,0.3")
    p.add_argument("--pairs", help='conjugate index pairs, e.g. "0-1,2-3"')
    p.add_argument("--samples", type=int, help="number of samples (default 100)")
    p.add_argument("--seed", type=int, help="64-bit seed (default 42)")
    p.add_argument("--fd-step", dest="fd_step", type=float, help="finite-difference step h (default 1e-4)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grreduce", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-moment", help="cross-check the moment maps on random lines")
    _common(p)
    p.add_argument("--inject-corrupt", action="store_true", help=argparse.SUPPRESS)

    p = sub.add_parser("delzant", help="sample the image of a fiber under the reduced moment map")
    _common(p)
    p.add_argument("--summary", help="where to write the JSON hull summary with --format csv")

    p = sub.add_parser("verify-lagrangian", help="finite-difference isotropy check of a cycle")
    _common(p)
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.add_argument("--negative-control", action="store_true",
                   help="swap in a complex direction pair; the check must then fail")

    p = sub.add_parser("count-types", help="list the cycle types (k, m) for a given n")
    _common(p)

    p = sub.add_parser("level-sample", help="dump Plücker vectors of a moment level set as CSV")
    _common(p)
    p.add_argument("--real-base", action="store_true", help="draw real base points")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        sys.stderr.write(f"grreduce: config error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
