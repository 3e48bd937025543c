"""Command-line entry point.

Every pipeline stage is a subcommand reading one YAML config; later
stages consume the artifacts earlier stages left in the output directory.
Exit codes: 0 success, 1 usage or configuration problem, 2 missing or
malformed data.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import yaml

from . import pipeline
from .config import config_from_dict
from .errors import ConfigError, LoadError

STAGES = ("simulate", "extrude", "detect", "track", "train", "predict", "eval")


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="antwatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in STAGES + ("serve",):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="pipeline YAML configuration")
        p.add_argument("--output-dir", help="override the configured output directory")
        p.add_argument("--seed", type=int, help="override the scenario RNG seed")
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="override any config value by dotted path, e.g. detection.min_height=40",
        )
        if name == "serve":
            p.add_argument("--host", default="127.0.0.1")
            p.add_argument("--port", type=int, default=8714)
    return parser


def _apply_override(data: dict, spec: str) -> None:
    if "=" not in spec:
        raise ConfigError(f"--set expects KEY=VALUE, got {spec!r}")
    dotted, raw = spec.split("=", 1)
    keys = dotted.split(".")
    target = data
    for key in keys[:-1]:
        node = target.setdefault(key, {})
        if not isinstance(node, dict):
            raise ConfigError(f"--set path {dotted!r} crosses the scalar {key!r}")
        target = node
    target[keys[-1]] = yaml.safe_load(raw)


def _load(args) -> "pipeline.PipelineConfig":
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a mapping")
    for override in args.set:
        _apply_override(data, override)
    config = config_from_dict(data)
    if args.output_dir:
        config = replace(config, output_dir=Path(args.output_dir))
    if args.seed is not None:
        config = replace(config, scenario=replace(config.scenario, rng_seed=args.seed))
    return config


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = _load(args)
        if args.command == "serve":
            import uvicorn

            from .service import create_app

            uvicorn.run(create_app(config.output_dir), host=args.host, port=args.port)
            return 0
        runner = getattr(pipeline, f"run_{args.command}")
        summary = runner(config)
    except ConfigError as exc:
        print(f"antwatch: config error: {exc}", file=sys.stderr)
        return 1
    except (LoadError, ValueError) as exc:
        print(f"antwatch: {exc}", file=sys.stderr)
        return 2
    print(json.dumps({"stage": args.command, **summary}, sort_keys=True))
    return 0
