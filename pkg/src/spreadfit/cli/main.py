"""Command-line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from ..errors import SpreadfitError
from .config import PipelineConfig, RunManifest
from .stages import stage_backtest, stage_forecast, stage_ingest, stage_report, stage_select

logger = logging.getLogger("spreadfit")

STAGES = {
    "ingest": stage_ingest,
    "select": stage_select,
    "forecast": stage_forecast,
    "backtest": stage_backtest,
    "report": stage_report,
}
STAGE_ORDER = ["ingest", "select", "forecast", "backtest", "report"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spreadfit",
        description="Spread density models, rolling forecasts and battery arbitrage backtests",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", type=Path, help="pipeline config JSON")
        p.add_argument("--manifest", type=Path, help="dataset manifest path")
        p.add_argument("--output-dir", type=Path, help="artifact directory")
        p.add_argument("--seed", type=int, help="run seed")
        p.add_argument("--jobs", type=int, help="parallel workers (by spread)")
        p.add_argument(
            "--families",
            type=str,
            help="comma-separated family whitelist (e.g. NORMAL,JSU,ST5)",
        )
        p.add_argument("--window", type=int, help="rolling window length (usable rows)")
        p.add_argument("--horizon", type=int, help="rolling forecast horizon")

    for name in STAGE_ORDER:
        p = sub.add_parser(name, help=f"run the {name} stage")
        add_common(p)
    p = sub.add_parser("run", help="run every stage in order")
    add_common(p)
    return parser


def _config_from_args(args: argparse.Namespace) -> PipelineConfig:
    overrides = {}
    if args.manifest is not None:
        overrides["manifest"] = str(args.manifest)
    if args.output_dir is not None:
        overrides["output_dir"] = str(args.output_dir)
    for key in ("seed", "jobs", "window", "horizon"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.families:
        overrides["families"] = [f.strip() for f in args.families.split(",") if f.strip()]
    if args.config is not None:
        return PipelineConfig.from_file(args.config, overrides)
    if "manifest" not in overrides or "output_dir" not in overrides:
        raise SpreadfitError("either --config or both --manifest and --output-dir are required")
    return PipelineConfig.from_dict(overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config_from_args(args)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        rm = RunManifest(cfg.output_dir)
        stages = STAGE_ORDER if args.command == "run" else [args.command]
        for name in stages:
            logger.info("stage %s starting", name)
            outputs = STAGES[name](cfg, rm)
            logger.info("stage %s done: %s", name, ", ".join(str(p) for p in outputs.values()))
        return 0
    except SpreadfitError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
