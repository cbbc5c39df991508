"""Command-line orchestration of the full pipeline."""

from .config import PipelineConfig, RunManifest
from .main import main
from .stages import stage_backtest, stage_forecast, stage_ingest, stage_report, stage_select

__all__ = [
    "PipelineConfig",
    "RunManifest",
    "main",
    "stage_ingest",
    "stage_select",
    "stage_forecast",
    "stage_backtest",
    "stage_report",
]
