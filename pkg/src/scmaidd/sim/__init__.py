"""Monte Carlo harness: configuration, sweeps, complexity accounting and reports."""
from .config import ConfigError, SimConfig, Stopping, load_config, parse_config
from .frames import Frame, frame_rng, make_components, make_frame
from .sweep import ResultRow, ResultTable, ber_crossing, resolve_components, run_sweep
from .complexity import OpsReport, leading_mul, measure_ops, ops_report, predicted_ops
from .report import COLUMNS, emit_results

__all__ = ["ConfigError", "SimConfig", "Stopping", "load_config", "parse_config", "Frame", "frame_rng",
           "make_components", "make_frame", "ResultRow", "ResultTable", "ber_crossing", "resolve_components",
           "run_sweep", "OpsReport", "leading_mul", "measure_ops", "ops_report", "predicted_ops", "COLUMNS",
           "emit_results"]
