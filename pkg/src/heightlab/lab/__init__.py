"""Experiment harness: config parsing, seeded sampling, scans, calibration,
report writers, and the command-line interface."""

from .config import (ExperimentConfig, config_from_dict, default_config_dict,
                     load_config)
from .expressions import parse_expression
from .runs import (Calibration, DivisorReport, HIReport, MorphismChecksReport,
                   ScanReport, TableReport, calibrate, calibration_for,
                   fiber_deltas, load_calibration, run_convergence_tables,
                   run_divisor_report, run_height_inequality,
                   run_morphism_checks, scan_family, write_csv_rows,
                   write_json_report)
from .sampling import (PRNG_ID, SplitMix64, sample_fiber, sample_parameter,
                       sample_proj_point)

__all__ = [
    "Calibration", "DivisorReport", "ExperimentConfig", "HIReport",
    "MorphismChecksReport", "PRNG_ID", "ScanReport", "SplitMix64",
    "TableReport", "calibrate", "calibration_for", "config_from_dict",
    "default_config_dict", "fiber_deltas", "load_calibration", "load_config",
    "parse_expression", "run_convergence_tables", "run_divisor_report",
    "run_height_inequality", "run_morphism_checks", "sample_fiber",
    "sample_parameter", "sample_proj_point", "scan_family", "write_csv_rows",
    "write_json_report",
]
