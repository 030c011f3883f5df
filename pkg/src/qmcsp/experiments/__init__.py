"""Production-planning experiments: model, SAA solvers, RMSE runs and reports."""
from .model import (ProductionModelSpec, demand_covariance, generate_model, interior_point,
                    with_factorization)
from .rates import RateFit, fit_rate
from .report import (CSV_COLUMNS, ReportPaths, RmseRecord, emit_report, nearest_rank,
                     quartiles, read_report_csv, summarize)
from .runner import (FACTORIZATIONS, ExperimentConfig, ExperimentResult, Reference,
                     first_kind_reference, fixed_decision, load_config, production_integrand,
                     run_experiment, run_first_kind, run_second_kind, second_kind_reference,
                     seed_for)
from .saa import SAAEstimator, SAAProgram, SAAResult, assemble_saa, solve_saa

__all__ = [
    "ProductionModelSpec", "demand_covariance", "generate_model", "interior_point",
    "with_factorization", "RateFit", "fit_rate", "CSV_COLUMNS", "ReportPaths", "RmseRecord",
    "emit_report", "nearest_rank", "quartiles", "read_report_csv", "summarize",
    "FACTORIZATIONS", "ExperimentConfig", "ExperimentResult", "Reference",
    "first_kind_reference", "fixed_decision", "load_config", "production_integrand",
    "run_experiment", "run_first_kind", "run_second_kind", "second_kind_reference",
    "seed_for", "SAAEstimator", "SAAProgram", "SAAResult", "assemble_saa", "solve_saa",
]
