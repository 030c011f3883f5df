"""Two-stage recourse integrands: evaluation, envelopes and projections."""
from .envelope import (BreakpointPath, GeometricConditionError, GeometricReport,
                       IntegrandSpec, SensitivityBounds, breakpoint_residuals, breakpoints,
                       c1_jump, check_geometric_condition, fixture_spec, project_k,
                       project_k_grad, project_k_hess, project_pair, sensitivity_upper_bounds)
from .evaluate import (BatchRecourse, RecourseInfeasibleError, RecourseUnboundedError,
                       eval_recourse_dual, eval_recourse_lp, second_stage_lp)
from .problem import (FIXTURES, TwoStageProblem, dumps_problem, load_fixture, load_problem,
                      loads_problem, save_problem)

__all__ = [
    "TwoStageProblem", "FIXTURES", "load_fixture", "load_problem", "loads_problem",
    "save_problem", "dumps_problem", "eval_recourse_lp", "eval_recourse_dual",
    "second_stage_lp", "BatchRecourse", "RecourseInfeasibleError", "RecourseUnboundedError",
    "IntegrandSpec", "BreakpointPath", "breakpoints", "breakpoint_residuals", "project_k",
    "project_k_grad", "project_k_hess", "project_pair", "c1_jump", "GeometricReport",
    "GeometricConditionError", "check_geometric_condition", "SensitivityBounds",
    "sensitivity_upper_bounds", "fixture_spec",
]
