"""Cyber layer of protection analysis.

Computes how reliable a safety instrumented system must be (PFD bound,
risk reduction factor) when cyberattacks can defeat the control system,
the safety system, or both; maps the feasible security design space;
quantifies how far classical LOPA falls short; and iterates safety
sizing against security assessment to a fixed point.
"""

from .model import (
    AttackerSource,
    BpcsParams,
    ClopaCoefficients,
    ClopaError,
    DesignPoint,
    InitiatingEvent,
    LopaScenario,
    Probability,
    ProbabilityRangeError,
    Rate,
    RateRangeError,
    SecurityPosture,
    ValidationIssue,
    validate_scenario,
)
from .attack_tree import (
    AttackNode,
    AttackTree,
    BasicEvent,
    aggregate_attack_rate,
    eval_tree,
    eval_tree_by_enumeration,
    gate_and,
    gate_or,
    leaf,
    referenced_event_ids,
)
from .engine import (
    BoundResult,
    CyberFailureProbs,
    DegenerateDenominatorError,
    InfeasiblePointError,
    bound_at,
    classical_lopa,
    clopa_coefficients,
    cyber_failure_probs,
    expected_hazard_rate,
    joint_sis_bpcs_failure,
    lopa_coefficients,
    min_rrf_error,
    rrf_error,
    sis_pfd_bound,
    sis_pfd_bound_general,
)
from .design_space import (
    CurveSample,
    DegenerateCoefficientsError,
    RegionLimits,
    RrfBelowMinimumError,
    boundary_pabs,
    contour_pabs,
    feasibility_slack,
    in_design_region,
    region_limits,
    rrf_gradient,
    sample_boundary,
    sample_contour,
)
from .codesign import (
    CodesignTrace,
    DesignResponse,
    IterationRecord,
    OracleFailure,
    ScriptedOracles,
    ScriptedResponse,
    SecurityAssessment,
    initial_design_point,
    run_codesign,
)
from .mc_oracle import (
    SimConfig,
    SimResult,
    enumerate_cyber_events,
    enumerate_joint_failure,
    simulate_hazards,
)
from .scenario_io import (
    ParseError,
    ScenarioDocument,
    ScenarioValidationError,
    SchemaError,
    build_report,
    contour_csv,
    curve_csv,
    fixture_path,
    load_attack_tree,
    load_oracle_script,
    load_scenario,
    parse_attack_tree,
    parse_oracle_script,
    parse_scenario,
    render_scenario_json,
)

__version__ = "0.1.0"

__all__ = [
    "AttackNode",
    "AttackTree",
    "AttackerSource",
    "BasicEvent",
    "BoundResult",
    "BpcsParams",
    "ClopaCoefficients",
    "ClopaError",
    "CodesignTrace",
    "CurveSample",
    "CyberFailureProbs",
    "DegenerateCoefficientsError",
    "DegenerateDenominatorError",
    "DesignPoint",
    "DesignResponse",
    "InfeasiblePointError",
    "InitiatingEvent",
    "IterationRecord",
    "LopaScenario",
    "OracleFailure",
    "ParseError",
    "Probability",
    "ProbabilityRangeError",
    "Rate",
    "RateRangeError",
    "RegionLimits",
    "RrfBelowMinimumError",
    "ScenarioDocument",
    "ScenarioValidationError",
    "SchemaError",
    "ScriptedOracles",
    "ScriptedResponse",
    "SecurityAssessment",
    "SecurityPosture",
    "SimConfig",
    "SimResult",
    "ValidationIssue",
    "aggregate_attack_rate",
    "bound_at",
    "boundary_pabs",
    "build_report",
    "classical_lopa",
    "clopa_coefficients",
    "contour_csv",
    "contour_pabs",
    "curve_csv",
    "cyber_failure_probs",
    "enumerate_cyber_events",
    "enumerate_joint_failure",
    "eval_tree",
    "eval_tree_by_enumeration",
    "expected_hazard_rate",
    "feasibility_slack",
    "fixture_path",
    "gate_and",
    "gate_or",
    "in_design_region",
    "initial_design_point",
    "joint_sis_bpcs_failure",
    "leaf",
    "load_attack_tree",
    "load_oracle_script",
    "load_scenario",
    "lopa_coefficients",
    "min_rrf_error",
    "parse_attack_tree",
    "parse_oracle_script",
    "parse_scenario",
    "referenced_event_ids",
    "region_limits",
    "render_scenario_json",
    "rrf_error",
    "rrf_gradient",
    "run_codesign",
    "sample_boundary",
    "sample_contour",
    "simulate_hazards",
    "sis_pfd_bound",
    "sis_pfd_bound_general",
    "validate_scenario",
]
