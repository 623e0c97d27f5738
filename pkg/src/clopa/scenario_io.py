"""File formats: scenario sheets, attack trees, oracle scripts, reports.

All documents are JSON with a mandatory integer ``format_version`` (1).
Scenario sheets carry named per-layer PFD columns, which are folded into
per-row products on load; unknown keys are rejected so typos fail loudly
instead of silently dropping protection credit. Curve exports are
comma-delimited with LF line endings and numbers rendered at 12
significant digits.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib.resources import files
from pathlib import Path
from typing import Any, Iterable, Sequence

from .codesign import ScriptedResponse
from .design_space import CurveSample, feasibility_slack, region_limits
from .engine import (
    classical_lopa,
    clopa_coefficients,
    expected_hazard_rate,
    min_rrf_error,
    rrf_error,
    sis_pfd_bound,
)
from .model import (
    AttackerSource,
    BpcsParams,
    ClopaError,
    InitiatingEvent,
    LopaScenario,
    ProbabilityRangeError,
    RateRangeError,
    SecurityPosture,
    ValidationIssue,
    validate_scenario,
)
from .attack_tree import (
    AttackNode,
    AttackTree,
    BasicEvent,
    CycleDetectedError,
    UnresolvedLeafError,
    gate_and,
    gate_or,
    leaf,
)

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1

# A design point whose feasibility slack is below this fraction of the
# TMEL sits close enough to the boundary that the required RRF is
# hypersensitive to the assessed probabilities; reports carry a warning.
NEAR_BOUNDARY_FRACTION = 0.1

# Aggregated attacker sources must agree with an explicit lambda_cyber
# to this relative tolerance.
_AGGREGATE_REL_TOL = 1e-9


class ParseError(ClopaError):
    code = "PARSE_ERROR"


class SchemaError(ClopaError):
    code = "SCHEMA_ERROR"


class ScenarioValidationError(ClopaError):
    code = "VALIDATION_ERROR"

    def __init__(self, issues: Sequence[ValidationIssue]):
        detail = "; ".join(f"{i.code} at {i.path}" for i in issues)
        super().__init__(f"scenario validation failed: {detail}")
        self.issues = tuple(issues)


@dataclass(frozen=True)
class ScenarioDocument:
    """A parsed scenario file: the LOPA sheet, the posture, the sources,
    and the raw document for echoing into reports."""

    scenario: LopaScenario
    posture: SecurityPosture
    attacker_sources: tuple[AttackerSource, ...]
    raw: dict


def fixture_path(name: str) -> Path:
    """Path of a packaged example document."""
    return Path(str(files("clopa").joinpath("data", name)))


def _parse_json(text: str, what: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"{what} is not valid JSON: {err}") from err
    if not isinstance(doc, dict):
        raise SchemaError(f"{what} must be a JSON object")
    return doc


def _check_format_version(doc: dict, what: str) -> None:
    version = doc.get("format_version")
    if version is None:
        raise SchemaError(f"{what} is missing format_version")
    if version != FORMAT_VERSION:
        raise SchemaError(
            f"{what} has unsupported format_version {version!r}; expected {FORMAT_VERSION}"
        )


def _reject_unknown(obj: dict, allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown keys at {path}: {sorted(unknown)}")


def _get(obj: dict, key: str, kind, path: str, required: bool = True):
    if key not in obj:
        if required:
            raise SchemaError(f"missing key {path}.{key}")
        return None
    value = obj[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{path}.{key} must be a number")
        return float(value)
    if not isinstance(value, kind):
        raise SchemaError(f"{path}.{key} must be {kind.__name__}")
    return value


def _fold_layer_pfds(
    obj: dict, layers: list[str], path: str, issues: list[ValidationIssue]
) -> float:
    raw = _get(obj, "layer_pfds", dict, path)
    unknown = set(raw) - set(layers)
    if unknown:
        raise SchemaError(f"unknown layer columns at {path}.layer_pfds: {sorted(unknown)}")
    product = 1.0
    for layer in layers:
        if layer not in raw:
            # An uncredited layer gives the row no protection.
            continue
        value = raw[layer]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{path}.layer_pfds.{layer} must be a number")
        value = float(value)
        if value < 0.0 or value > 1.0 or value != value:
            issues.append(
                ValidationIssue(
                    code="PROBABILITY_RANGE",
                    path=f"{path}.layer_pfds.{layer}",
                    message=f"layer PFD must lie in [0, 1], got {value!r}",
                )
            )
            continue
        product *= value
    return product


def parse_scenario(text: str) -> ScenarioDocument:
    """Parse and validate a scenario document.

    Raises:
        ParseError: Not JSON.
        SchemaError: Wrong shape, missing or unknown keys, bad
            format_version.
        ScenarioValidationError: Structurally sound but semantically
            invalid (out-of-range values, nonpositive TMEL, duplicate
            rows, inconsistent aggregated attack rate); carries every
            issue found, not just the first.
    """
    doc = _parse_json(text, "scenario document")
    _check_format_version(doc, "scenario document")
    _reject_unknown(
        doc,
        {
            "format_version",
            "hazard",
            "tmel_per_year",
            "layers",
            "initiating_events",
            "bpcs",
            "security_posture",
            "attacker_sources",
        },
        "$",
    )

    hazard = _get(doc, "hazard", str, "$")
    tmel = _get(doc, "tmel_per_year", float, "$")
    layers = _get(doc, "layers", list, "$")
    if not all(isinstance(l, str) for l in layers):
        raise SchemaError("$.layers must be a list of column names")
    if len(set(layers)) != len(layers):
        raise SchemaError("$.layers has duplicate column names")

    issues: list[ValidationIssue] = []

    rows = _get(doc, "initiating_events", list, "$")
    events: list[InitiatingEvent] = []
    for i, row in enumerate(rows):
        path = f"$.initiating_events[{i}]"
        if not isinstance(row, dict):
            raise SchemaError(f"{path} must be an object")
        _reject_unknown(row, {"name", "likelihood_per_year", "layer_pfds"}, path)
        name = _get(row, "name", str, path)
        likelihood = _get(row, "likelihood_per_year", float, path)
        product = _fold_layer_pfds(row, layers, path, issues)
        try:
            events.append(
                InitiatingEvent(
                    name=name, likelihood=likelihood, layer_pfd_product=product
                )
            )
        except (ProbabilityRangeError, RateRangeError) as err:
            issues.append(ValidationIssue(code=err.code, path=path, message=str(err)))

    bpcs_obj = _get(doc, "bpcs", dict, "$")
    _reject_unknown(
        bpcs_obj,
        {"pfd_physical", "lambda_physical_per_year", "lambda_cyber_per_year", "layer_pfds"},
        "$.bpcs",
    )
    pfd_physical = _get(bpcs_obj, "pfd_physical", float, "$.bpcs")
    lambda_physical = _get(bpcs_obj, "lambda_physical_per_year", float, "$.bpcs")
    lambda_cyber = _get(bpcs_obj, "lambda_cyber_per_year", float, "$.bpcs", required=False)
    bpcs_product = _fold_layer_pfds(bpcs_obj, layers, "$.bpcs", issues)

    sources: list[AttackerSource] = []
    raw_sources = _get(doc, "attacker_sources", list, "$", required=False)
    if raw_sources is not None:
        for i, row in enumerate(raw_sources):
            path = f"$.attacker_sources[{i}]"
            if not isinstance(row, dict):
                raise SchemaError(f"{path} must be an object")
            _reject_unknown(
                row, {"name", "attempts_per_year", "success_probability"}, path
            )
            try:
                sources.append(
                    AttackerSource(
                        name=_get(row, "name", str, path),
                        attempts_per_year=_get(row, "attempts_per_year", float, path),
                        success_probability=_get(row, "success_probability", float, path),
                    )
                )
            except (ProbabilityRangeError, RateRangeError) as err:
                issues.append(
                    ValidationIssue(code=err.code, path=path, message=str(err))
                )

    if lambda_cyber is None:
        if not sources:
            raise SchemaError(
                "$.bpcs.lambda_cyber_per_year is required when no attacker_sources are given"
            )
        lambda_cyber = sum(
            float(s.attempts_per_year) * float(s.success_probability) for s in sources
        )
    elif sources and not issues:
        aggregated = sum(
            float(s.attempts_per_year) * float(s.success_probability) for s in sources
        )
        scale = max(abs(lambda_cyber), abs(aggregated), 1e-300)
        if abs(aggregated - lambda_cyber) > _AGGREGATE_REL_TOL * scale:
            issues.append(
                ValidationIssue(
                    code="LAMBDA_CYBER_MISMATCH",
                    path="$.bpcs.lambda_cyber_per_year",
                    message=(
                        f"explicit lambda_cyber {lambda_cyber!r} disagrees with the "
                        f"aggregated attacker sources {aggregated!r}"
                    ),
                )
            )

    posture_obj = _get(doc, "security_posture", dict, "$")
    _reject_unknown(
        posture_obj,
        {"p_attack_bpcs", "p_attack_sis", "p_pivot_bpcs_to_sis", "p_pivot_sis_to_bpcs"},
        "$.security_posture",
    )
    posture_values = {
        "p_ab": _get(posture_obj, "p_attack_bpcs", float, "$.security_posture"),
        "p_as": _get(posture_obj, "p_attack_sis", float, "$.security_posture"),
        "p_abs": _get(posture_obj, "p_pivot_bpcs_to_sis", float, "$.security_posture"),
        "p_asb": _get(posture_obj, "p_pivot_sis_to_bpcs", float, "$.security_posture"),
    }
    posture = None
    try:
        posture = SecurityPosture(**posture_values)
    except ProbabilityRangeError as err:
        issues.append(
            ValidationIssue(code=err.code, path="$.security_posture", message=str(err))
        )

    scenario = None
    try:
        scenario = LopaScenario(
            hazard=hazard,
            tmel=tmel,
            initiating_events=tuple(events),
            bpcs=BpcsParams(
                pfd_physical=pfd_physical,
                lambda_physical=lambda_physical,
                lambda_cyber=lambda_cyber,
                layer_pfd_product=bpcs_product,
            ),
        )
    except (ProbabilityRangeError, RateRangeError) as err:
        issues.append(ValidationIssue(code=err.code, path="$", message=str(err)))

    if scenario is not None:
        issues.extend(validate_scenario(scenario))
    if issues:
        raise ScenarioValidationError(issues)

    return ScenarioDocument(
        scenario=scenario,
        posture=posture,
        attacker_sources=tuple(sources),
        raw=doc,
    )


def load_scenario(path: str | Path) -> ScenarioDocument:
    logger.debug("loading scenario from %s", path)
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def render_scenario_json(document: ScenarioDocument) -> str:
    """Serialize a scenario document back to text; parsing the result
    reproduces the same domain objects."""
    return json.dumps(document.raw, indent=2) + "\n"


def parse_attack_tree(text: str) -> AttackTree:
    """Parse an attack tree document.

    Node children name either another node or a basic event (a leaf);
    a name matching both is rejected as ambiguous.

    Raises:
        ParseError, SchemaError: Malformed document.
        UnresolvedLeafError: A child names neither a node nor an event.
        CycleDetectedError: The node graph loops.
    """
    doc = _parse_json(text, "attack tree document")
    _check_format_version(doc, "attack tree document")
    _reject_unknown(doc, {"format_version", "name", "events", "nodes", "root"}, "$")

    name = _get(doc, "name", str, "$")
    raw_events = _get(doc, "events", list, "$")
    events: list[BasicEvent] = []
    for i, row in enumerate(raw_events):
        path = f"$.events[{i}]"
        if not isinstance(row, dict):
            raise SchemaError(f"{path} must be an object")
        _reject_unknown(row, {"id", "probability", "description"}, path)
        events.append(
            BasicEvent(
                id=_get(row, "id", str, path),
                probability=_get(row, "probability", float, path),
                description=_get(row, "description", str, path, required=False) or "",
            )
        )
    event_ids = {e.id for e in events}

    raw_nodes = _get(doc, "nodes", dict, "$")
    for node_name, spec in raw_nodes.items():
        path = f"$.nodes.{node_name}"
        if not isinstance(spec, dict):
            raise SchemaError(f"{path} must be an object")
        _reject_unknown(spec, {"gate", "children"}, path)
        gate = _get(spec, "gate", str, path)
        if gate not in ("and", "or"):
            raise SchemaError(f"{path}.gate must be 'and' or 'or'")
        children = _get(spec, "children", list, path)
        if not children or not all(isinstance(c, str) for c in children):
            raise SchemaError(f"{path}.children must be a nonempty list of names")
        if node_name in event_ids:
            raise SchemaError(
                f"node name {node_name!r} is ambiguous: it is also a basic event id"
            )

    root_name = _get(doc, "root", str, "$")

    built: dict[str, AttackNode] = {}

    def build(ref: str, stack: tuple[str, ...]) -> AttackNode:
        if ref in raw_nodes:
            if ref in stack:
                cycle = " -> ".join(stack + (ref,))
                raise CycleDetectedError(f"attack tree nodes form a cycle: {cycle}")
            if ref not in built:
                spec = raw_nodes[ref]
                children = tuple(
                    build(c, stack + (ref,)) for c in spec["children"]
                )
                combine = gate_and if spec["gate"] == "and" else gate_or
                built[ref] = combine(*children)
            return built[ref]
        if ref in event_ids:
            return leaf(ref)
        raise UnresolvedLeafError(
            f"{ref!r} names neither a node nor a basic event"
        )

    root = build(root_name, ())
    return AttackTree(name=name, root=root, events=tuple(events))


def load_attack_tree(path: str | Path) -> AttackTree:
    logger.debug("loading attack tree from %s", path)
    return parse_attack_tree(Path(path).read_text(encoding="utf-8"))


def parse_oracle_script(text: str) -> list[ScriptedResponse]:
    """Parse a recorded co-design response table."""
    doc = _parse_json(text, "oracle script")
    _check_format_version(doc, "oracle script")
    _reject_unknown(doc, {"format_version", "responses"}, "$")
    raw = _get(doc, "responses", list, "$")
    responses: list[ScriptedResponse] = []
    for i, row in enumerate(raw):
        path = f"$.responses[{i}]"
        if not isinstance(row, dict):
            raise SchemaError(f"{path} must be an object")
        _reject_unknown(row, {"verified_rrf", "p_as", "p_abs"}, path)
        verified_rrf = _get(row, "verified_rrf", float, path)
        p_as = _get(row, "p_as", float, path)
        p_abs = _get(row, "p_abs", float, path)
        try:
            responses.append(
                ScriptedResponse(verified_rrf=verified_rrf, p_as=p_as, p_abs=p_abs)
            )
        except ClopaError as err:
            raise SchemaError(f"{path}: {err}") from err
    return responses


def load_oracle_script(path: str | Path) -> list[ScriptedResponse]:
    return parse_oracle_script(Path(path).read_text(encoding="utf-8"))


def format_number(value: float) -> str:
    """Render a number at 12 significant digits."""
    return f"{value:.12g}"


def curve_csv(samples: Iterable[CurveSample]) -> str:
    """Comma-delimited boundary export: header p_as,p_abs, LF endings."""
    lines = ["p_as,p_abs"]
    for s in samples:
        lines.append(f"{format_number(s.p_as)},{format_number(s.p_abs)}")
    return "\n".join(lines) + "\n"


def contour_csv(curves: Iterable[tuple[float, Sequence[CurveSample]]]) -> str:
    """Comma-delimited contour export with the RRF level as a third column."""
    lines = ["p_as,p_abs,rrf"]
    for rrf, samples in curves:
        for s in samples:
            lines.append(
                f"{format_number(s.p_as)},{format_number(s.p_abs)},{format_number(rrf)}"
            )
    return "\n".join(lines) + "\n"


def write_text(path: str | Path, content: str) -> None:
    """Write exactly the given bytes with LF endings on every platform."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(content)


def _bound_payload(result) -> dict:
    return {
        "feasible": result.feasible,
        "pfd_bound": result.pfd_bound,
        "rrf": result.rrf,
        "numerator": result.numerator,
        "denominator": result.denominator,
    }


def build_report(document: ScenarioDocument) -> dict:
    """Assemble the full assessment report for a scenario document.

    Contains the echoed inputs, the folded coefficients, the classical
    and cyber-aware bounds at the document's posture, the design-region
    limits, the RRF error against classical LOPA, and any warnings.
    """
    scenario = document.scenario
    posture = document.posture
    coefficients = clopa_coefficients(scenario, posture)
    classical = classical_lopa(scenario)
    clopa_bound = sis_pfd_bound(scenario, posture)
    limits = region_limits(coefficients)

    warnings: list[str] = []
    slack = feasibility_slack(coefficients, posture.p_as, posture.p_abs)
    if clopa_bound.feasible and slack < NEAR_BOUNDARY_FRACTION * coefficients.beta:
        used = 100.0 * (1.0 - slack / coefficients.beta)
        warnings.append(
            f"design point consumes {used:.1f}% of the TMEL budget; the required "
            "RRF is highly sensitive to the assessed attack probabilities here"
        )
    if not clopa_bound.feasible:
        warnings.append(
            "posture lies outside the feasible design region; no SIS reliability "
            "target can meet the TMEL without reducing the attack probabilities"
        )

    error = None
    hazard_at_bound = None
    if clopa_bound.feasible:
        error = rrf_error(scenario, posture)
        hazard_at_bound = expected_hazard_rate(scenario, clopa_bound.pfd_bound, posture)

    return {
        "format_version": FORMAT_VERSION,
        "hazard": scenario.hazard,
        "scenario": document.raw,
        "coefficients": {
            "alpha1": coefficients.alpha1,
            "alpha2": coefficients.alpha2,
            "beta": coefficients.beta,
            "gamma1": coefficients.gamma1,
            "gamma2": coefficients.gamma2,
            "gamma3": coefficients.gamma3,
            "zeta1": coefficients.zeta1,
            "zeta2": coefficients.zeta2,
            "zeta3": coefficients.zeta3,
        },
        "classical": _bound_payload(classical),
        "clopa": _bound_payload(clopa_bound),
        "region_limits": {
            "max_pas": limits.max_pas,
            "max_pabs": limits.max_pabs,
            "rrf_min": limits.rrf_min,
        },
        "rrf_error": error,
        "min_rrf_error": min_rrf_error(coefficients),
        "expected_hazard_rate_at_bound": hazard_at_bound,
        "warnings": warnings,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def render_report_text(report: dict) -> str:
    """Human-readable report summary for terminal output."""

    def fmt(value: Any) -> str:
        if value is None:
            return "INFEASIBLE"
        if isinstance(value, float):
            return format_number(value)
        return str(value)

    classical = report["classical"]
    clopa_bound = report["clopa"]
    limits = report["region_limits"]
    posture = report["scenario"]["security_posture"]
    lines = [
        f"hazard: {report['hazard']}",
        f"tmel_per_year: {fmt(report['scenario']['tmel_per_year'])}",
        "",
        f"classical LOPA:   pfd_bound {fmt(classical['pfd_bound'])}   rrf {fmt(classical['rrf'])}",
        f"cyber-aware LOPA: pfd_bound {fmt(clopa_bound['pfd_bound'])}   rrf {fmt(clopa_bound['rrf'])}",
        f"  at posture p_attack_sis {fmt(posture['p_attack_sis'])}, "
        f"p_pivot_bpcs_to_sis {fmt(posture['p_pivot_bpcs_to_sis'])}",
        "",
        f"design region: p_attack_sis < {fmt(limits['max_pas'])}, "
        f"p_pivot_bpcs_to_sis < {fmt(limits['max_pabs'])}",
        f"minimum required rrf anywhere: {fmt(limits['rrf_min'])}",
        f"classical-LOPA rrf shortfall at posture: {fmt(report['rrf_error'])}",
        f"smallest possible shortfall: {fmt(report['min_rrf_error'])}",
    ]
    for warning in report["warnings"]:
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"
