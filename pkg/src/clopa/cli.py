"""Command line interface.

Exit codes: 0 on success, 1 when the analysis itself fails (infeasible
posture, validation FAIL lines, no convergence), 2 on unusable input
(bad flags, unreadable files, malformed or invalid documents).
Results go to stdout; diagnostics and warnings go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import replace

from . import __version__
from .attack_tree import eval_tree, eval_tree_by_enumeration
from .codesign import ScriptedOracles, run_codesign, initial_design_point
from .design_space import region_limits, sample_boundary, sample_contour
from .engine import (
    classical_lopa,
    clopa_coefficients,
    cyber_failure_probs,
    expected_hazard_rate,
    joint_sis_bpcs_failure,
    min_rrf_error,
    rrf_error,
    sis_pfd_bound,
    sis_pfd_bound_general,
)
from .mc_oracle import (
    SimConfig,
    enumerate_cyber_events,
    enumerate_joint_failure,
    simulate_hazards,
)
from .model import (
    BpcsParams,
    ClopaError,
    InitiatingEvent,
    LopaScenario,
    SecurityPosture,
)
from .scenario_io import (
    ParseError,
    ScenarioValidationError,
    SchemaError,
    build_report,
    contour_csv,
    curve_csv,
    format_number,
    load_attack_tree,
    load_oracle_script,
    load_scenario,
    render_report_text,
    report_json,
    write_text,
)

logger = logging.getLogger(__name__)

# Monte Carlo cross-checks cannot resolve hazards at true case-study
# magnitudes; the validate command lifts every probability and rate to
# at least these floors first.
_VALIDATE_PROB_FLOOR = 0.05
_VALIDATE_RATE_FLOOR = 0.25


def _env_seed() -> int:
    raw = os.environ.get("CLOPA_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ClopaError(
            f"CLOPA_SEED must be an integer, got {raw!r}", code="DEGENERATE_CONFIG"
        )


def _posture_override(posture: SecurityPosture, args) -> SecurityPosture:
    updates = {}
    if getattr(args, "pas", None) is not None:
        updates["p_as"] = args.pas
    if getattr(args, "pabs", None) is not None:
        updates["p_abs"] = args.pabs
    return replace(posture, **updates) if updates else posture


def _cmd_assess(args) -> int:
    document = load_scenario(args.scenario)
    report = build_report(document)
    sys.stdout.write(render_report_text(report))
    for warning in report["warnings"]:
        print(f"warning: {warning}", file=sys.stderr)
    if args.json:
        write_text(args.json, report_json(report))
        print(f"wrote JSON report to {args.json}", file=sys.stderr)
    if args.plot:
        from .plots import save_design_space_plot

        coefficients = clopa_coefficients(document.scenario, document.posture)
        rrf = report["clopa"]["rrf"]
        levels = []
        if rrf is not None and rrf > report["region_limits"]["rrf_min"]:
            levels.append(rrf)
        save_design_space_plot(
            coefficients,
            args.plot,
            rrf_levels=levels,
            design_point=(
                float(document.posture.p_as),
                float(document.posture.p_abs),
            ),
        )
        print(f"wrote design-space figure to {args.plot}", file=sys.stderr)
    return 0 if report["clopa"]["feasible"] else 1


def _cmd_classic(args) -> int:
    document = load_scenario(args.scenario)
    result = classical_lopa(document.scenario)
    print(f"pfd_bound: {format_number(result.pfd_bound)}")
    print(f"rrf: {format_number(result.rrf)}")
    return 0


def _cmd_boundary(args) -> int:
    document = load_scenario(args.scenario)
    coefficients = clopa_coefficients(document.scenario, document.posture)
    samples = sample_boundary(coefficients, args.samples)
    write_text(args.out, curve_csv(samples))
    print(f"wrote {len(samples)} boundary samples to {args.out}", file=sys.stderr)
    if args.plot:
        from .plots import save_design_space_plot

        save_design_space_plot(coefficients, args.plot)
        print(f"wrote design-space figure to {args.plot}", file=sys.stderr)
    return 0


def _cmd_contour(args) -> int:
    document = load_scenario(args.scenario)
    coefficients = clopa_coefficients(document.scenario, document.posture)
    try:
        levels = [float(part) for part in args.rrf.split(",") if part.strip()]
    except ValueError:
        raise SchemaError(f"--rrf expects comma-separated numbers, got {args.rrf!r}")
    if not levels:
        raise SchemaError("--rrf lists no levels")
    curves = [
        (level, sample_contour(coefficients, level, args.samples)) for level in levels
    ]
    write_text(args.out, contour_csv(curves))
    total = sum(len(samples) for _, samples in curves)
    print(
        f"wrote {total} contour samples ({len(levels)} levels) to {args.out}",
        file=sys.stderr,
    )
    if args.plot:
        from .plots import save_design_space_plot

        save_design_space_plot(coefficients, args.plot, rrf_levels=levels)
        print(f"wrote design-space figure to {args.plot}", file=sys.stderr)
    return 0


def _cmd_error(args) -> int:
    document = load_scenario(args.scenario)
    posture = _posture_override(document.posture, args)
    coefficients = clopa_coefficients(document.scenario, posture)
    gap = rrf_error(document.scenario, posture)
    print(f"rrf_error: {format_number(gap)}")
    print(f"min_rrf_error: {format_number(min_rrf_error(coefficients))}")
    return 0


def _cmd_limits(args) -> int:
    document = load_scenario(args.scenario)
    coefficients = clopa_coefficients(document.scenario, document.posture)
    limits = region_limits(coefficients)
    print(f"max_pas: {format_number(limits.max_pas)}")
    print(f"max_pabs: {format_number(limits.max_pabs)}")
    print(f"rrf_min: {format_number(limits.rrf_min)}")
    return 0


def _cmd_tree_eval(args) -> int:
    tree = load_attack_tree(args.tree)
    print(format_number(float(eval_tree(tree))))
    return 0


def _cmd_design(args) -> int:
    document = load_scenario(args.scenario)
    point = initial_design_point(
        document.scenario, document.posture, args.target_rrf, args.pas
    )
    print(f"p_as: {format_number(float(point.p_as))}")
    print(f"p_abs: {format_number(float(point.p_abs))}")
    print(f"pfd_bound: {format_number(point.pfd_bound)}")
    print(f"rrf: {format_number(point.rrf)}")
    return 0


def _cmd_codesign(args) -> int:
    document = load_scenario(args.scenario)
    responses = load_oracle_script(args.script)
    oracles = ScriptedOracles(responses)
    trace = run_codesign(
        document.scenario,
        document.posture,
        oracles.design,
        oracles.assess,
        max_iterations=args.max_iter,
    )
    print(f"initial required rrf: {format_number(trace.initial_rrf)}")
    for record in trace.iterations:
        parts = [
            f"iteration {record.index}:",
            f"target {format_number(record.target_rrf)}",
        ]
        if record.verified_rrf is not None:
            parts.append(f"verified {format_number(record.verified_rrf)}")
        if record.p_as is not None:
            parts.append(
                f"posture ({format_number(record.p_as)}, {format_number(record.p_abs)})"
            )
            recomputed = (
                format_number(record.recomputed_rrf)
                if record.recomputed_rrf is not None
                else "INFEASIBLE"
            )
            parts.append(f"recomputed {recomputed}")
        print("  ".join(parts))
    print(f"outcome: {trace.outcome}")
    if trace.detail:
        print(f"detail: {trace.detail}", file=sys.stderr)
    if trace.final is not None:
        print(f"final required rrf: {format_number(trace.final.rrf)}")
        print(f"final pfd bound: {format_number(trace.final.pfd_bound)}")
    return 0 if trace.converged else 1


def _scaled_scenario(scenario: LopaScenario) -> LopaScenario:
    def lift_p(p) -> float:
        return max(float(p), _VALIDATE_PROB_FLOOR)

    def lift_r(r) -> float:
        return max(float(r), _VALIDATE_RATE_FLOOR)

    return LopaScenario(
        hazard=scenario.hazard,
        tmel=scenario.tmel,
        initiating_events=tuple(
            InitiatingEvent(
                name=ev.name,
                likelihood=lift_r(ev.likelihood),
                layer_pfd_product=lift_p(ev.layer_pfd_product),
            )
            for ev in scenario.initiating_events
        ),
        bpcs=BpcsParams(
            pfd_physical=lift_p(scenario.bpcs.pfd_physical),
            lambda_physical=lift_r(scenario.bpcs.lambda_physical),
            lambda_cyber=lift_r(scenario.bpcs.lambda_cyber),
            layer_pfd_product=lift_p(scenario.bpcs.layer_pfd_product),
        ),
    )


def _scaled_posture(posture: SecurityPosture) -> SecurityPosture:
    return SecurityPosture(
        p_ab=max(float(posture.p_ab), _VALIDATE_PROB_FLOOR),
        p_as=max(float(posture.p_as), _VALIDATE_PROB_FLOOR),
        p_abs=max(float(posture.p_abs), _VALIDATE_PROB_FLOOR),
        p_asb=max(float(posture.p_asb), _VALIDATE_PROB_FLOOR),
    )


def _random_postures(count: int, seed: int) -> list[SecurityPosture]:
    import numpy as np

    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        p = rng.uniform(0.0, 1.0, size=4)
        out.append(SecurityPosture(p_ab=p[0], p_as=p[1], p_abs=p[2], p_asb=p[3]))
    return out


def _rel_diff(a: float, b: float) -> float:
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


def _cmd_validate(args) -> int:
    document = load_scenario(args.scenario)
    scenario = document.scenario
    seed = args.seed if args.seed is not None else _env_seed()
    checks: list[tuple[str, bool, str]] = []

    postures = [document.posture] + _random_postures(200, seed)
    worst = 0.0
    for posture in postures:
        closed = cyber_failure_probs(posture)
        enum = enumerate_cyber_events(posture)
        worst = max(
            worst,
            abs(closed.p_bc - enum.p_bc),
            abs(closed.p_sc - enum.p_sc),
            abs(closed.p_joint - enum.p_joint),
        )
    checks.append(
        (
            "cyber compromise probabilities match exact enumeration",
            worst <= 1e-12,
            f"max abs diff {worst:.3e}",
        )
    )

    worst = 0.0
    for i, posture in enumerate(postures):
        p_sp = (i % 10) / 10.0
        p_bp = float(scenario.bpcs.pfd_physical)
        closed = joint_sis_bpcs_failure(p_sp, p_bp, cyber_failure_probs(posture))
        enum = enumerate_joint_failure(p_sp, p_bp, posture)
        worst = max(worst, abs(closed - enum))
    checks.append(
        (
            "joint SIS and BPCS failure matches exact enumeration",
            worst <= 1e-12,
            f"max abs diff {worst:.3e}",
        )
    )

    classical = classical_lopa(scenario)
    zero = sis_pfd_bound(scenario, SecurityPosture.zero())
    diff = _rel_diff(classical.pfd_bound, zero.pfd_bound)
    checks.append(
        (
            "zero-posture bound reduces to classical LOPA",
            diff <= 1e-12,
            f"rel diff {diff:.3e}",
        )
    )

    worst = 0.0
    for posture in postures:
        direct = sis_pfd_bound(scenario, posture)
        general = sis_pfd_bound_general(scenario, cyber_failure_probs(posture))
        if direct.feasible != general.feasible:
            worst = math.inf
            break
        # The raw fraction identity holds on both sides of the boundary.
        worst = max(
            worst,
            _rel_diff(
                direct.numerator / direct.denominator,
                general.numerator / general.denominator,
            ),
        )
    checks.append(
        (
            "design-variable and cyber-probability bound forms agree",
            worst <= 1e-12,
            f"max rel diff {worst:.3e} over {len(postures)} postures",
        )
    )

    bound = sis_pfd_bound(scenario, document.posture)
    if bound.feasible:
        hazard = expected_hazard_rate(scenario, bound.pfd_bound, document.posture)
        diff = _rel_diff(hazard, float(scenario.tmel))
        checks.append(
            (
                "expected hazard rate at the bound equals the TMEL",
                diff <= 1e-12,
                f"rel diff {diff:.3e}",
            )
        )

    scaled = _scaled_scenario(scenario)
    scaled_posture = _scaled_posture(document.posture)
    p_sp = 0.1
    analytic = expected_hazard_rate(scaled, p_sp, scaled_posture)
    sim = simulate_hazards(
        scaled, p_sp, scaled_posture, SimConfig(trials=args.trials, seed=seed)
    )
    delta = abs(sim.mean_rate - analytic)
    checks.append(
        (
            "Monte Carlo hazard rate within 3 sigma of closed form (scaled scenario)",
            delta <= 3.0 * sim.stderr,
            f"mc {sim.mean_rate:.6e} vs analytic {analytic:.6e}, "
            f"diff {delta:.3e}, 3 sigma {3.0 * sim.stderr:.3e}",
        )
    )

    failed = 0
    for name, ok, detail in checks:
        if ok:
            print(f"PASS: {name} ({detail})")
        else:
            failed += 1
            print(f"FAIL: {name} ({detail})")
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    return 0 if failed == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clopa",
        description=(
            "Cyber layer of protection analysis: SIS reliability requirements "
            "under cyberattack-induced failures"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("assess", help="full report for a scenario at its own posture")
    p.add_argument("scenario")
    p.add_argument("--json", metavar="FILE", help="also write the JSON report")
    p.add_argument("--plot", metavar="FILE", help="also render the design space")
    p.set_defaults(handler=_cmd_assess)

    p = sub.add_parser("classic", help="classical LOPA bound, adversary ignored")
    p.add_argument("scenario")
    p.set_defaults(handler=_cmd_classic)

    p = sub.add_parser("boundary", help="export the feasibility boundary as CSV")
    p.add_argument("scenario")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--plot", metavar="FILE", help="also render the design space")
    p.set_defaults(handler=_cmd_boundary)

    p = sub.add_parser("contour", help="export iso-RRF contours as CSV")
    p.add_argument("scenario")
    p.add_argument("--rrf", required=True, help="comma-separated RRF levels")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--out", required=True, metavar="FILE")
    p.add_argument("--plot", metavar="FILE", help="also render the design space")
    p.set_defaults(handler=_cmd_contour)

    p = sub.add_parser("error", help="RRF shortfall of classical LOPA at a posture")
    p.add_argument("scenario")
    p.add_argument("--pas", type=float, help="override the direct SIS attack probability")
    p.add_argument("--pabs", type=float, help="override the BPCS-to-SIS pivot probability")
    p.set_defaults(handler=_cmd_error)

    p = sub.add_parser("limits", help="feasible design region extent")
    p.add_argument("scenario")
    p.set_defaults(handler=_cmd_limits)

    p = sub.add_parser("tree", help="attack tree operations")
    tree_sub = p.add_subparsers(dest="tree_command", required=True)
    pe = tree_sub.add_parser("eval", help="root success probability of a tree")
    pe.add_argument("tree")
    pe.set_defaults(handler=_cmd_tree_eval)

    p = sub.add_parser("design", help="place a design point on an iso-RRF contour")
    p.add_argument("scenario")
    p.add_argument("--target-rrf", type=float, required=True)
    p.add_argument("--pas", type=float, required=True)
    p.set_defaults(handler=_cmd_design)

    p = sub.add_parser("codesign", help="run the co-design loop against an oracle script")
    p.add_argument("scenario")
    p.add_argument("--script", required=True, metavar="FILE")
    p.add_argument("--max-iter", type=int, default=20)
    p.set_defaults(handler=_cmd_codesign)

    p = sub.add_parser("validate", help="cross-check the engine against the oracles")
    p.add_argument("scenario")
    p.add_argument("--trials", type=int, default=200_000)
    p.add_argument("--seed", type=int, help="defaults to CLOPA_SEED, then 0")
    p.set_defaults(handler=_cmd_validate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ScenarioValidationError as err:
        for issue in err.issues:
            print(f"error: {issue.code} at {issue.path}: {issue.message}", file=sys.stderr)
        return 2
    except (ParseError, SchemaError) as err:
        print(f"error: {err.code}: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: IO_ERROR: {err}", file=sys.stderr)
        return 2
    except ClopaError as err:
        print(f"error: {err.code}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
