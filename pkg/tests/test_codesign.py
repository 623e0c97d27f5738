"""Co-design loop: convergence, oracle failure paths, and the entry point."""

from __future__ import annotations

import math

import pytest

from clopa import (
    ClopaError,
    InfeasiblePointError,
    OracleFailure,
    RrfBelowMinimumError,
    ScriptedOracles,
    ScriptedResponse,
    SecurityPosture,
    fixture_path,
    initial_design_point,
    load_oracle_script,
    run_codesign,
)
from clopa.codesign import CONVERGED, MAX_ITERATIONS, ORACLE_FAILURE, PasOutOfRangeError

# Frozen from the packaged case study and replay script.
INITIAL_RRF = 501.7296903904696
FINAL_RRF = 1100.4667928777703
FINAL_PFD = 0.0009087052934918234


def _scripted(*rows):
    return ScriptedOracles([ScriptedResponse(*row) for row in rows])


class TestScriptedOracles:
    def test_labels_are_sequential(self):
        oracles = _scripted((500.0, 0.003, 0.04), (600.0, 0.004, 0.05))
        first = oracles.design(450.0)
        second = oracles.design(550.0)
        assert first.architecture == "scripted-1"
        assert second.architecture == "scripted-2"
        assert first.verified_rrf == 500.0

    def test_assess_returns_matching_entry(self):
        oracles = _scripted((500.0, 0.003, 0.04))
        response = oracles.design(450.0)
        assessment = oracles.assess(response.architecture)
        assert float(assessment.p_as) == 0.003
        assert float(assessment.p_abs) == 0.04

    def test_exhausted_script_fails(self):
        oracles = _scripted((500.0, 0.003, 0.04))
        oracles.design(450.0)
        with pytest.raises(OracleFailure):
            oracles.design(600.0)

    def test_unknown_architecture_fails(self):
        oracles = _scripted((500.0, 0.003, 0.04))
        with pytest.raises(OracleFailure):
            oracles.assess("unheard-of")

    def test_nonpositive_verified_rrf_rejected(self):
        with pytest.raises(ClopaError):
            ScriptedResponse(verified_rrf=0.0, p_as=0.003, p_abs=0.04)


class TestInitialDesignPoint:
    def test_case_study_entry(self, case_scenario, case_posture):
        point = initial_design_point(case_scenario, case_posture, 500.0, 0.003)
        assert float(point.p_as) == 0.003
        assert math.isclose(float(point.p_abs), 0.042493922673547097, rel_tol=1e-12)
        assert math.isclose(point.rrf, 500.0, rel_tol=1e-12)
        assert math.isclose(point.pfd_bound, 0.002, rel_tol=1e-12)

    def test_pas_outside_contour_extent(self, case_scenario, case_posture):
        # The RRF-500 contour meets the p_as axis near 0.00516.
        with pytest.raises(PasOutOfRangeError) as err:
            initial_design_point(case_scenario, case_posture, 500.0, 0.006)
        assert err.value.code == "PAS_OUT_OF_RANGE"

    def test_target_below_floor_propagates(self, case_scenario, case_posture):
        with pytest.raises(RrfBelowMinimumError):
            initial_design_point(case_scenario, case_posture, 100.0, 0.003)


class TestReplay:
    def test_packaged_script_converges(self, case_scenario, case_posture):
        responses = load_oracle_script(fixture_path("codesign_script.json"))
        oracles = ScriptedOracles(responses)
        trace = run_codesign(case_scenario, case_posture, oracles.design, oracles.assess)

        assert trace.outcome == CONVERGED
        assert trace.converged
        assert math.isclose(trace.initial_rrf, INITIAL_RRF, rel_tol=1e-12)
        assert len(trace.iterations) == 2

        first, second = trace.iterations
        assert first.index == 1
        assert math.isclose(first.target_rrf, INITIAL_RRF, rel_tol=1e-12)
        assert first.verified_rrf == 502.0
        assert first.architecture == "scripted-1"
        assert math.isclose(first.recomputed_rrf, FINAL_RRF, rel_tol=1e-12)
        assert second.index == 2
        assert math.isclose(second.target_rrf, FINAL_RRF, rel_tol=1e-12)
        assert second.verified_rrf == 1101.0

        assert trace.final is not None
        assert float(trace.final.p_as) == 0.005
        assert float(trace.final.p_abs) == 0.02
        assert math.isclose(trace.final.rrf, FINAL_RRF, rel_tol=1e-12)
        assert math.isclose(trace.final.pfd_bound, FINAL_PFD, rel_tol=1e-12)

    def test_targets_never_decrease(self, case_scenario, case_posture):
        responses = load_oracle_script(fixture_path("codesign_script.json"))
        oracles = ScriptedOracles(responses)
        trace = run_codesign(case_scenario, case_posture, oracles.design, oracles.assess)
        targets = [r.target_rrf for r in trace.iterations]
        assert all(a <= b for a, b in zip(targets, targets[1:]))

    def test_fixed_point_in_one_round(self, case_scenario, case_posture):
        # The assessment hands back the very posture the requirement came
        # from, so the recomputed requirement equals the target exactly.
        oracles = _scripted((502.0, float(case_posture.p_as), float(case_posture.p_abs)))
        trace = run_codesign(case_scenario, case_posture, oracles.design, oracles.assess)
        assert trace.outcome == CONVERGED
        assert len(trace.iterations) == 1
        assert math.isclose(trace.final.rrf, INITIAL_RRF, rel_tol=1e-12)


class TestFailurePaths:
    def test_under_delivery(self, case_scenario, case_posture):
        oracles = _scripted((400.0, 0.003, 0.04))
        trace = run_codesign(case_scenario, case_posture, oracles.design, oracles.assess)
        assert trace.outcome == ORACLE_FAILURE
        assert not trace.converged
        assert trace.final is None
        assert "below the target" in trace.detail
        record = trace.iterations[-1]
        assert record.verified_rrf == 400.0
        assert record.p_as is None and record.recomputed_rrf is None

    def test_script_exhaustion(self, case_scenario, case_posture):
        oracles = _scripted((502.0, 0.005, 0.02))
        trace = run_codesign(case_scenario, case_posture, oracles.design, oracles.assess)
        assert trace.outcome == ORACLE_FAILURE
        assert len(trace.iterations) == 2
        assert trace.iterations[0].recomputed_rrf is not None
        last = trace.iterations[-1]
        assert last.verified_rrf is None and last.architecture is None
        assert "exhausted" in trace.detail

    def test_assessment_failure_keeps_design_fields(self, case_scenario, case_posture):
        def design(target_rrf):
            from clopa import DesignResponse

            return DesignResponse(architecture="one-off", verified_rrf=600.0)

        def assess(architecture):
            raise OracleFailure(f"no assessment capacity for {architecture!r}")

        trace = run_codesign(case_scenario, case_posture, design, assess)
        assert trace.outcome == ORACLE_FAILURE
        record = trace.iterations[-1]
        assert record.architecture == "one-off"
        assert record.verified_rrf == 600.0
        assert record.p_as is None

    def test_infeasible_assessment_pushes_target_to_infinity(
        self, case_scenario, case_posture
    ):
        oracles = _scripted((502.0, 0.009, 0.5), (1e12, 0.001, 0.01))
        trace = run_codesign(case_scenario, case_posture, oracles.design, oracles.assess)
        assert trace.outcome == ORACLE_FAILURE
        assert trace.iterations[0].recomputed_rrf is None
        assert trace.iterations[1].target_rrf == math.inf

    def test_max_iterations(self, case_scenario, case_posture):
        # Every assessed posture is strictly worse than the last, so the
        # recomputed requirement always exceeds the round's target.
        oracles = _scripted(
            (1e9, 0.004, 0.05),
            (1e9, 0.00405, 0.0505),
            (1e9, 0.0041, 0.051),
            (1e9, 0.00415, 0.0515),
        )
        trace = run_codesign(
            case_scenario, case_posture, oracles.design, oracles.assess, max_iterations=3
        )
        assert trace.outcome == MAX_ITERATIONS
        assert len(trace.iterations) == 3
        recomputed = [r.recomputed_rrf for r in trace.iterations]
        assert all(a < b for a, b in zip(recomputed, recomputed[1:]))

    def test_infeasible_initial_posture_needs_explicit_target(
        self, case_scenario, case_posture
    ):
        bad = SecurityPosture(
            p_ab=float(case_posture.p_ab),
            p_as=0.009,
            p_abs=0.5,
            p_asb=float(case_posture.p_asb),
        )
        with pytest.raises(InfeasiblePointError):
            run_codesign(case_scenario, bad, lambda t: None, lambda a: None)

        oracles = _scripted((502.0, float(case_posture.p_as), float(case_posture.p_abs)))
        trace = run_codesign(
            case_scenario,
            bad,
            oracles.design,
            oracles.assess,
            initial_rrf=INITIAL_RRF,
        )
        assert trace.outcome == CONVERGED

    def test_max_iterations_validated(self, case_scenario, case_posture):
        with pytest.raises(ClopaError) as err:
            run_codesign(
                case_scenario,
                case_posture,
                lambda t: None,
                lambda a: None,
                max_iterations=0,
            )
        assert err.value.code == "DEGENERATE_CONFIG"
