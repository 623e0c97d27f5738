"""Monte Carlo and enumeration oracles: distribution, determinism, guards.

The simulator's absolute agreement with the closed forms is covered by
the acceptance suite at large trial counts; here we pin determinism, the
known-answer Poisson case, and the enumerators' edge behavior.
"""

from __future__ import annotations

import math

import pytest

from clopa import (
    BpcsParams,
    InitiatingEvent,
    LopaScenario,
    SecurityPosture,
    SimConfig,
    enumerate_cyber_events,
    enumerate_joint_failure,
    expected_hazard_rate,
    simulate_hazards,
)
from clopa.mc_oracle import DegenerateConfigError


def _scenario(likelihood, product, pfd, lambda_p, lambda_c, bpcs_product):
    return LopaScenario(
        hazard="synthetic",
        tmel=1e-6,
        initiating_events=(
            InitiatingEvent(
                name="only", likelihood=likelihood, layer_pfd_product=product
            ),
        ),
        bpcs=BpcsParams(
            pfd_physical=pfd,
            lambda_physical=lambda_p,
            lambda_cyber=lambda_c,
            layer_pfd_product=bpcs_product,
        ),
    )


SCALED = _scenario(0.6, 0.4, 0.35, 0.5, 0.3, 0.3)
POSTURE = SecurityPosture(p_ab=0.2, p_as=0.15, p_abs=0.3, p_asb=0.25)


class TestSimConfig:
    def test_defaults(self):
        config = SimConfig(trials=1000)
        assert config.seed == 0
        assert config.horizon_years == 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(trials=0),
            dict(trials=-5),
            dict(trials=1000.0),
            dict(trials=1000, seed=-1),
            dict(trials=1000, seed=True),
            dict(trials=1000, horizon_years=0.0),
            dict(trials=1000, horizon_years=math.nan),
        ],
    )
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(DegenerateConfigError) as err:
            SimConfig(**kwargs)
        assert err.value.code == "DEGENERATE_CONFIG"


class TestEnumerators:
    def test_zero_posture(self):
        cy = enumerate_cyber_events(SecurityPosture.zero())
        assert cy.p_bc == cy.p_sc == cy.p_joint == 0.0

    def test_certain_direct_attacks(self):
        cy = enumerate_cyber_events(
            SecurityPosture(p_ab=1.0, p_as=1.0, p_abs=0.0, p_asb=0.0)
        )
        assert cy.p_bc == cy.p_sc == cy.p_joint == 1.0

    def test_pivot_needs_its_origin(self):
        # A certain pivot without the direct attack contributes nothing.
        cy = enumerate_cyber_events(
            SecurityPosture(p_ab=0.0, p_as=0.0, p_abs=1.0, p_asb=1.0)
        )
        assert cy.p_bc == cy.p_sc == cy.p_joint == 0.0

    def test_joint_failure_reduces_to_product_without_attacks(self):
        value = enumerate_joint_failure(0.25, 0.4, SecurityPosture.zero())
        assert math.isclose(value, 0.1, rel_tol=1e-15)

    def test_joint_failure_saturates_at_one(self):
        value = enumerate_joint_failure(
            1.0, 1.0, SecurityPosture(p_ab=0.3, p_as=0.2, p_abs=0.1, p_asb=0.4)
        )
        assert math.isclose(value, 1.0, rel_tol=1e-15)


class TestSimulator:
    def test_known_poisson_rate(self):
        # Every arrival is a hazard, so the mean is the arrival rate and
        # the per-trial variance is Poisson.
        scenario = _scenario(2.0, 1.0, 1.0, 0.0, 0.0, 1.0)
        config = SimConfig(trials=200_000, seed=3)
        result = simulate_hazards(scenario, 1.0, SecurityPosture.zero(), config)
        assert abs(result.mean_rate - 2.0) <= 3.0 * result.stderr
        assert math.isclose(
            result.stderr, math.sqrt(2.0 / config.trials), rel_tol=0.05
        )

    def test_matches_closed_form_on_scaled_scenario(self):
        analytic = expected_hazard_rate(SCALED, 0.1, POSTURE)
        result = simulate_hazards(SCALED, 0.1, POSTURE, SimConfig(trials=200_000, seed=7))
        assert result.stderr > 0.0
        assert abs(result.mean_rate - analytic) <= 3.0 * result.stderr

    def test_longer_horizon_still_estimates_yearly_rate(self):
        analytic = expected_hazard_rate(SCALED, 0.1, POSTURE)
        result = simulate_hazards(
            SCALED, 0.1, POSTURE, SimConfig(trials=100_000, seed=11, horizon_years=4.0)
        )
        assert abs(result.mean_rate - analytic) <= 3.0 * result.stderr
        # Four times the exposure shrinks the per-trial variance.
        yearly = simulate_hazards(SCALED, 0.1, POSTURE, SimConfig(trials=100_000, seed=11))
        assert result.stderr < yearly.stderr

    def test_deterministic_for_fixed_seed(self):
        config = SimConfig(trials=50_000, seed=123)
        a = simulate_hazards(SCALED, 0.1, POSTURE, config)
        b = simulate_hazards(SCALED, 0.1, POSTURE, config)
        assert a == b

    def test_seed_changes_the_sample(self):
        a = simulate_hazards(SCALED, 0.1, POSTURE, SimConfig(trials=50_000, seed=1))
        b = simulate_hazards(SCALED, 0.1, POSTURE, SimConfig(trials=50_000, seed=2))
        assert a.mean_rate != b.mean_rate

    def test_zero_rates_give_zero(self):
        scenario = _scenario(0.0, 0.5, 0.5, 0.0, 0.0, 0.5)
        result = simulate_hazards(
            scenario, 0.5, SecurityPosture.zero(), SimConfig(trials=1000, seed=5)
        )
        assert result.mean_rate == 0.0
        assert result.stderr == 0.0

    def test_single_trial_has_no_stderr(self):
        result = simulate_hazards(
            SCALED, 0.1, POSTURE, SimConfig(trials=1, seed=5)
        )
        assert math.isnan(result.stderr)

    def test_physical_bpcs_row_ignores_bpcs_state(self):
        # With only the physical-BPCS row active and the SIS certain to
        # fail, every arrival is a hazard regardless of attack outcomes.
        scenario = _scenario(0.0, 1.0, 0.0, 1.5, 0.0, 1.0)
        result = simulate_hazards(
            scenario, 1.0, SecurityPosture.zero(), SimConfig(trials=100_000, seed=9)
        )
        assert abs(result.mean_rate - 1.5) <= 3.0 * result.stderr
