"""Independent cross-checks for the closed-form engine.

Two exact enumerators walk the underlying event space directly (every
truth assignment of the attack and physical failure indicators), and a
Monte Carlo simulator counts hazards the long way: Poisson arrivals per
LOPA row, fresh Bernoulli draws per arrival for layers, physical
failures, and attack outcomes. None of it reuses the engine's algebra,
which is the point: agreement is evidence, not tautology.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .engine import CyberFailureProbs
from .model import ClopaError, LopaScenario, Probability, SecurityPosture


class DegenerateConfigError(ClopaError):
    code = "DEGENERATE_CONFIG"


@dataclass(frozen=True)
class SimConfig:
    """Monte Carlo run parameters.

    ``seed`` feeds a splittable generator; every LOPA row draws from its
    own derived stream (seed plus row index), so results are
    reproducible bit for bit for a fixed seed and insensitive to how the
    rows would be scheduled.
    """

    trials: int
    seed: int = 0
    horizon_years: float = 1.0

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise DegenerateConfigError(f"trials must be a positive int, got {self.trials!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise DegenerateConfigError(f"seed must be a nonnegative int, got {self.seed!r}")
        h = self.horizon_years
        if not isinstance(h, (int, float)) or not math.isfinite(float(h)) or float(h) <= 0.0:
            raise DegenerateConfigError(f"horizon_years must be positive, got {h!r}")
        object.__setattr__(self, "horizon_years", float(h))


class SimResult(NamedTuple):
    """Estimated mean hazard rate (per year) and its standard error."""

    mean_rate: float
    stderr: float


def _posture_floats(posture: SecurityPosture) -> tuple[float, float, float, float]:
    return (
        float(posture.p_ab),
        float(posture.p_as),
        float(posture.p_abs),
        float(posture.p_asb),
    )


def enumerate_cyber_events(posture: SecurityPosture) -> CyberFailureProbs:
    """Compromise probabilities by summing over all 2**4 attack outcomes.

    The four indicators are the direct attacks on BPCS and SIS and the
    two pivots; a pivot only matters if its origin attack succeeded.
    """
    p_ab, p_as, p_abs, p_asb = _posture_floats(posture)
    probs = (p_ab, p_as, p_abs, p_asb)

    p_bc = 0.0
    p_sc = 0.0
    p_joint = 0.0
    for bits in itertools.product((False, True), repeat=4):
        weight = 1.0
        for p, bit in zip(probs, bits):
            weight *= p if bit else 1.0 - p
        if weight == 0.0:
            continue
        ab, as_, abs_, asb = bits
        bpcs_comp = ab or (as_ and asb)
        sis_comp = as_ or (ab and abs_)
        if bpcs_comp:
            p_bc += weight
        if sis_comp:
            p_sc += weight
        if bpcs_comp and sis_comp:
            p_joint += weight
    return CyberFailureProbs(p_bc=p_bc, p_sc=p_sc, p_joint=p_joint)


def enumerate_joint_failure(
    p_sp: Probability | float,
    p_bp: Probability | float,
    posture: SecurityPosture,
) -> float:
    """P[both systems failed] by summing over all 2**6 outcomes.

    Adds the two independent physical failure indicators to the four
    attack indicators; a system is failed if it failed physically or is
    compromised.
    """
    x = float(Probability.of(p_sp))
    b = float(Probability.of(p_bp))
    p_ab, p_as, p_abs, p_asb = _posture_floats(posture)
    probs = (x, b, p_ab, p_as, p_abs, p_asb)

    total = 0.0
    for bits in itertools.product((False, True), repeat=6):
        weight = 1.0
        for p, bit in zip(probs, bits):
            weight *= p if bit else 1.0 - p
        if weight == 0.0:
            continue
        sp, bp, ab, as_, abs_, asb = bits
        sis_failed = sp or as_ or (ab and abs_)
        bpcs_failed = bp or ab or (as_ and asb)
        if sis_failed and bpcs_failed:
            total += weight
    return total


def simulate_hazards(
    scenario: LopaScenario,
    p_sp: Probability | float,
    posture: SecurityPosture,
    config: SimConfig,
) -> SimResult:
    """Monte Carlo estimate of the mitigated hazard rate.

    Each trial spans ``horizon_years``. Every LOPA row produces Poisson
    arrivals at its own rate; each arrival independently draws its
    protection layer outcome, the physical failure states, and the four
    attack indicators. Initiating-event rows and the aggregated attack
    row count a hazard when the layers and both systems fail; the
    physical-BPCS-failure row has the BPCS down by construction and
    needs only total SIS failure.

    Probabilities at real case-study magnitudes make hazards too rare to
    resolve in reasonable trial counts; validation runs use scaled-up
    scenarios.
    """
    x = float(Probability.of(p_sp))
    b = float(scenario.bpcs.pfd_physical)
    p_ab, p_as, p_abs, p_asb = _posture_floats(posture)
    horizon = config.horizon_years
    trials = config.trials

    # (rate, layer probability, whether BPCS failure is required)
    rows: list[tuple[float, float, bool]] = [
        (float(ev.likelihood), float(ev.layer_pfd_product), True)
        for ev in scenario.initiating_events
    ]
    rows.append(
        (
            float(scenario.bpcs.lambda_cyber),
            float(scenario.bpcs.layer_pfd_product),
            True,
        )
    )
    rows.append(
        (
            float(scenario.bpcs.lambda_physical),
            float(scenario.bpcs.layer_pfd_product),
            False,
        )
    )

    per_trial = np.zeros(trials, dtype=np.int64)
    for row_index, (rate, p_layer, needs_bpcs) in enumerate(rows):
        seq = np.random.SeedSequence(entropy=config.seed, spawn_key=(row_index,))
        rng = np.random.default_rng(seq)
        counts = rng.poisson(rate * horizon, size=trials)
        total = int(counts.sum())
        if total == 0:
            continue
        layer_ok = rng.random(total) < p_layer
        sp = rng.random(total) < x
        ab = rng.random(total) < p_ab
        as_ = rng.random(total) < p_as
        abs_ = rng.random(total) < p_abs
        asb = rng.random(total) < p_asb
        sis_failed = sp | as_ | (ab & abs_)
        if needs_bpcs:
            bp = rng.random(total) < b
            bpcs_failed = bp | ab | (as_ & asb)
            hazard = layer_ok & sis_failed & bpcs_failed
        else:
            hazard = layer_ok & sis_failed
        trial_of_arrival = np.repeat(np.arange(trials), counts)
        per_trial += np.bincount(trial_of_arrival[hazard], minlength=trials)

    rates = per_trial / horizon
    mean_rate = float(rates.mean())
    if trials > 1:
        stderr = float(rates.std(ddof=1) / math.sqrt(trials))
    else:
        stderr = float("nan")
    return SimResult(mean_rate=mean_rate, stderr=stderr)
