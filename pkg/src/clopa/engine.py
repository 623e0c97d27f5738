"""Required-PFD bounds for a SIS under combined physical and cyber failure.

Classical LOPA sizes the safety instrumented system against physical
failure alone: the required probability of failure on demand is the TMEL
divided by the unmitigated hazard rate. Once an adversary can disable
the SIS or the BPCS (directly or by pivoting between them), part of the
hazard budget is spent before the SIS hardware is even considered, and
the required PFD tightens. This module carries that algebra: the cyber
failure probabilities induced by a security posture, the expected
mitigated hazard rate, and the closed-form bound on the SIS physical PFD
in both its cyber-probability form and its design-variable form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    ClopaCoefficients,
    ClopaError,
    LopaScenario,
    Probability,
    SecurityPosture,
)

# Tolerance for consistency checks between probabilities that are exact
# in real arithmetic but computed through different float expressions.
_CONSISTENCY_TOL = 1e-9


class DegenerateDenominatorError(ClopaError):
    code = "DEGENERATE_DENOMINATOR"


class InfeasiblePointError(ClopaError):
    code = "INFEASIBLE_POINT"


@dataclass(frozen=True)
class CyberFailureProbs:
    """Cyber-induced failure probabilities of the two systems.

    Attributes:
        p_bc: Probability the BPCS is compromised (directly or via a
            pivot from the SIS).
        p_sc: Probability the SIS is compromised (directly or via a
            pivot from the BPCS).
        p_joint: Probability both are compromised by the same campaign.
    """

    p_bc: float
    p_sc: float
    p_joint: float

    def __post_init__(self):
        for name in ("p_bc", "p_sc", "p_joint"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < -_CONSISTENCY_TOL or v > 1.0 + _CONSISTENCY_TOL:
                raise ClopaError(
                    f"{name} must lie in [0, 1], got {v!r}",
                    code="PROBABILITY_RANGE",
                )
            object.__setattr__(self, name, min(1.0, max(0.0, v)))
        if self.p_joint > min(self.p_bc, self.p_sc) + _CONSISTENCY_TOL:
            raise ClopaError(
                "joint compromise probability exceeds a marginal",
                code="CYBER_PROBS_INCONSISTENT",
            )
        if self.p_joint < self.p_bc + self.p_sc - 1.0 - _CONSISTENCY_TOL:
            raise ClopaError(
                "joint compromise probability below the Frechet lower bound",
                code="CYBER_PROBS_INCONSISTENT",
            )


@dataclass(frozen=True)
class BoundResult:
    """Outcome of a required-PFD bound computation.

    ``pfd_bound`` is the largest SIS physical PFD that still meets the
    TMEL; ``rrf`` is its reciprocal. An infeasible result (no positive
    PFD can meet the TMEL) carries None in both fields, or a zero
    ``pfd_bound`` with None ``rrf`` exactly on the feasibility boundary.
    ``numerator`` and ``denominator`` expose the raw fraction for
    diagnostics. ``coefficients`` is present for the design-variable and
    classical forms; the cyber-probability form has no posture to fold,
    so it carries None there.
    """

    pfd_bound: float | None
    rrf: float | None
    numerator: float
    denominator: float
    coefficients: ClopaCoefficients | None = None

    @property
    def feasible(self) -> bool:
        return self.rrf is not None


def cyber_failure_probs(posture: SecurityPosture) -> CyberFailureProbs:
    """Closed-form compromise probabilities induced by a posture.

    A system is compromised either by a direct attack or by a pivot that
    follows a successful direct attack on the other system; the two
    attack campaigns are independent, the pivot is conditional on its
    origin succeeding.
    """
    ab = float(posture.p_ab)
    as_ = float(posture.p_as)
    abs_ = float(posture.p_abs)
    asb = float(posture.p_asb)

    p_bc = ab + as_ * asb - ab * as_ * asb
    p_sc = as_ + ab * abs_ - ab * as_ * abs_
    p_joint = ab * (as_ + abs_) + as_ * asb - ab * as_ * (abs_ + asb)
    return CyberFailureProbs(p_bc=p_bc, p_sc=p_sc, p_joint=p_joint)


def joint_sis_bpcs_failure(
    p_sp: Probability | float,
    p_bp: Probability | float,
    cyber: CyberFailureProbs,
) -> float:
    """Probability that the SIS and the BPCS are both failed.

    Physical failures of the two systems are independent of each other
    and of the attack outcome; each system fails if it fails physically
    or is compromised.
    """
    x = float(Probability.of(p_sp))
    b = float(Probability.of(p_bp))
    return (
        x * (b * (1.0 - cyber.p_bc - cyber.p_sc) + cyber.p_bc)
        + cyber.p_sc * b
        + cyber.p_joint * (1.0 - x) * (1.0 - b)
    )


def expected_hazard_rate(
    scenario: LopaScenario,
    p_sp: Probability | float,
    posture: SecurityPosture,
) -> float:
    """Expected mitigated hazard rate (per year) for a given SIS PFD.

    Initiating events and the aggregated attack row pass only when both
    the SIS and the BPCS fail along with the credited layers; the
    physical-BPCS-failure row already has the BPCS down and needs only
    total SIS failure.
    """
    cyber = cyber_failure_probs(posture)
    x = float(Probability.of(p_sp))
    b = float(scenario.bpcs.pfd_physical)
    p_joint_sb = joint_sis_bpcs_failure(x, b, cyber)
    p_s_total = x + cyber.p_sc - x * cyber.p_sc

    base = sum(
        float(ev.likelihood) * float(ev.layer_pfd_product)
        for ev in scenario.initiating_events
    )
    base += float(scenario.bpcs.layer_pfd_product) * float(scenario.bpcs.lambda_cyber)
    return (
        p_joint_sb * base
        + p_s_total
        * float(scenario.bpcs.layer_pfd_product)
        * float(scenario.bpcs.lambda_physical)
    )


def lopa_coefficients(scenario: LopaScenario) -> tuple[float, float, float]:
    """Fold the LOPA sheet into the bound constants (alpha1, alpha2, beta).

    alpha1 collects the hazard pathways that already include physical
    BPCS failure (plus the BPCS-initiated row itself); alpha2 collects
    the same pathways without it, which is the share an attacker can
    convert by compromising the BPCS. beta is the TMEL.
    """
    base = sum(
        float(ev.likelihood) * float(ev.layer_pfd_product)
        for ev in scenario.initiating_events
    )
    base += float(scenario.bpcs.layer_pfd_product) * float(scenario.bpcs.lambda_cyber)
    b = float(scenario.bpcs.pfd_physical)
    alpha1 = b * base + float(scenario.bpcs.layer_pfd_product) * float(
        scenario.bpcs.lambda_physical
    )
    alpha2 = (1.0 - b) * base
    return alpha1, alpha2, float(scenario.tmel)


def clopa_coefficients(
    scenario: LopaScenario, posture: SecurityPosture
) -> ClopaCoefficients:
    """Bound constants with the BPCS-side posture folded in.

    gamma1..gamma3 absorb the direct-BPCS-attack and SIS-to-BPCS pivot
    probabilities, leaving the SIS-side attack probabilities (p_as,
    p_abs) as the free design variables. zeta1..zeta3 are the constants
    of the closed-form RRF error against classical LOPA.
    """
    alpha1, alpha2, beta = lopa_coefficients(scenario)
    ab = float(posture.p_ab)
    asb = float(posture.p_asb)

    gamma1 = alpha1 + alpha2 * (ab + asb * (1.0 - ab))
    gamma2 = (alpha1 + alpha2) * ab
    gamma3 = alpha1 + alpha2 * ab
    zeta1 = beta * alpha2 * ab
    zeta2 = alpha1 * gamma1 - beta * gamma3
    zeta3 = gamma2 * (alpha1 - beta)
    return ClopaCoefficients(
        alpha1=alpha1,
        alpha2=alpha2,
        beta=beta,
        gamma1=gamma1,
        gamma2=gamma2,
        gamma3=gamma3,
        zeta1=zeta1,
        zeta2=zeta2,
        zeta3=zeta3,
    )


def _bound_from_fraction(
    numerator: float,
    denominator: float,
    coefficients: ClopaCoefficients | None,
) -> BoundResult:
    if denominator <= 0.0:
        raise DegenerateDenominatorError(
            f"bound denominator must be positive, got {denominator!r}"
        )
    if numerator < 0.0:
        return BoundResult(
            pfd_bound=None,
            rrf=None,
            numerator=numerator,
            denominator=denominator,
            coefficients=coefficients,
        )
    pfd = numerator / denominator
    if pfd == 0.0:
        # The bound pins the SIS at zero failure probability, which no
        # real design verifies; report the bound but no finite RRF.
        return BoundResult(
            pfd_bound=0.0,
            rrf=None,
            numerator=numerator,
            denominator=denominator,
            coefficients=coefficients,
        )
    pfd = min(pfd, 1.0)
    return BoundResult(
        pfd_bound=pfd,
        rrf=1.0 / pfd,
        numerator=numerator,
        denominator=denominator,
        coefficients=coefficients,
    )


def bound_at(
    coefficients: ClopaCoefficients,
    p_as: Probability | float,
    p_abs: Probability | float,
) -> BoundResult:
    """Required-PFD bound at a point of the SIS-side design plane."""
    x = float(Probability.of(p_as))
    y = float(Probability.of(p_abs))
    numerator = (
        coefficients.beta
        - coefficients.gamma1 * x
        - coefficients.gamma2 * y * (1.0 - x)
    )
    denominator = (1.0 - x) * (coefficients.gamma3 - coefficients.gamma2 * y)
    return _bound_from_fraction(numerator, denominator, coefficients)


def sis_pfd_bound(scenario: LopaScenario, posture: SecurityPosture) -> BoundResult:
    """Required-PFD bound in design-variable form.

    Folds the scenario and the BPCS-side posture into coefficients and
    evaluates the bound at the posture's own (p_as, p_abs).
    """
    coefficients = clopa_coefficients(scenario, posture)
    return bound_at(coefficients, posture.p_as, posture.p_abs)


def sis_pfd_bound_general(
    scenario: LopaScenario, cyber: CyberFailureProbs
) -> BoundResult:
    """Required-PFD bound in cyber-probability form.

    Takes the compromise probabilities directly, without assuming how
    they decompose into a posture; useful when they come from another
    assessment. Coefficients cannot be folded without the posture, so
    the result carries None there.
    """
    alpha1, alpha2, beta = lopa_coefficients(scenario)
    numerator = beta - (alpha1 * cyber.p_sc + alpha2 * cyber.p_joint)
    denominator = alpha1 * (1.0 - cyber.p_sc) + alpha2 * (cyber.p_bc - cyber.p_joint)
    return _bound_from_fraction(numerator, denominator, None)


def classical_lopa(scenario: LopaScenario) -> BoundResult:
    """Required-PFD bound ignoring the adversary entirely.

    Identical to the design-variable bound at the all-zero posture: the
    required PFD is the TMEL over the hazard rate that physical BPCS
    failure alone lets through.
    """
    coefficients = clopa_coefficients(scenario, SecurityPosture.zero())
    return _bound_from_fraction(
        coefficients.beta, coefficients.alpha1, coefficients
    )


def rrf_error(scenario: LopaScenario, posture: SecurityPosture) -> float:
    """Closed-form RRF gap between cyber-aware and classical LOPA.

    This is how much risk reduction classical LOPA under-asks for at the
    given posture. It equals the direct subtraction of the two RRFs but
    is computed from the zeta constants, which makes the minimum over
    the design plane (zeta1 / beta**2, at the origin) explicit.

    Raises:
        InfeasiblePointError: The posture lies outside the feasible
            design region, where no finite requirement exists.
        DegenerateDenominatorError: The scenario admits no classical
            requirement (alpha1 = 0) or the bound denominator vanishes.
    """
    c = clopa_coefficients(scenario, posture)
    x = float(posture.p_as)
    y = float(posture.p_abs)
    if c.alpha1 <= 0.0:
        raise DegenerateDenominatorError("classical LOPA requires alpha1 > 0")
    denominator = (1.0 - x) * (c.gamma3 - c.gamma2 * y)
    if denominator <= 0.0:
        raise DegenerateDenominatorError(
            f"bound denominator must be positive, got {denominator!r}"
        )
    slack = c.beta - c.gamma1 * x - c.gamma2 * y * (1.0 - x)
    if slack <= 0.0:
        raise InfeasiblePointError(
            "posture lies outside the feasible design region"
        )
    return (c.zeta1 + c.zeta2 * x + c.zeta3 * y * (1.0 - x)) / (c.beta * slack)


def min_rrf_error(coefficients: ClopaCoefficients) -> float:
    """Smallest possible RRF gap over the design plane (at the origin)."""
    if coefficients.beta <= 0.0:
        raise DegenerateDenominatorError("beta must be positive")
    return coefficients.zeta1 / (coefficients.beta * coefficients.beta)
