"""Core domain types for cyber layer of protection analysis.

A LOPA scenario couples a hazard's tolerable mitigated event likelihood
(TMEL) with the initiating events, independent protection layers, and the
basic process control system (BPCS) that stand between cause and
consequence. The security posture captures how likely a capable adversary
is to compromise the control system or the safety system, directly or by
pivoting from one to the other. Everything downstream (required PFD
bounds, design regions, the co-design loop) is computed from these two
objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields


class ClopaError(Exception):
    """Base class for all typed errors raised by this package.

    Every subclass carries a stable machine-readable ``code`` so callers
    (and the CLI) can branch on failure kind without parsing messages.
    """

    code = "CLOPA_ERROR"

    def __init__(self, message: str, *, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ProbabilityRangeError(ClopaError):
    code = "PROBABILITY_RANGE"


class RateRangeError(ClopaError):
    code = "RATE_RANGE"


@dataclass(frozen=True, order=True)
class Probability:
    """A probability in [0, 1], validated at construction."""

    value: float

    def __post_init__(self):
        v = self.value
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ProbabilityRangeError(f"probability must be numeric, got {v!r}")
        v = float(v)
        if not math.isfinite(v) or v < 0.0 or v > 1.0:
            raise ProbabilityRangeError(f"probability must lie in [0, 1], got {v!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def of(cls, value: "Probability | float | int") -> "Probability":
        """Coerce a raw number into a validated Probability."""
        if isinstance(value, Probability):
            return value
        return cls(value)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True, order=True)
class Rate:
    """A nonnegative event rate (per year), validated at construction."""

    value: float

    def __post_init__(self):
        v = self.value
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise RateRangeError(f"rate must be numeric, got {v!r}")
        v = float(v)
        if not math.isfinite(v) or v < 0.0:
            raise RateRangeError(f"rate must be finite and >= 0, got {v!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def of(cls, value: "Rate | float | int") -> "Rate":
        if isinstance(value, Rate):
            return value
        return cls(value)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class InitiatingEvent:
    """One initiating-event row of the LOPA sheet.

    Attributes:
        name: Unique row label.
        likelihood: Unmitigated initiating event frequency (per year).
        layer_pfd_product: Product of the row's protection layer PFDs,
            i.e. the probability that every credited layer fails on demand.
    """

    name: str
    likelihood: Rate
    layer_pfd_product: Probability

    def __post_init__(self):
        object.__setattr__(self, "likelihood", Rate.of(self.likelihood))
        object.__setattr__(
            self, "layer_pfd_product", Probability.of(self.layer_pfd_product)
        )


@dataclass(frozen=True)
class BpcsParams:
    """Failure model of the basic process control system.

    Attributes:
        pfd_physical: Probability the BPCS fails on demand for purely
            physical (non-cyber) reasons.
        lambda_physical: Rate of process upsets initiated by physical BPCS
            failure (per year).
        lambda_cyber: Aggregated rate of cyberattack-initiated process
            upsets (per year).
        layer_pfd_product: Product of the protection layer PFDs credited
            on the BPCS-initiated rows of the LOPA sheet.
    """

    pfd_physical: Probability
    lambda_physical: Rate
    lambda_cyber: Rate
    layer_pfd_product: Probability

    def __post_init__(self):
        object.__setattr__(self, "pfd_physical", Probability.of(self.pfd_physical))
        object.__setattr__(self, "lambda_physical", Rate.of(self.lambda_physical))
        object.__setattr__(self, "lambda_cyber", Rate.of(self.lambda_cyber))
        object.__setattr__(
            self, "layer_pfd_product", Probability.of(self.layer_pfd_product)
        )


@dataclass(frozen=True)
class AttackerSource:
    """One adversary class contributing to the aggregated attack rate."""

    name: str
    attempts_per_year: Rate
    success_probability: Probability

    def __post_init__(self):
        object.__setattr__(self, "attempts_per_year", Rate.of(self.attempts_per_year))
        object.__setattr__(
            self, "success_probability", Probability.of(self.success_probability)
        )


@dataclass(frozen=True)
class LopaScenario:
    """A complete LOPA sheet for one hazard."""

    hazard: str
    tmel: Rate
    initiating_events: tuple[InitiatingEvent, ...]
    bpcs: BpcsParams

    def __post_init__(self):
        object.__setattr__(self, "tmel", Rate.of(self.tmel))
        object.__setattr__(
            self, "initiating_events", tuple(self.initiating_events)
        )


@dataclass(frozen=True)
class SecurityPosture:
    """Attack success probabilities for the control and safety systems.

    Attributes:
        p_ab: Probability of a successful direct attack on the BPCS.
        p_as: Probability of a successful direct attack on the SIS.
        p_abs: Probability the attacker pivots to the SIS after
            compromising the BPCS.
        p_asb: Probability the attacker pivots to the BPCS after
            compromising the SIS.
    """

    p_ab: Probability
    p_as: Probability
    p_abs: Probability
    p_asb: Probability

    def __post_init__(self):
        for name in ("p_ab", "p_as", "p_abs", "p_asb"):
            object.__setattr__(self, name, Probability.of(getattr(self, name)))

    @classmethod
    def zero(cls) -> "SecurityPosture":
        """The no-adversary posture; reduces every result to classical LOPA."""
        return cls(p_ab=0.0, p_as=0.0, p_abs=0.0, p_asb=0.0)


@dataclass(frozen=True)
class ClopaCoefficients:
    """Scenario constants of the required-PFD bound.

    ``alpha1``/``alpha2`` fold the LOPA sheet into the hazard-rate budget
    (the parts that do and do not already include physical BPCS failure).
    ``gamma1``..``gamma3`` additionally fold in the BPCS-side attack
    posture, leaving the SIS-side attack probabilities as free design
    variables. ``zeta1``..``zeta3`` are the derived constants of the
    closed-form RRF error between cyber-aware and classical LOPA. All are
    plain reals; ``beta`` is the TMEL.
    """

    alpha1: float
    alpha2: float
    beta: float
    gamma1: float
    gamma2: float
    gamma3: float
    zeta1: float
    zeta2: float
    zeta3: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or not math.isfinite(float(v)):
                raise ClopaError(
                    f"coefficient {f.name} must be finite, got {v!r}",
                    code="DEGENERATE_COEFFICIENTS",
                )
            object.__setattr__(self, f.name, float(v))
        for name in ("alpha1", "alpha2", "beta", "gamma1", "gamma2", "gamma3"):
            if getattr(self, name) < 0.0:
                raise ClopaError(
                    f"coefficient {name} must be >= 0",
                    code="DEGENERATE_COEFFICIENTS",
                )


@dataclass(frozen=True)
class DesignPoint:
    """A candidate (p_as, p_abs) security design with its required bound.

    ``pfd_bound`` and ``rrf`` are None when the point is infeasible, i.e.
    no positive SIS failure probability satisfies the TMEL there.
    Infeasibility is an ordinary value, not an exception, because design
    space sweeps and the co-design loop must walk through such points.
    """

    p_as: Probability
    p_abs: Probability
    pfd_bound: float | None
    rrf: float | None

    def __post_init__(self):
        object.__setattr__(self, "p_as", Probability.of(self.p_as))
        object.__setattr__(self, "p_abs", Probability.of(self.p_abs))

    @property
    def feasible(self) -> bool:
        return self.rrf is not None


@dataclass(frozen=True)
class ValidationIssue:
    """One violated scenario invariant, with a machine-readable code."""

    code: str
    path: str
    message: str


def _check_probability(issues: list[ValidationIssue], path: str, value) -> None:
    v = float(value)
    if not math.isfinite(v) or v < 0.0 or v > 1.0:
        issues.append(
            ValidationIssue(
                code="PROBABILITY_RANGE",
                path=path,
                message=f"{path} must lie in [0, 1], got {v!r}",
            )
        )


def _check_rate(issues: list[ValidationIssue], path: str, value) -> None:
    v = float(value)
    if not math.isfinite(v) or v < 0.0:
        issues.append(
            ValidationIssue(
                code="RATE_RANGE",
                path=path,
                message=f"{path} must be finite and >= 0, got {v!r}",
            )
        )


def validate_scenario(scenario: LopaScenario) -> list[ValidationIssue]:
    """Check every scenario invariant and report all violations.

    Construction already rejects out-of-range probabilities and rates, so
    on a normally built scenario this reports only cross-field problems
    (nonpositive TMEL, empty event list, duplicate row names). The range
    checks are still re-walked defensively so a scenario assembled by
    other means is diagnosed rather than trusted.

    Returns:
        A list of ValidationIssue, empty when the scenario is sound.
    """
    issues: list[ValidationIssue] = []

    _check_rate(issues, "tmel", scenario.tmel)
    if not (float(scenario.tmel) > 0.0):
        issues.append(
            ValidationIssue(
                code="TMEL_NONPOSITIVE",
                path="tmel",
                message="tmel must be strictly positive",
            )
        )

    if len(scenario.initiating_events) == 0:
        issues.append(
            ValidationIssue(
                code="NO_INITIATING_EVENTS",
                path="initiating_events",
                message="scenario must list at least one initiating event",
            )
        )

    seen: set[str] = set()
    for i, ev in enumerate(scenario.initiating_events):
        prefix = f"initiating_events[{i}]"
        if not ev.name:
            issues.append(
                ValidationIssue(
                    code="EMPTY_EVENT_NAME",
                    path=f"{prefix}.name",
                    message="initiating event name must be nonempty",
                )
            )
        elif ev.name in seen:
            issues.append(
                ValidationIssue(
                    code="DUPLICATE_EVENT_NAME",
                    path=f"{prefix}.name",
                    message=f"initiating event name {ev.name!r} is not unique",
                )
            )
        seen.add(ev.name)
        _check_rate(issues, f"{prefix}.likelihood", ev.likelihood)
        _check_probability(issues, f"{prefix}.layer_pfd_product", ev.layer_pfd_product)

    _check_probability(issues, "bpcs.pfd_physical", scenario.bpcs.pfd_physical)
    _check_rate(issues, "bpcs.lambda_physical", scenario.bpcs.lambda_physical)
    _check_rate(issues, "bpcs.lambda_cyber", scenario.bpcs.lambda_cyber)
    _check_probability(
        issues, "bpcs.layer_pfd_product", scenario.bpcs.layer_pfd_product
    )

    return issues
