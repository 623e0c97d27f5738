"""Iterative safety and security co-design.

The required RRF depends on the security posture, but hardening or
redesigning the SIS changes its attack surface and therefore the
posture. The loop here alternates the two assessments: size the SIS for
the current requirement, re-assess the security posture of the delivered
design, recompute the requirement, and stop once the recomputed
requirement no longer exceeds the one the design was built to. The SIS
sizing and the security assessment are external concerns, supplied as
oracles; a scripted oracle pair is included for replaying recorded
engineering responses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Protocol, Sequence

from .design_space import contour_pabs
from .engine import InfeasiblePointError, clopa_coefficients, bound_at, sis_pfd_bound
from .model import (
    ClopaError,
    DesignPoint,
    LopaScenario,
    Probability,
    SecurityPosture,
)

CONVERGED = "CONVERGED"
MAX_ITERATIONS = "MAX_ITERATIONS"
ORACLE_FAILURE = "ORACLE_FAILURE"


class OracleFailure(ClopaError):
    code = "ORACLE_FAILURE"


class PasOutOfRangeError(ClopaError):
    code = "PAS_OUT_OF_RANGE"


@dataclass(frozen=True)
class DesignResponse:
    """A SIS design delivered against a target RRF."""

    architecture: str
    verified_rrf: float


@dataclass(frozen=True)
class SecurityAssessment:
    """SIS-side attack probabilities assessed for a concrete design."""

    p_as: Probability
    p_abs: Probability

    def __post_init__(self):
        object.__setattr__(self, "p_as", Probability.of(self.p_as))
        object.__setattr__(self, "p_abs", Probability.of(self.p_abs))


class SisDesignOracle(Protocol):
    """Sizes and verifies a SIS for a target RRF."""

    def __call__(self, target_rrf: float) -> DesignResponse: ...


class SecurityAssessor(Protocol):
    """Assesses the SIS-side attack probabilities of a delivered design."""

    def __call__(self, architecture: str) -> SecurityAssessment: ...


@dataclass(frozen=True)
class ScriptedResponse:
    """One recorded engineering round: the design's verified RRF and the
    posture found by the subsequent security assessment."""

    verified_rrf: float
    p_as: Probability
    p_abs: Probability

    def __post_init__(self):
        v = self.verified_rrf
        if not isinstance(v, (int, float)) or not math.isfinite(float(v)) or float(v) <= 0:
            raise ClopaError(
                f"verified_rrf must be positive, got {v!r}", code="SCHEMA_ERROR"
            )
        object.__setattr__(self, "verified_rrf", float(v))
        object.__setattr__(self, "p_as", Probability.of(self.p_as))
        object.__setattr__(self, "p_abs", Probability.of(self.p_abs))


class ScriptedOracles:
    """Oracle pair replaying a recorded response table in order.

    Each loop iteration consumes one table entry: ``design`` hands out
    the entry's verified RRF under a synthetic architecture label, and
    ``assess`` returns the same entry's posture for that label. Running
    past the end of the table raises OracleFailure.
    """

    def __init__(self, responses: Sequence[ScriptedResponse], label: str = "scripted"):
        self._responses = tuple(responses)
        self._label = label
        self._next = 0
        self._pending: dict[str, ScriptedResponse] = {}

    def design(self, target_rrf: float) -> DesignResponse:
        if self._next >= len(self._responses):
            raise OracleFailure(
                f"script exhausted after {len(self._responses)} responses "
                f"(target RRF {target_rrf!r})"
            )
        entry = self._responses[self._next]
        self._next += 1
        architecture = f"{self._label}-{self._next}"
        self._pending[architecture] = entry
        return DesignResponse(architecture=architecture, verified_rrf=entry.verified_rrf)

    def assess(self, architecture: str) -> SecurityAssessment:
        entry = self._pending.pop(architecture, None)
        if entry is None:
            raise OracleFailure(f"no scripted assessment for {architecture!r}")
        return SecurityAssessment(p_as=entry.p_as, p_abs=entry.p_abs)


@dataclass(frozen=True)
class IterationRecord:
    """One round of the loop. ``recomputed_rrf`` is None when the
    assessed posture fell outside the feasible region; partial fields
    stay None when an oracle failed mid-round."""

    index: int
    target_rrf: float
    verified_rrf: float | None = None
    architecture: str | None = None
    p_as: float | None = None
    p_abs: float | None = None
    recomputed_rrf: float | None = None


@dataclass(frozen=True)
class CodesignTrace:
    """Full history of a co-design run."""

    outcome: str
    initial_rrf: float
    iterations: tuple[IterationRecord, ...]
    final: DesignPoint | None
    detail: str = ""

    @property
    def converged(self) -> bool:
        return self.outcome == CONVERGED


def initial_design_point(
    scenario: LopaScenario,
    posture: SecurityPosture,
    rrf_target: float,
    p_as: Probability | float,
) -> DesignPoint:
    """Entry point of the loop: pick a posture on an iso-RRF contour.

    Only the BPCS-side components of ``posture`` matter here; p_abs is
    placed on the contour of the target RRF at the chosen p_as.

    Raises:
        PasOutOfRangeError: The chosen p_as lies outside the contour's
            horizontal extent.
        RrfBelowMinimumError, DegenerateContourError: Propagated from
            the contour equation.
    """
    coefficients = clopa_coefficients(scenario, posture)
    p_abs = contour_pabs(coefficients, rrf_target, p_as)
    if p_abs is None:
        raise PasOutOfRangeError(
            f"p_as {float(Probability.of(p_as))!r} is outside the contour of "
            f"RRF {rrf_target!r}"
        )
    bound = bound_at(coefficients, p_as, p_abs)
    return DesignPoint(
        p_as=Probability.of(p_as),
        p_abs=Probability(p_abs),
        pfd_bound=bound.pfd_bound,
        rrf=bound.rrf,
    )


def run_codesign(
    scenario: LopaScenario,
    posture: SecurityPosture,
    design_oracle: SisDesignOracle | Callable[[float], DesignResponse],
    security_oracle: SecurityAssessor | Callable[[str], SecurityAssessment],
    max_iterations: int = 20,
    initial_rrf: float | None = None,
) -> CodesignTrace:
    """Run the co-design loop to a fixed point.

    The BPCS-side posture components are frozen for the whole run; each
    round replaces only the SIS-side components with the security
    oracle's assessment of the freshly designed system. A round
    converges when the recomputed requirement no longer exceeds the
    target the design was built to (so equal requirements converge). A
    recomputed-infeasible posture is recorded as such and pushes the
    next target to infinity, which no finite design can meet.

    Args:
        initial_rrf: Starting requirement; defaults to the bound at the
            given posture's own (p_as, p_abs), which must be feasible.

    Raises:
        InfeasiblePointError: No ``initial_rrf`` was given and the
            posture itself is infeasible.
    """
    if max_iterations < 1:
        raise ClopaError(
            f"max_iterations must be >= 1, got {max_iterations!r}",
            code="DEGENERATE_CONFIG",
        )
    if initial_rrf is None:
        start = sis_pfd_bound(scenario, posture)
        if not start.feasible:
            raise InfeasiblePointError(
                "initial posture is infeasible; pass an explicit initial_rrf"
            )
        required = start.rrf
    else:
        required = float(initial_rrf)
    start_rrf = required

    records: list[IterationRecord] = []
    for index in range(1, max_iterations + 1):
        target = required
        try:
            response = design_oracle(target)
        except OracleFailure as failure:
            records.append(IterationRecord(index=index, target_rrf=target))
            return CodesignTrace(
                outcome=ORACLE_FAILURE,
                initial_rrf=start_rrf,
                iterations=tuple(records),
                final=None,
                detail=str(failure),
            )
        if response.verified_rrf < target:
            records.append(
                IterationRecord(
                    index=index,
                    target_rrf=target,
                    verified_rrf=response.verified_rrf,
                    architecture=response.architecture,
                )
            )
            return CodesignTrace(
                outcome=ORACLE_FAILURE,
                initial_rrf=start_rrf,
                iterations=tuple(records),
                final=None,
                detail=(
                    f"design oracle delivered RRF {response.verified_rrf!r} "
                    f"below the target {target!r}"
                ),
            )
        try:
            assessment = security_oracle(response.architecture)
        except OracleFailure as failure:
            records.append(
                IterationRecord(
                    index=index,
                    target_rrf=target,
                    verified_rrf=response.verified_rrf,
                    architecture=response.architecture,
                )
            )
            return CodesignTrace(
                outcome=ORACLE_FAILURE,
                initial_rrf=start_rrf,
                iterations=tuple(records),
                final=None,
                detail=str(failure),
            )

        assessed = replace(
            posture, p_as=assessment.p_as, p_abs=assessment.p_abs
        )
        bound = sis_pfd_bound(scenario, assessed)
        records.append(
            IterationRecord(
                index=index,
                target_rrf=target,
                verified_rrf=response.verified_rrf,
                architecture=response.architecture,
                p_as=float(assessment.p_as),
                p_abs=float(assessment.p_abs),
                recomputed_rrf=bound.rrf,
            )
        )
        if bound.feasible and bound.rrf <= target:
            return CodesignTrace(
                outcome=CONVERGED,
                initial_rrf=start_rrf,
                iterations=tuple(records),
                final=DesignPoint(
                    p_as=assessment.p_as,
                    p_abs=assessment.p_abs,
                    pfd_bound=bound.pfd_bound,
                    rrf=bound.rrf,
                ),
            )
        required = bound.rrf if bound.feasible else math.inf

    return CodesignTrace(
        outcome=MAX_ITERATIONS,
        initial_rrf=start_rrf,
        iterations=tuple(records),
        final=None,
        detail=f"no fixed point within {max_iterations} iterations",
    )
