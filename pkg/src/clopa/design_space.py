"""Geometry of the SIS-side security design plane.

With the scenario and the BPCS-side posture folded into coefficients,
the required PFD depends only on the direct-SIS-attack probability
(p_as, horizontal axis) and the BPCS-to-SIS pivot probability (p_abs,
vertical axis). This module maps that plane: the feasible region where a
finite requirement exists, its outer boundary, iso-RRF contours, the
gradient of the required RRF, and uniform samplers for export.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import InfeasiblePointError
from .model import ClopaCoefficients, ClopaError, Probability

# Sample grids stop a hair below the open upper end of the feasible
# p_as range; the bound itself is undefined at the end point.
_OPEN_END_MARGIN = 1e-9


class DegenerateCoefficientsError(ClopaError):
    code = "DEGENERATE_COEFFICIENTS"


class RrfBelowMinimumError(ClopaError):
    code = "RRF_BELOW_MINIMUM"


class DegenerateContourError(ClopaError):
    code = "DEGENERATE"


@dataclass(frozen=True)
class RegionLimits:
    """Extent of the feasible design region and the requirement floor.

    Attributes:
        max_pas: Largest feasible direct-SIS-attack probability (at
            p_abs = 0), capped at 1.
        max_pabs: Largest feasible pivot probability (at p_as = 0),
            capped at 1.
        rrf_min: Required RRF at the origin; no point of the plane
            requires less.
    """

    max_pas: float
    max_pabs: float
    rrf_min: float


@dataclass(frozen=True)
class CurveSample:
    """One (p_as, p_abs) point of an exported curve."""

    p_as: float
    p_abs: float


def feasibility_slack(
    coefficients: ClopaCoefficients,
    p_as: Probability | float,
    p_abs: Probability | float,
) -> float:
    """Remaining TMEL budget at a design point; negative means infeasible."""
    x = float(Probability.of(p_as))
    y = float(Probability.of(p_abs))
    return (
        coefficients.beta
        - coefficients.gamma1 * x
        - coefficients.gamma2 * y * (1.0 - x)
    )


def in_design_region(
    coefficients: ClopaCoefficients,
    p_as: Probability | float,
    p_abs: Probability | float,
) -> bool:
    """Whether a finite (or boundary) requirement exists at the point."""
    return feasibility_slack(coefficients, p_as, p_abs) >= 0.0


def boundary_pabs(
    coefficients: ClopaCoefficients, p_as: Probability | float
) -> float | None:
    """Pivot probability on the feasibility boundary at a given p_as.

    Returns None when the boundary leaves the unit square at that p_as
    (no admissible pivot probability there, or every pivot probability
    is feasible only outside [0, 1]).

    Raises:
        DegenerateCoefficientsError: gamma2 = 0, i.e. the BPCS-side
            posture gives the pivot no effect and the boundary is not a
            curve in this plane.
    """
    if coefficients.gamma2 <= 0.0:
        raise DegenerateCoefficientsError(
            "boundary requires gamma2 > 0; the pivot has no effect"
        )
    x = float(Probability.of(p_as))
    if x >= 1.0:
        return None
    y = (coefficients.beta - coefficients.gamma1 * x) / (
        coefficients.gamma2 * (1.0 - x)
    )
    if y < 0.0 or y > 1.0:
        return None
    return y


def contour_pabs(
    coefficients: ClopaCoefficients,
    rrf_target: float,
    p_as: Probability | float,
) -> float | None:
    """Pivot probability at which the required RRF equals a target.

    The contour is expressed with the target as a risk reduction factor;
    the required PFD along it is 1 / rrf_target. As the target grows the
    contour approaches the feasibility boundary.

    Returns None when the contour leaves the unit square at that p_as.

    Raises:
        DegenerateContourError: rrf_target = 1, where the contour
            equation collapses.
        RrfBelowMinimumError: No point of the plane requires so little
            risk reduction (rrf_target <= rrf at the origin).
        DegenerateCoefficientsError: gamma2 = 0.
    """
    if coefficients.gamma2 <= 0.0:
        raise DegenerateCoefficientsError(
            "contour requires gamma2 > 0; the pivot has no effect"
        )
    c = float(rrf_target)
    if c == 1.0:
        raise DegenerateContourError("rrf_target = 1 collapses the contour")
    if coefficients.beta <= 0.0:
        raise DegenerateCoefficientsError("contour requires beta > 0")
    rrf_min = coefficients.gamma3 / coefficients.beta
    if c <= rrf_min:
        raise RrfBelowMinimumError(
            f"rrf_target {c!r} does not exceed the origin requirement {rrf_min!r}"
        )
    x = float(Probability.of(p_as))
    if x >= 1.0:
        return None
    y = (
        c * coefficients.beta
        - coefficients.gamma3
        - (c * coefficients.gamma1 - coefficients.gamma3) * x
    ) / (coefficients.gamma2 * (c - 1.0) * (1.0 - x))
    if y < 0.0 or y > 1.0:
        return None
    return y


def _sample(xs: list[float], value_at) -> list[CurveSample]:
    out: list[CurveSample] = []
    for x in xs:
        y = value_at(x)
        if y is not None:
            out.append(CurveSample(p_as=x, p_abs=y))
    return out


def _grid(upper: float, n: int) -> list[float]:
    if n < 2:
        raise ClopaError("curve sampling needs at least 2 points", code="SAMPLE_COUNT")
    top = upper * (1.0 - _OPEN_END_MARGIN)
    return [top * i / (n - 1) for i in range(n)]


def sample_boundary(
    coefficients: ClopaCoefficients, n: int
) -> list[CurveSample]:
    """Uniform p_as samples of the feasibility boundary.

    The grid spans [0, max feasible p_as), open at the top end; grid
    points where the boundary leaves the unit square are dropped.
    """
    if coefficients.gamma1 <= 0.0:
        raise DegenerateCoefficientsError("boundary sampling requires gamma1 > 0")
    upper = min(coefficients.beta / coefficients.gamma1, 1.0)
    xs = _grid(upper, n)
    return _sample(xs, lambda x: boundary_pabs(coefficients, x))


def sample_contour(
    coefficients: ClopaCoefficients, rrf_target: float, n: int
) -> list[CurveSample]:
    """Uniform p_as samples of an iso-RRF contour.

    The grid spans [0, the contour's p_as intercept), open at the top
    end and capped at 1; out-of-square points are dropped.
    """
    # Raise the contour's own precondition errors before any sampling.
    contour_pabs(coefficients, rrf_target, 0.0)
    c = float(rrf_target)
    denom = c * coefficients.gamma1 - coefficients.gamma3
    if denom <= 0.0:
        upper = 1.0
    else:
        upper = min((c * coefficients.beta - coefficients.gamma3) / denom, 1.0)
    xs = _grid(upper, n)
    return _sample(xs, lambda x: contour_pabs(coefficients, rrf_target, x))


def rrf_gradient(
    coefficients: ClopaCoefficients,
    p_as: Probability | float,
    p_abs: Probability | float,
) -> tuple[float, float]:
    """Gradient of the required RRF with respect to (p_as, p_abs).

    Both components are positive strictly inside the region whenever the
    posture matters at all: any growth in attack or pivot probability
    tightens the requirement.

    Raises:
        InfeasiblePointError: The point is on or outside the boundary.
        DegenerateCoefficientsError: The bound denominator vanishes at
            the point.
    """
    x = float(Probability.of(p_as))
    y = float(Probability.of(p_abs))
    slack = feasibility_slack(coefficients, x, y)
    if slack <= 0.0:
        raise InfeasiblePointError("gradient requires a strictly feasible point")
    denominator = (1.0 - x) * (coefficients.gamma3 - coefficients.gamma2 * y)
    if denominator <= 0.0:
        raise DegenerateCoefficientsError(
            "gradient requires a positive bound denominator"
        )
    n2 = slack * slack
    d_pas = (
        (coefficients.gamma3 - coefficients.gamma2 * y)
        * (coefficients.gamma1 - coefficients.beta)
        / n2
    )
    d_pabs = (
        coefficients.gamma2
        * (1.0 - x)
        * (coefficients.gamma3 * (1.0 - x) + coefficients.gamma1 * x - coefficients.beta)
        / n2
    )
    return d_pas, d_pabs


def region_limits(coefficients: ClopaCoefficients) -> RegionLimits:
    """Feasible extent along each axis and the requirement floor.

    Raises:
        DegenerateCoefficientsError: Any of beta, gamma1, gamma2, gamma3
            is nonpositive; the region is then unbounded or empty in a
            way these limits cannot describe.
    """
    c = coefficients
    if c.beta <= 0.0 or c.gamma1 <= 0.0 or c.gamma2 <= 0.0 or c.gamma3 <= 0.0:
        raise DegenerateCoefficientsError(
            "region limits require beta, gamma1, gamma2, gamma3 all > 0"
        )
    return RegionLimits(
        max_pas=min(c.beta / c.gamma1, 1.0),
        max_pabs=min(c.beta / c.gamma2, 1.0),
        rrf_min=c.gamma3 / c.beta,
    )
