"""Design-space figure rendering.

Renders the feasible region boundary, optional iso-RRF contours, and an
optional design point into an image file next to the delimited exports.
matplotlib is imported lazily with the Agg backend so headless use and
plain CSV workflows never pay for it.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from .design_space import sample_boundary, sample_contour
from .model import ClopaCoefficients

logger = logging.getLogger(__name__)

_SAMPLES = 400


def save_design_space_plot(
    coefficients: ClopaCoefficients,
    path: str | Path,
    rrf_levels: Sequence[float] = (),
    design_point: tuple[float, float] | None = None,
) -> None:
    """Render the design plane to an image file.

    Args:
        coefficients: Folded scenario and BPCS-side posture constants.
        path: Output file; the extension picks the format.
        rrf_levels: Iso-RRF contours to draw inside the region.
        design_point: Optional (p_as, p_abs) marker.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    boundary = sample_boundary(coefficients, _SAMPLES)
    xs = [s.p_as for s in boundary]
    ys = [s.p_abs for s in boundary]

    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    ax.plot(xs, ys, color="black", linewidth=1.8, label="feasibility boundary")
    ax.fill_between(xs, 0.0, ys, color="tab:green", alpha=0.12)

    for level in rrf_levels:
        samples = sample_contour(coefficients, level, _SAMPLES)
        ax.plot(
            [s.p_as for s in samples],
            [s.p_abs for s in samples],
            linewidth=1.2,
            label=f"RRF = {level:g}",
        )

    if design_point is not None:
        ax.plot(
            [design_point[0]],
            [design_point[1]],
            marker="o",
            markersize=7,
            color="tab:red",
            linestyle="none",
            label="design point",
        )

    ax.set_xlabel("direct SIS attack probability  p_as")
    ax.set_ylabel("BPCS-to-SIS pivot probability  p_abs")
    ax.set_title("SIS security design space")
    ax.set_xlim(left=0.0)
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="upper right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    logger.info("wrote design-space figure to %s", path)
