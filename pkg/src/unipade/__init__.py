"""Pade approximants of formal power series and universal-series builds."""

from .algebra import (
    FormalPowerSeries,
    Polynomial,
    RationalFunction,
    partial_sum,
    poly_add,
    poly_eval,
    poly_mul,
    poly_scale,
    rational_eval,
    recenter,
    series_of_rational,
)
from .builder import BuildTask, BuildTranscript, Limits, Schedule, Target, build, check_condition, replay
from .construct import (
    ConstructionResult,
    avoid_roots,
    det_in_d_poly,
    lemma23,
    lemma24,
    lemma25,
    lemma61,
    runge_fit,
    shrink_search,
)
from .pade import hankel_det, hankel_matrix, in_D_pq, pade_jacobi, pade_solve, pade_table
from .sets import CompactSet, annulus, bounds, disk, inf_abs, points, rect, sample, sup_norm

__version__ = "0.1.0"

__all__ = [
    "BuildTask",
    "BuildTranscript",
    "CompactSet",
    "ConstructionResult",
    "FormalPowerSeries",
    "Limits",
    "Polynomial",
    "RationalFunction",
    "Schedule",
    "Target",
    "annulus",
    "avoid_roots",
    "bounds",
    "build",
    "check_condition",
    "det_in_d_poly",
    "disk",
    "hankel_det",
    "hankel_matrix",
    "in_D_pq",
    "inf_abs",
    "lemma23",
    "lemma24",
    "lemma25",
    "lemma61",
    "pade_jacobi",
    "pade_solve",
    "pade_table",
    "partial_sum",
    "points",
    "poly_add",
    "poly_eval",
    "poly_mul",
    "poly_scale",
    "rational_eval",
    "recenter",
    "rect",
    "replay",
    "runge_fit",
    "sample",
    "series_of_rational",
    "shrink_search",
    "sup_norm",
]
