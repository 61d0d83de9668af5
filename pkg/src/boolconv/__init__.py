"""Exact finite-depth toolkit for convergence of homomorphisms between Cantor algebras.

Clopen sets of Cantor space at depth ``d`` are bit vectors over ``2**d``
atoms, measures are exact dyadic rationals, and homomorphisms are given by
their dual point maps.
"""
from .dyadic import ClopenSet, DepthError, Dyadic, depth_cap, fn_distance, measure
from .homomorphism import HomFamily, PairMap, PointMap, PointSpec, example_families
from .hamming import Code, perfect_code, verify_perfect
from .badset import build_stages, verify_conditions, window_flip_intersection
from .fence import (
    FenceInstance,
    brute_force_oracle,
    distinguish,
    solve_exact,
    solve_guarantee,
    tight_instance,
)
from .convergence import (
    ClassifyConfig,
    ConvergenceReport,
    InvariantViolation,
    Window,
    classify,
    pointwise_distance,
    pushforward,
    uniform_distance,
    variation_distance,
)

__version__ = "0.1.0"

__all__ = [
    "ClassifyConfig",
    "ClopenSet",
    "Code",
    "ConvergenceReport",
    "DepthError",
    "Dyadic",
    "FenceInstance",
    "HomFamily",
    "InvariantViolation",
    "PairMap",
    "PointMap",
    "PointSpec",
    "Window",
    "brute_force_oracle",
    "build_stages",
    "classify",
    "depth_cap",
    "distinguish",
    "fn_distance",
    "measure",
    "example_families",
    "perfect_code",
    "pointwise_distance",
    "pushforward",
    "solve_exact",
    "solve_guarantee",
    "tight_instance",
    "uniform_distance",
    "variation_distance",
    "verify_conditions",
    "verify_perfect",
    "window_flip_intersection",
]
