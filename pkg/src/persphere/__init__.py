"""Persistence spheres: stable, invertible functional summaries of persistence diagrams."""

__version__ = "0.1.0"

from .diagram import (DiagramPoint, PartialMatching, PersistenceDiagram, make_diagram,
                      total_persistence, w1_bruteforce, w1_distance)
from .sphere import SphereField, SphereGrid, evaluate_ps, lp_distance, make_grid, to_feature_vector
from .weighting import Weighting, estimate_constants, unstable_weight
from .zonoid import LiftZonoid, hausdorff, lift_zonoid, support

__all__ = [
    "DiagramPoint", "PartialMatching", "PersistenceDiagram", "make_diagram", "total_persistence",
    "w1_bruteforce", "w1_distance", "SphereField", "SphereGrid", "evaluate_ps", "lp_distance",
    "make_grid", "to_feature_vector", "Weighting", "estimate_constants", "unstable_weight",
    "LiftZonoid", "hausdorff", "lift_zonoid", "support",
]
