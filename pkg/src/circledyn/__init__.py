"""Markov partitions, classification and conjugacies for covering maps of the circle."""

from .geometry import Arc, CirclePoint, MoebiusTransform, disk_moebius_from_constraints, orthogonal_disk
from .circle_maps import (
    BlaschkeProduct,
    ConjugatedMap,
    CoveringMap,
    PiecewiseMoebius,
    PowerMap,
    RationalMap,
)

__all__ = [
    "Arc",
    "BlaschkeProduct",
    "CirclePoint",
    "ConjugatedMap",
    "CoveringMap",
    "MoebiusTransform",
    "PiecewiseMoebius",
    "PowerMap",
    "RationalMap",
    "disk_moebius_from_constraints",
    "orthogonal_disk",
]
