"""Exact lattice computations for anticanonical pairs (Y, D)."""

from .cones import (
    Effectiveness,
    Status,
    Wall,
    classify_effectiveness,
    construct_nef,
    duval_decompose,
    enumerate_numexc,
    in_actual_ample_cone,
    in_generic_ample_cone,
    noether_reduce,
    wall_equal,
)
from .lattice import (
    IntegerIsometry,
    LatticeClass,
    SubLattice,
    discriminant_group,
    extend_isometry,
    orthogonal_complement,
    pairing,
    reflect,
)
from .pairs import CyclePair, classify, corner_blowup, interior_blowup, lambda_lattice, load_pair, validate
from .pell import pell_fundamental, pell_negative_solvable, represent, unit_action
from .roots import check_isometry, find_R_distinguished, is_root, looijenga_orbit, minus_two_classes

__all__ = [
    "CyclePair", "Effectiveness", "IntegerIsometry", "LatticeClass", "Status", "SubLattice", "Wall",
    "check_isometry", "classify", "classify_effectiveness", "construct_nef", "corner_blowup",
    "discriminant_group", "duval_decompose", "enumerate_numexc", "extend_isometry", "find_R_distinguished",
    "in_actual_ample_cone", "in_generic_ample_cone", "interior_blowup", "is_root", "lambda_lattice",
    "load_pair", "looijenga_orbit", "minus_two_classes", "noether_reduce", "orthogonal_complement",
    "pairing", "pell_fundamental", "pell_negative_solvable", "reflect", "represent", "unit_action",
    "validate", "wall_equal",
]
