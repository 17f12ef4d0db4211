"""Packing convex geometric graphs and ordered graphs into complete hosts."""

__version__ = "0.1.0"

from .errors import (
    CggError,
    CompositionError,
    InvalidEdgeError,
    ModeError,
    ParameterError,
    ParseError,
    PreconditionError,
    RouteError,
    VerificationError,
)
from .graphs import (
    Cgg,
    Embedding,
    IntervalPartition,
    OrderedGraph,
    average_edge_length,
    blowup,
    chromatic_number,
    cyclic_chromatic_number,
    edge_length,
    enumerate_embeddings,
    interval_chromatic_number,
    irregular_blowup_k3,
    irregular_blowup_sizes,
    ordered_path,
    plane_cycle,
)
from .weighted import (
    RotationClass,
    WeightedCgg,
    figure_configurations,
    long_edge_condition,
    uniformize_by_rotation,
    weighted_representation,
)
from .lp import (
    CompressedMatrix,
    FeasibilityOutcome,
    compressed_matrix,
    fractional_packing_from_solution,
    k4_witness_m,
    kk_witness_m,
    minimal_feasible_m,
    solve_feasibility,
    verify_fractional_packing,
)
from .packing import (
    Packing,
    VerificationReport,
    compose_packings,
    disjoint_length_design,
    greedy_maximal_packing,
    rotation_schedule_packing,
    verify_packing,
)
from .hypergraph import CopyHypergraph, build_copy_hypergraph, nibble_matching
from .pipeline import pack_chi_le4, pack_ordered_chi3
from .obstruction import LengthProfile, coverage_upper_bound, length_profile, max_copy_total_length

__all__ = [
    "CggError",
    "CompositionError",
    "InvalidEdgeError",
    "ModeError",
    "ParameterError",
    "ParseError",
    "PreconditionError",
    "RouteError",
    "VerificationError",
    "Cgg",
    "Embedding",
    "IntervalPartition",
    "OrderedGraph",
    "average_edge_length",
    "blowup",
    "chromatic_number",
    "cyclic_chromatic_number",
    "edge_length",
    "enumerate_embeddings",
    "interval_chromatic_number",
    "irregular_blowup_k3",
    "irregular_blowup_sizes",
    "ordered_path",
    "plane_cycle",
    "RotationClass",
    "WeightedCgg",
    "figure_configurations",
    "long_edge_condition",
    "uniformize_by_rotation",
    "weighted_representation",
    "CompressedMatrix",
    "FeasibilityOutcome",
    "compressed_matrix",
    "fractional_packing_from_solution",
    "k4_witness_m",
    "kk_witness_m",
    "minimal_feasible_m",
    "solve_feasibility",
    "verify_fractional_packing",
    "Packing",
    "VerificationReport",
    "compose_packings",
    "disjoint_length_design",
    "greedy_maximal_packing",
    "rotation_schedule_packing",
    "verify_packing",
    "CopyHypergraph",
    "build_copy_hypergraph",
    "nibble_matching",
    "pack_chi_le4",
    "pack_ordered_chi3",
    "LengthProfile",
    "coverage_upper_bound",
    "length_profile",
    "max_copy_total_length",
]
