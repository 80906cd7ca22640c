"""Bramble construction and certification in undirected graphs."""

__version__ = "0.1.0"

from .bramble import (
    Bramble,
    certificate_report,
    congestion,
    grid_cross_bramble,
    lift_bramble,
    order_exact,
    order_fractional,
    verify_bramble,
)
from .cutmatch import (
    AdversarialMatchingPlayer,
    FlowMatchingPlayer,
    GameState,
    RandomMatchingPlayer,
    exact_expansion,
    expansion,
    run_game,
    spectral_expansion,
)
from .errors import (
    BrambleForgeError,
    BudgetExceeded,
    CliqueTooSmall,
    DegenerateParameters,
    DisconnectedPair,
    GameNotConverged,
    Infeasible,
    MaxRoundsExceeded,
)
from .flow import ConcurrentFlow, check_flow, flow_congestion, solve_concurrent_flow
from .graph import Graph, SubdivisionModel, Walk, clique, cycle, generate, grid, load_graph, path_graph, subdivide
from .linkage import find_linkage, is_well_linked
from .minors import MinorModel, find_clique_minor, verify_minor_model
from .pathsets import PathOfSetsSystem, compute_parameters, embed_and_assemble, grid_system, verify_system
from .sampler import SamplerConfig, estimate_miss_probability, hit_probability, sample_bramble, sample_walk

__all__ = [
    "__version__",
    "AdversarialMatchingPlayer",
    "Bramble",
    "BrambleForgeError",
    "BudgetExceeded",
    "certificate_report",
    "check_flow",
    "clique",
    "CliqueTooSmall",
    "compute_parameters",
    "ConcurrentFlow",
    "congestion",
    "cycle",
    "DegenerateParameters",
    "DisconnectedPair",
    "embed_and_assemble",
    "estimate_miss_probability",
    "exact_expansion",
    "expansion",
    "find_clique_minor",
    "find_linkage",
    "flow_congestion",
    "FlowMatchingPlayer",
    "GameNotConverged",
    "GameState",
    "generate",
    "Graph",
    "grid",
    "grid_cross_bramble",
    "grid_system",
    "hit_probability",
    "Infeasible",
    "is_well_linked",
    "lift_bramble",
    "load_graph",
    "MaxRoundsExceeded",
    "MinorModel",
    "order_exact",
    "order_fractional",
    "path_graph",
    "PathOfSetsSystem",
    "RandomMatchingPlayer",
    "run_game",
    "sample_bramble",
    "sample_walk",
    "SamplerConfig",
    "solve_concurrent_flow",
    "spectral_expansion",
    "subdivide",
    "SubdivisionModel",
    "verify_bramble",
    "verify_minor_model",
    "verify_system",
    "Walk",
]
