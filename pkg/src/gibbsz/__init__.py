"""Certified cluster-expansion engine for repulsive point processes.

The package approximates the normalized log partition function of a
repulsive pair potential in a centered box, with an explicit additive
error bound.  Cluster coefficients come from a structured mesh with
certified (or adaptively estimated) error figures; a polynomial disk
map carries the truncated Taylor data from a declared zero-free
neighborhood of the activity interval to the target activity.  Brute
force oracles (closed forms, direct quadrature, seeded Monte Carlo,
chain-integral thresholds) cross-check everything the fast path
produces.
"""

from .cache import CoefficientCache
from .cluster import (BoxDomain, ClusterCoefficient, MeshParams, choose_delta,
                      cluster_coefficient, cluster_series, labelled_integral)
from .errors import (BudgetInfeasible, CertificationError, CostCeiling,
                     GibbszError, InputError, MeshInfeasible, Refusal)
from .graphs import (connected_count, connected_graph_masks, edge_labellings,
                     mask_to_edges, partition_indices, spanning_tree)
from .interpolation import (BellTransform, ComposedValue, DiskMap, TaylorBudget,
                            allocate_budget, bell_transform, build_disk_map,
                            compose_and_evaluate, load_preset,
                            preset_clearances, sweep_disk_map,
                            taylor_terms_needed)
from .oracle import (ActivityThreshold, ChainBound, DirectZResult, MonteCarloCk,
                     certified_lambda_threshold, connective_bound,
                     monte_carlo_ck, partition_function_direct, tonks_gas_logZ)
from .pipeline import (LogZResult, VerificationEntry, VerificationReport,
                       ZeroFreeInput, approximate_logZ, heuristic_zero_free,
                       verify_run)
from .potential import (ConvexBody, Potential, ShellDecomposition,
                        TemperednessEstimate, custom_potential, free_potential,
                        hard_core, shell_steps, temperedness_constant)

__version__ = "0.1.0"

__all__ = [
    "ActivityThreshold", "BellTransform", "BoxDomain", "BudgetInfeasible",
    "CertificationError", "ChainBound", "ClusterCoefficient",
    "CoefficientCache", "ComposedValue", "ConvexBody", "CostCeiling",
    "DirectZResult", "DiskMap", "GibbszError", "InputError", "LogZResult",
    "MeshInfeasible", "MeshParams", "MonteCarloCk", "Potential", "Refusal",
    "ShellDecomposition", "TaylorBudget", "TemperednessEstimate",
    "VerificationEntry", "VerificationReport", "ZeroFreeInput",
    "allocate_budget", "approximate_logZ", "bell_transform", "build_disk_map",
    "certified_lambda_threshold", "choose_delta", "cluster_coefficient",
    "cluster_series", "compose_and_evaluate", "connected_count",
    "connected_graph_masks", "connective_bound", "custom_potential",
    "edge_labellings", "free_potential", "hard_core", "heuristic_zero_free",
    "labelled_integral", "load_preset", "mask_to_edges", "monte_carlo_ck",
    "partition_function_direct", "partition_indices", "preset_clearances",
    "shell_steps", "spanning_tree", "sweep_disk_map", "taylor_terms_needed",
    "temperedness_constant", "tonks_gas_logZ", "verify_run",
]
