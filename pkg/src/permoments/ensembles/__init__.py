"""Matrix ensembles, the sub-permanent kernel, exact oracles and samplers."""

from .cycles import CycleType, cycle_type_of, cycle_types, identity_plus_poly, partitions
from .kernel import subpermanent_poly, subpermanent_sum
from .oracles import (
    MeasureKind,
    MomentSpec,
    OracleResult,
    e1_exact,
    e1_exact_naive,
    e1_moments,
    e1_result,
    e_uniform_exact_tiny,
    e_uniform_moments,
    eb_expectation_single,
    eb_product_exact,
    eb_product_exact_tiny,
    pick_e1_method,
    regular_01_matrices,
)
from .sampling import monte_carlo_moment, sample
from .unions import e1_union_moment, eb_union_moment

__all__ = [
    "CycleType",
    "MeasureKind",
    "MomentSpec",
    "OracleResult",
    "cycle_type_of",
    "cycle_types",
    "e1_exact",
    "e1_exact_naive",
    "e1_moments",
    "e1_result",
    "e1_union_moment",
    "e_uniform_exact_tiny",
    "e_uniform_moments",
    "eb_expectation_single",
    "eb_product_exact",
    "eb_product_exact_tiny",
    "eb_union_moment",
    "identity_plus_poly",
    "monte_carlo_moment",
    "partitions",
    "pick_e1_method",
    "regular_01_matrices",
    "sample",
    "subpermanent_poly",
    "subpermanent_sum",
]
