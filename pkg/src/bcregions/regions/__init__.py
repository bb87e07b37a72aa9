"""Inner bounds, outer bounds and capacity regions as sampled support functions."""

from .core import (
    RatePoint,
    RateRegion,
    Support,
    directions_from_lambdas,
    lambda_sweep,
    pentagon_support,
    upper_right_hull,
    validate_region,
    weight_breakpoints,
)
from .marton import MartonRTDParams, marton_rtd_sumrate, rtd_sum_rate
from .outer import UVBound, uv_outer_supports
from .superposition import (
    bec_region,
    bec_state_bc,
    superposition_region,
    superposition_support,
    three_bsc_curve,
    three_bsc_region,
    three_bsc_state_bc,
)
from .tdcs import (
    blackwell_state_region,
    common_message_support,
    common_message_supports,
    common_sweep,
    finite_field_pair,
    finite_field_region,
    tdcs_region,
    tdcs_support,
)

__all__ = [
    "MartonRTDParams",
    "RatePoint",
    "RateRegion",
    "Support",
    "UVBound",
    "bec_region",
    "bec_state_bc",
    "blackwell_state_region",
    "common_message_support",
    "common_message_supports",
    "common_sweep",
    "directions_from_lambdas",
    "finite_field_pair",
    "finite_field_region",
    "lambda_sweep",
    "marton_rtd_sumrate",
    "pentagon_support",
    "rtd_sum_rate",
    "superposition_region",
    "superposition_support",
    "tdcs_region",
    "tdcs_support",
    "three_bsc_curve",
    "three_bsc_region",
    "three_bsc_state_bc",
    "upper_right_hull",
    "uv_outer_supports",
    "validate_region",
    "weight_breakpoints",
]
