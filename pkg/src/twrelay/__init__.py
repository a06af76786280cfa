"""Beamforming and capacity tools for the two-way multi-antenna relay channel."""

__version__ = "0.1.0"

from .errors import InvalidInputError, NumericalFailureError, RankDeficiencyError
from .model import (
    Beamformer,
    ChannelPair,
    EffectiveChannel,
    PowerConfig,
    RatePair,
    effective,
    gen_channels,
    rate_pair,
    rate_pair_reduced,
    relay_power,
    relay_power_reduced,
    snr_pair_reduced,
)
from .beamformer import (
    BoundaryPoint,
    QcqpBuild,
    RateProfile,
    RegionBoundary,
    build_qcqp,
    capacity_region,
    envelope_value,
    max_sum_rate,
    min_relay_power,
    rate_region_boundary,
    snr_targets,
)
from .bounds import (
    BoundsReport,
    asymptotic_gaps,
    asymptotic_sum_rates,
    bounds_report,
    c12,
    c21,
    c_ub,
    c_ub0,
    c_ub_sym,
    gap_mr_asymptotic,
    gap_zf_asymptotic,
    r_lb_mr,
    r_lb_zf,
)
from .schemes import (
    direct_relay,
    mrr_mrt,
    oneway_alternating,
    scheme_best_rates,
    scheme_max_sum_rate,
    scheme_profile_sum_rate,
    sweep_region,
    zfr_zft,
)
from .df import (
    BcBoundary,
    BcPoint,
    MacPentagon,
    bc_boundary,
    bc_ray_exit,
    bc_wsrmax,
    df_boundary_value,
    df_capacity_region,
    df_tau_slice,
    mac_region,
)
from .oracle import OracleResult, oracle_max_sum_rate, oracle_min_power

__all__ = [
    "__version__",
    "InvalidInputError",
    "NumericalFailureError",
    "RankDeficiencyError",
    "Beamformer",
    "ChannelPair",
    "EffectiveChannel",
    "PowerConfig",
    "RatePair",
    "effective",
    "gen_channels",
    "rate_pair",
    "rate_pair_reduced",
    "relay_power",
    "relay_power_reduced",
    "snr_pair_reduced",
    "BoundaryPoint",
    "QcqpBuild",
    "RateProfile",
    "RegionBoundary",
    "build_qcqp",
    "capacity_region",
    "envelope_value",
    "max_sum_rate",
    "min_relay_power",
    "rate_region_boundary",
    "snr_targets",
    "BoundsReport",
    "asymptotic_gaps",
    "asymptotic_sum_rates",
    "bounds_report",
    "c12",
    "c21",
    "c_ub",
    "c_ub0",
    "c_ub_sym",
    "gap_mr_asymptotic",
    "gap_zf_asymptotic",
    "r_lb_mr",
    "r_lb_zf",
    "direct_relay",
    "mrr_mrt",
    "oneway_alternating",
    "scheme_best_rates",
    "scheme_max_sum_rate",
    "scheme_profile_sum_rate",
    "sweep_region",
    "zfr_zft",
    "BcBoundary",
    "BcPoint",
    "MacPentagon",
    "bc_boundary",
    "bc_ray_exit",
    "bc_wsrmax",
    "df_boundary_value",
    "df_capacity_region",
    "df_tau_slice",
    "mac_region",
    "OracleResult",
    "oracle_max_sum_rate",
    "oracle_min_power",
]
