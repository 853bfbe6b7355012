"""Inhomogeneous spatio-temporal summary statistics and model simulators."""

from .covariance import (
    CovarianceModel,
    GridField,
    PowerExponential,
    covariance,
    covariance_at,
    field_at,
    simulate_grf,
    simulate_grf_additive,
    simulate_grf_dense,
    validate_continuity,
)
from .geometry import (
    Cylinder,
    EmptyErosionError,
    GridGeometry,
    PointPattern,
    SpacetimePoint,
    Window,
    cylinder_contains,
    cylinder_volume,
    erode_window,
    restrict_pattern,
    sup_distance,
    unit_ball_volume,
)
from .intensity import (
    ConstantIntensity,
    CustomIntensity,
    GridIntensity,
    IntensityField,
    KernelBandwidth,
    LogLinearIntensity,
    evaluate,
    infimum,
    integrate,
    kernel_estimate,
    supremum,
)
from .partitions import (
    SetPartition,
    bell_number,
    enumerate_partitions,
    lgcp_normalized_density,
    lgcp_xi,
    normalized_density_to_xi,
    xi_to_normalized_density,
)
from .simulate import (
    HardCoreSpec,
    RetentionFunction,
    chain_is_stationary,
    simulate_hardcore,
    simulate_hardcore_chain,
    simulate_lgcp,
    simulate_poisson,
    thin_pattern,
)
from .summaries import (
    K_from_pcf,
    RangeGrid,
    SummaryEstimate,
    envelope,
    estimate_F,
    estimate_F_grid,
    estimate_G,
    estimate_G_grid,
    estimate_J,
    estimate_K,
    hardcore_activity_ratio,
    poisson_F,
    probe_lattice,
    scale_field,
    scale_pattern,
    series_J,
)

__version__ = "0.1.0"
