"""Exact Moreau envelopes of convex piecewise cubics and smoothed 2D gauges."""
from .gauge import (
    DegenerateRay,
    Gauge2D,
    InvalidGauge,
    RegionLabel,
    SmoothedGauge,
    classify_l1,
    classify_max,
    pasch_hausdorff,
    smooth_custom,
    smooth_l1,
    smooth_max,
    unit_circle,
)
from .oracle import OracleSettings, envelope_oracle_2d, prox_oracle_1d
from .piecewise import CubicPiece, InvalidFunction, PiecewiseCubic, load, loads, validate
from .prox import (
    EnvelopePartition,
    ProxConfig,
    ProxResult,
    affine_tilt,
    envelope,
    gradient,
    partition,
    prox,
    prox_symmetric_cubic,
    restrict,
)

__version__ = "0.1.0"
