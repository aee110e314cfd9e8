"""Gauge-invariant elastic metrics on curve-in-surface flags sampled on a (u, v) grid."""

from .errors import (
    BadDimensions,
    DegenerateGrid,
    FlagError,
    LineSearchFailed,
    NotADiffeo,
    NotSymmetric,
    UnknownShape,
)
from .geomcore import (
    ParameterizedFlag,
    build_flag,
    curve_invariants,
    darboux_frame,
    fundamental_forms,
)
from .metrics import (
    MetricParams,
    Reparameterization,
    TangentVector,
    apply_reparameterization,
    curve_elastic_energy,
    curve_elastic_metric,
    flag_metric,
    normal_curve_energy,
    normal_surface_energy,
    psi_project,
    surface_elastic_energy,
    transport_tangent,
)
from .shapedist import FlagPath, StraightenOptions, distance, linear_path, path_energy, straighten
from .shapes import bumpy_sphere, ellipsoid, make_shape, sphere
from .variations import (
    analytic_curve_variation,
    analytic_surface_variation,
    numeric_curve_variation,
    numeric_surface_variation,
)

__version__ = "0.1.0"
