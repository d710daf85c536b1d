"""Return-time combinatorics of minimal Z^d-actions and the finite-scale
rotation-factor criterion."""

from .analysis import (
    length_series,
    necessary_condition_check,
    series_verdict,
    sufficient_condition_check,
    theta_length,
    theta_scan,
)
from .config import RunConfig, build_system, load_config
from .errors import (
    ConfigError,
    InvariantViolation,
    NotGeneratedError,
    RotfactorError,
    WindowTooSmallError,
)
from .generators import (
    BlockSubstitution,
    ExplicitSystem,
    LatticeSystem,
    ProductSystem,
    SubstitutionSystem,
)
from .geometry import (
    FirstReturnSet,
    PointSet,
    Window,
    f_diameter,
    f_distance,
    first_return_vectors,
    packing_covering_radii,
    voronoi_neighbors,
)
from .hierarchy import (
    CombinatorialData,
    address,
    build_combinatorial_data,
    check_well_distributed,
    composite_patch,
    linear_recurrence_report,
    thin_to_well_distributed,
)
from .pipeline import RunReport, oracle_check, run_pipeline
from .torus import TorusPoint, c_map, parse_scalar, torus_distance

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
