"""Triharmonic curves in surfaces, space forms and BCV spaces.

Construction, classification, parametrization and verification of critical
curves of the order-3 energy (1/2) integral |nabla_T^2 T|^2 ds.
"""

from . import errors
from .geometry import (
    BCV,
    CurveSamples,
    FramePoint,
    ManifoldModel,
    ProductWithLine,
    RuledSurfaceR3,
    SpaceForm2,
    SpaceForm3,
    connection_in_frame,
    curvature_components,
    frame_at,
    metric_at,
    product_extend,
    riemann_apply,
)
from .profiles import ConstantPair, FrenetProfile, Tabulated, TheoremExistence
from .frenet import (
    FrenetApparatus,
    measure_frenet,
    reconstruct_r3,
    ruled_surface_directrix_data,
)
from .surface_ode import (
    FirstIntegralParams,
    degree5_recombined,
    degree5_witness,
    degree10_discrepancy,
    degree10_recombined,
    degree10_witness,
    solve_first_integral,
    surface_residuals,
    torsion_from_eq22,
)
from .tension import (
    TensionReport,
    covariant_derivatives,
    helix_tension_exact,
    tension_r,
)
from .classifier import (
    HelixSolution,
    bcv_zero_torsion,
    classify_bcv,
    classify_spaceform,
    classify_surface,
    helix_from_root,
    n3_dichotomy_check,
    p4_coefficients,
    p4_roots,
)
from .parametrize import (
    HelixParam,
    beta_ode_residual,
    frame_n3zero,
    parametrize_heisenberg,
    parametrize_type_i,
    parametrize_type_ii,
    parametrize_type_iii,
    type_i_constants,
)
from .flow import (
    FlowState,
    discrete_trienergy,
    run_flow,
    trienergy_gradient,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
