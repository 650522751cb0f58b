"""Numerical toolkit for Heintze-Karcher type inequalities on substatic warped products.

Models are warped products ``ds^2/f^2 + s^2 g_N`` with potential ``f``;
hypersurfaces are axisymmetric radial graphs.  The package evaluates the
substatic tensor and its classification function, the Heintze-Karcher
functional and horizon constant, the conformal-distance flow with its
monotone quantity, and the radial torsion problem of the equality case.
"""

from .catalogue import ADS0, DSS, EUCLID, SCHW3, builtin_models, load_catalogue, save_catalogue
from .elliptic import (
    TorsionSolution,
    conformal_hessian_residual,
    hopf_check,
    recover_horizon_datum,
    solve_torsion_radial,
    torsion_residual,
)
from .errors import DegenerateHorizonError, DomainError, GraphError, MeanConvexityError, ModelError
from .flow import (
    FlowState,
    FlowTrace,
    equality_flow_diagnostics,
    flow_step_graph,
    flow_step_radial,
    monotonicity_report,
    q_functional,
    q_prime_formula,
    q_prime_residual,
    run_flow,
)
from .functionals import (
    HKReport,
    MultiHorizonData,
    hk_deficit,
    hk_lhs,
    horizon_constant_closed,
    horizon_constant_integral,
    horizon_term,
    minkowski_cmc_check,
    multi_horizon_equality_check,
)
from .hypersurface import (
    RadialGraph,
    area,
    graph_geometry,
    perturbed_graph,
    sphere_graph,
    weighted_volume,
)
from .warped import (
    CallableProfile,
    ClosedFormProfile,
    EtaDefinedProfile,
    TabulatedProfile,
    WarpedProductModel,
    eta_extract,
    fit_desitter_schwarzschild,
    potential_eval,
    substatic_check,
    surface_gravity,
)

__version__ = "0.1.0"
