"""Coupled linear-growth model for grey-scale denoising and inpainting.

An image ``u`` and a gradient surrogate ``v`` minimize

    alpha F(grad v) + beta G(grad u - v) + phi(|u - f|)

summed over the grid, with ``F`` and ``G`` convex radial densities of linear
growth.  Smooth ``delta``-regularized problems are solved along a decreasing
``delta`` schedule and every solve carries a duality-gap certificate.
"""

from .densities import (
    DataTerm,
    EllipticityReport,
    RadialDensity,
    conjugate_eval,
    data_term_eval,
    ellipticity_probe,
    eval_derivs,
    lift_gradient,
    lift_hessian_quadform,
    lift_value,
    make_min_surface,
    make_mu_elliptic,
    recession_slope,
)
from .diagnostics import (
    DiagnosticsReport,
    diagnostics_report,
    gradient_magnitude,
    lp_norms,
    phi_field,
    poincare_probe,
    staircase_metric,
    theta_field,
    theta_hat_field,
    w12_seminorm,
)
from .duality import Certificate, DualPair, dual_value_R, duality_gap, extract_dual, fstar_eval
from .energy import (
    EnergyParams,
    PiecewiseSignal1D,
    energy_and_grad,
    energy_E,
    energy_Edelta,
    grad_Edelta,
    relaxed_energy_1d,
)
from .errors import ConfigError, DomainError, ImageIOError, NumericError, ShapeError
from .grid import (
    Grid,
    Mask,
    div_matrix,
    div_vector,
    grad_scalar,
    grad_vector,
    inner,
    lambda_adjoint,
    lambda_apply,
    norm,
)
from .imageio import load_image, load_mask, save_image
from .solver import (
    SolveReport,
    SolverConfig,
    StageRecord,
    UniquenessReport,
    continuation_solve,
    initial_guess,
    minimize_delta,
    uniqueness_probe,
)
from .synth import synth

__version__ = "0.1.0"
