"""Dual fields, the discrete dual functional and the duality-gap certificate.

The Lagrangian pairs ``rho`` with ``grad u - v`` and ``sigma`` with
``grad v``.  Minimizing it over the primal pair gives

    R(rho, sigma) = - h^2 sum [ (beta G)*(rho) + (alpha F)*(sigma) ]
                    + h^2 sum_observed [ f d - phi*(|d|) ],   d = -div rho

provided ``rho + div sigma = 0`` everywhere and ``d = 0`` on missing pixels;
otherwise ``R = -inf``.  Both constraints are checked against a tolerance.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .energy import energy_E
from .errors import ConfigError
from .grid import div_matrix, div_vector, grad_vector, pointwise_norm

__all__ = [
    "DualPair",
    "Certificate",
    "extract_dual",
    "fstar_eval",
    "dual_value_R",
    "duality_gap",
]


@dataclass
class DualPair:
    rho: np.ndarray
    sigma: np.ndarray
    r1: float
    r2: float
    dual_value: float | None = None


@dataclass
class Certificate:
    primal: float
    dual: float
    gap: float
    normalized_gap: float
    r1: float
    r2: float
    delta: float
    iterations: int | None = None

    def to_dict(self):
        return {k: _jsonable(v) for k, v in asdict(self).items()}


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def residuals(rho, sigma, mask):
    """Sup-norm violations of the two dual constraints ``(r1, r2)``."""
    h = mask.spacing
    d = -div_vector(rho, h)
    missing = ~mask.observed
    r1 = float(np.max(np.abs(d[missing]))) if missing.any() else 0.0
    r2 = float(np.max(np.abs(rho + div_matrix(sigma, h))))
    return r1, r2


def extract_dual(u, v, mask, params):
    """Dual pair read off a (near-)minimizer of the regularized energy.

    ``sigma = delta grad v + alpha DF(grad v)`` and ``rho = -div sigma``, so
    the constraint ``rho + div sigma = 0`` holds to rounding and ``R`` is a
    genuine lower bound for pure denoising.  At a stationary point ``rho``
    equals ``beta DG(grad u - v)`` minus the ``v``-gradient of the energy.
    On missing pixels ``-div rho`` vanishes only up to ``O(delta)``; ``r1``
    reports how far.
    """
    h = mask.spacing
    jac = grad_vector(v, h)
    r_j = pointwise_norm(jac, 2)
    sigma = params.alpha * params.F.d1_over_t(r_j) * jac
    if params.delta > 0:
        sigma = sigma + params.delta * jac
    rho = -div_matrix(sigma, h)
    r1, r2 = residuals(rho, sigma, mask)
    return DualPair(rho, sigma, r1, r2)


def fstar_eval(pair, params):
    """Pointwise ``(beta G)*(rho) + (alpha F)*(sigma)`` with exact scaling."""
    a, b = params.alpha, params.beta
    s_rho = pointwise_norm(pair.rho, 1) / b
    s_sig = pointwise_norm(pair.sigma, 2) / a
    return b * params.G.conjugate(s_rho) + a * params.F.conjugate(s_sig)


def dual_value_R(pair, mask, params, tol_feas):
    """Discrete dual functional; ``-inf`` when a constraint fails beyond ``tol_feas``."""
    if not tol_feas > 0:
        raise ConfigError("tol_feas must be positive")
    r1, r2 = residuals(pair.rho, pair.sigma, mask)
    if r1 > tol_feas or r2 > tol_feas:
        return -math.inf
    h = mask.spacing
    fstar = fstar_eval(pair, params)
    if not np.all(np.isfinite(fstar)):
        return -math.inf
    obs = mask.observed
    d = -div_vector(pair.rho, h)[obs]
    phistar = params.data.conjugate(np.abs(d))
    if not np.all(np.isfinite(phistar)):
        return -math.inf
    data_part = np.sum(mask.f[obs] * d - phistar)
    return float(h * h * (data_part - np.sum(fstar)))


def duality_gap(u, v, mask, params, tol_feas, iterations=None):
    """Primal value, dual value and their gap at the pair extracted from ``(u, v)``."""
    primal = energy_E(u, v, mask, params)
    pair = extract_dual(u, v, mask, params)
    dual = dual_value_R(pair, mask, params, tol_feas)
    pair.dual_value = dual
    gap = primal - dual
    return Certificate(
        primal=primal,
        dual=dual,
        gap=gap,
        normalized_gap=gap / (1.0 + abs(primal)),
        r1=pair.r1,
        r2=pair.r2,
        delta=params.delta,
        iterations=iterations,
    )
