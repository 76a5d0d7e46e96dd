"""Regularity observables of computed solutions.

Interior ("local") quantities are evaluated on a window that crops a fixed
fraction of the grid from every side.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .densities import lift_hessian_quadform
from .errors import ConfigError, DomainError
from .grid import grad_scalar, grad_vector, pointwise_norm

__all__ = [
    "DiagnosticsReport",
    "gradient_magnitude",
    "phi_field",
    "theta_field",
    "theta_hat_field",
    "lp_norms",
    "w12_seminorm",
    "staircase_metric",
    "poincare_probe",
    "diagnostics_report",
]

LOC_CROP = 0.1
DEFAULT_PS = (1, 2, 4, 8)


def interior(field, crop=LOC_CROP):
    """Crop ``int(crop * n)`` pixels from each side of the last two axes."""
    H, W = field.shape[-2:]
    ci, cj = int(crop * H), int(crop * W)
    return field[..., ci : H - ci, cj : W - cj]


def gradient_magnitude(field, h=1.0):
    """Pointwise ``|grad u|`` for a scalar field or ``|grad v|`` for a vector field."""
    field = np.asarray(field, dtype=float)
    if field.ndim == 2:
        return pointwise_norm(grad_scalar(field, h), 1)
    if field.ndim == 3 and field.shape[0] == 2:
        return pointwise_norm(grad_vector(field, h), 2)
    raise DomainError(f"expected a scalar or vector field, got shape {field.shape}")


def phi_field(field, exponent, h=1.0):
    """``(1 + |grad field|)**exponent``.

    Exponents ``1 - mu/2`` and ``mu/2`` applied to ``v`` give the two
    families of weights used in the higher-integrability estimates; the
    ``nu`` versions apply to ``u``.
    """
    return (1.0 + gradient_magnitude(field, h)) ** exponent


def _second_differences(jac, h):
    """``d_i`` of a gradient field (components leading), last two rows/cols zeroed."""
    out = []
    for axis in (0, 1):
        d = np.zeros_like(jac)
        src = np.moveaxis(jac, -2 + axis, 0)
        dst = np.moveaxis(d, -2 + axis, 0)
        dst[:-1] = (src[1:] - src[:-1]) / h
        d[..., -2:, :] = 0.0
        d[..., :, -2:] = 0.0
        out.append(d)
    return out


def theta_field(u, v, mask, params):
    """``sqrt(sum_i D^2 F_delta(grad v)(d_i grad v, d_i grad v))`` pointwise."""
    h = mask.spacing
    jac = grad_vector(v, h).reshape((4,) + mask.shape)
    total = np.zeros(mask.shape)
    for dj in _second_differences(jac, h):
        total += params.delta * np.sum(dj * dj, axis=0)
        total += params.alpha * lift_hessian_quadform(params.F, jac, dj)
    return np.sqrt(total)


def theta_hat_field(u, v, mask, params):
    """``u``-counterpart: ``G_delta`` Hessian at ``grad u - v`` along ``d_i grad u``."""
    h = mask.spacing
    gu = grad_scalar(u, h)
    coupling = gu - v
    total = np.zeros(mask.shape)
    for dg in _second_differences(gu, h):
        total += params.delta * np.sum(dg * dg, axis=0)
        total += params.beta * lift_hessian_quadform(params.G, coupling, dg)
    return np.sqrt(total)


def lp_norms(field, ps=DEFAULT_PS, h=1.0, crop=LOC_CROP):
    """Spacing-weighted ``l^p`` norms of ``|grad field|`` on the interior window.

    Returns a dict ``{p: norm}``.
    """
    if any(p < 1 for p in ps):
        raise DomainError("p must be >= 1")
    mag = interior(gradient_magnitude(field, h), crop)
    out = {}
    for p in ps:
        if np.isinf(p):
            out[p] = float(mag.max()) if mag.size else 0.0
        else:
            out[p] = float((h * h * np.sum(mag**p)) ** (1.0 / p))
    return out


def w12_seminorm(field, h=1.0, crop=LOC_CROP):
    """Discrete ``W^{1,2}`` seminorm of a scalar field on the interior window."""
    g = interior(grad_scalar(field, h), crop)
    return float(np.sqrt(h * h * np.sum(g * g)))


def staircase_metric(u, flat_tol, radius=3, h=1.0):
    """Fraction of interior pixels sitting on a plateau inside a slope.

    A pixel counts when ``|grad u| < flat_tol`` while the values of ``u`` in
    the ``(2 radius + 1)``-square window around it span more than
    ``10 flat_tol``.  Interior means at least ``radius`` pixels from the
    border.
    """
    if not flat_tol > 0:
        raise ConfigError("flat_tol must be positive")
    u = np.asarray(u, dtype=float)
    H, W = u.shape
    if H <= 2 * radius or W <= 2 * radius:
        return 0.0
    from numpy.lib.stride_tricks import sliding_window_view

    win = sliding_window_view(u, (2 * radius + 1, 2 * radius + 1))
    span = win.max(axis=(-2, -1)) - win.min(axis=(-2, -1))
    mag = pointwise_norm(grad_scalar(u, h), 1)[radius : H - radius, radius : W - radius]
    flat = (mag < flat_tol) & (span > 10.0 * flat_tol)
    return float(flat.mean())


def _bump(mask):
    obs = mask.observed
    H, W = mask.shape
    i, j = np.indices((H, W))
    ci, cj = np.mean(i[obs]), np.mean(j[obs])
    R = max(min(H, W) / 4.0, 1.0)
    r2 = ((i - ci) ** 2 + (j - cj) ** 2) / R**2
    w = np.where(r2 < 1.0, (1.0 - r2) ** 2, 0.0) * obs
    if w.sum() == 0:
        w = obs.astype(float)
    return w / (mask.spacing**2 * w.sum())


def poincare_probe(mask, trials, seed, modes=4):
    """Largest observed ``||u - <bump, u>||_1 / ||grad u||_1`` over random smooth ``u``.

    The bump is a normalized smooth weight supported on observed pixels, so
    the result is a lower estimate of the weighted-mean Poincare constant.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if not mask.observed.any():
        raise DomainError("mask has no observed pixels")
    h = mask.spacing
    H, W = mask.shape
    bump = _bump(mask)
    rng = np.random.default_rng(seed)
    x = (np.arange(H) + 0.5) / H
    y = (np.arange(W) + 0.5) / W
    best = 0.0
    done = 0
    while done < trials:
        u = np.zeros((H, W))
        for _ in range(modes):
            kx, ky = rng.integers(0, 4, size=2)
            phase = rng.uniform(0, 2 * np.pi, size=2)
            amp = rng.standard_normal()
            u += amp * np.outer(np.cos(np.pi * kx * x + phase[0]), np.cos(np.pi * ky * y + phase[1]))
        den = h * h * np.sum(pointwise_norm(grad_scalar(u, h), 1))
        if den <= 1e-12:
            continue
        mean = h * h * np.sum(bump * u)
        num = h * h * np.sum(np.abs(u - mean))
        best = max(best, num / den)
        done += 1
    return float(best)


@dataclass
class DiagnosticsReport:
    delta: float
    phi_w12: float
    phi_tilde_w12: float
    omega_w12: float
    omega_tilde_w12: float
    theta_l2: float
    theta_hat_l2: float
    lp_grad_u: dict
    lp_grad_v: dict
    staircase_fraction: float
    poincare_ratio: float

    def row(self):
        """Flat mapping for CSV output."""
        d = asdict(self)
        lu = d.pop("lp_grad_u")
        lv = d.pop("lp_grad_v")
        for p, val in lu.items():
            d[f"lp{p}_grad_u"] = val
        for p, val in lv.items():
            d[f"lp{p}_grad_v"] = val
        return d


def diagnostics_report(u, v, mask, params, mu, nu, flat_tol=1e-3, poincare_trials=20, seed=0):
    """Every observable for one solution; ``mu``/``nu`` select the weight exponents."""
    h = mask.spacing
    theta = interior(theta_field(u, v, mask, params))
    theta_hat = interior(theta_hat_field(u, v, mask, params))
    return DiagnosticsReport(
        delta=params.delta,
        phi_w12=w12_seminorm(phi_field(v, 1.0 - mu / 2.0, h), h),
        phi_tilde_w12=w12_seminorm(phi_field(u, 1.0 - nu / 2.0, h), h),
        omega_w12=w12_seminorm(phi_field(v, mu / 2.0, h), h),
        omega_tilde_w12=w12_seminorm(phi_field(u, nu / 2.0, h), h),
        theta_l2=float(np.sqrt(h * h * np.sum(theta**2))),
        theta_hat_l2=float(np.sqrt(h * h * np.sum(theta_hat**2))),
        lp_grad_u=lp_norms(u, h=h),
        lp_grad_v=lp_norms(v, h=h),
        staircase_fraction=staircase_metric(u, flat_tol, h=h),
        poincare_ratio=poincare_probe(mask, poincare_trials, seed),
    )
