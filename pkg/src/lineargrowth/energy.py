"""Primal energies of the coupled model and their exact discrete gradients.

The discrete energy of a pair ``(u, v)`` is::

    h^2 * sum( alpha F(grad v) + beta G(grad u - v) )
        + h^2 * sum_observed phi(|u - f|)
        + (delta/2) h^2 * sum( |grad u|^2 + |grad v|^2 )

with the last line present only in the regularized energy.  Gradients are
taken with respect to the spacing-weighted pairing of :func:`grid.inner`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .densities import DataTerm, RadialDensity, data_term_eval, make_mu_elliptic
from .errors import DomainError, ShapeError
from .grid import div_matrix, div_vector, grad_scalar, grad_vector

__all__ = [
    "EnergyParams",
    "PiecewiseSignal1D",
    "energy_E",
    "energy_Edelta",
    "grad_Edelta",
    "energy_and_grad",
    "relaxed_energy_1d",
    "data_term_eval",
    "adaptive_simpson",
]


@dataclass(frozen=True)
class EnergyParams:
    alpha: float = 1.0
    beta: float = 10.0
    F: RadialDensity = field(default_factory=lambda: make_mu_elliptic(1.5))
    G: RadialDensity = field(default_factory=lambda: make_mu_elliptic(1.5))
    data: DataTerm = field(default_factory=DataTerm)
    delta: float = 0.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise DomainError("alpha and beta must be positive")
        if not self.delta >= 0:
            raise DomainError("delta must be nonnegative")

    def to_dict(self):
        d = {
            "alpha": self.alpha,
            "beta": self.beta,
            "F": {"kind": self.F.kind, "param": self.F.param},
            "G": {"kind": self.G.kind, "param": self.G.param},
            "data": {"kind": self.data.kind, "weight": self.data.weight},
            "delta": self.delta,
        }
        if self.data.kind == "power":
            d["data"]["p"] = self.data.p
        return d


def _check(u, v, mask):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != mask.shape or v.shape != (2,) + mask.shape:
        raise ShapeError(f"fields {u.shape}/{v.shape} do not live on the {mask.shape} grid")
    return u, v


def _flat4(s):
    return s.reshape((4,) + s.shape[2:])


def energy_and_grad(u, v, mask, params, need_grad=True):
    """Regularized energy and, optionally, its gradient ``(g_u, g_v)``.

    This is the solver's hot path; everything else routes through it.
    """
    u, v = _check(u, v, mask)
    h = mask.spacing
    p = params
    gu_field = grad_scalar(u, h)
    coupling = gu_field - v
    jac = grad_vector(v, h)
    jac4 = _flat4(jac)

    r_c = np.sqrt(np.sum(coupling * coupling, axis=0))
    r_j = np.sqrt(np.sum(jac4 * jac4, axis=0))
    resid = u - mask.f
    a_res = np.abs(resid)
    obs = mask.observed

    dens = p.alpha * p.F.g(r_j) + p.beta * p.G.g(r_c)
    total = np.sum(dens) + np.sum(p.data.value(a_res[obs]))
    if p.delta > 0:
        total += 0.5 * p.delta * (np.sum(gu_field * gu_field) + np.sum(jac4 * jac4))
    total = float(h * h * total)
    if not need_grad:
        return total

    dG = p.beta * p.G.d1_over_t(r_c) * coupling
    dF = p.alpha * p.F.d1_over_t(r_j) * jac
    dphi = np.where(obs, p.data.deriv(a_res) * np.sign(resid), 0.0)
    g_u = -div_vector(p.delta * gu_field + dG, h) + dphi
    g_v = -div_matrix(p.delta * jac + dF, h) - dG
    return total, g_u, g_v


def energy_E(u, v, mask, params):
    """Unregularized energy; ``params.delta`` is ignored."""
    return energy_and_grad(u, v, mask, _with_delta(params, 0.0), need_grad=False)


def energy_Edelta(u, v, mask, params):
    return energy_and_grad(u, v, mask, params, need_grad=False)


def grad_Edelta(u, v, mask, params):
    """Exact gradient of :func:`energy_Edelta`; returns ``(g_u, g_v)``."""
    _, g_u, g_v = energy_and_grad(u, v, mask, params)
    return g_u, g_v


def _with_delta(params, delta):
    if params.delta == delta:
        return params
    return EnergyParams(params.alpha, params.beta, params.F, params.G, params.data, delta)


# -- one-dimensional relaxed energy -------------------------------------------


def adaptive_simpson(fun, a, b, tol=1e-10, max_depth=50):
    """Adaptive Simpson quadrature of a scalar function on ``[a, b]``."""

    def simpson(fa, fm, fb, a, b):
        return (b - a) * (fa + 4.0 * fm + fb) / 6.0

    def recurse(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = fun(lm), fun(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        err = left + right - whole
        if depth >= max_depth or abs(err) <= 15.0 * tol:
            return left + right + err / 15.0
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + recurse(
            m, b, fm, frm, fb, right, 0.5 * tol, depth + 1
        )

    if b <= a:
        return 0.0
    fa, fm, fb = fun(a), fun(0.5 * (a + b)), fun(b)
    return recurse(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, 0)


@dataclass(frozen=True)
class PiecewiseSignal1D:
    """A 1-D ``BV`` test pair on ``[edges[0], edges[-1]]``.

    ``u`` is affine on each interval ``[edges[k], edges[k+1]]`` with value
    ``u_values[k]`` at the left end and slope ``u_slopes[k]`` (zero by
    default, i.e. piecewise constant); mismatches at interior edges are jumps.
    ``v`` is continuous and piecewise linear through ``(v_nodes, v_values)``,
    so its derivative carries no singular part.
    """

    edges: tuple
    u_values: tuple
    v_nodes: tuple
    v_values: tuple
    u_slopes: tuple | None = None

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=float)
        n = len(e) - 1
        if n < 1 or np.any(np.diff(e) <= 0) or not np.all(np.isfinite(e)):
            raise DomainError("edges must be finite and strictly increasing")
        if len(self.u_values) != n:
            raise DomainError(f"need {n} u-values, got {len(self.u_values)}")
        if self.u_slopes is not None and len(self.u_slopes) != n:
            raise DomainError(f"need {n} u-slopes, got {len(self.u_slopes)}")
        vn = np.asarray(self.v_nodes, dtype=float)
        if len(vn) < 2 or len(vn) != len(self.v_values) or np.any(np.diff(vn) <= 0):
            raise DomainError("v needs >= 2 strictly increasing nodes with matching values")
        if vn[0] > e[0] or vn[-1] < e[-1]:
            raise DomainError("v nodes must cover the signal interval")

    @property
    def slopes(self):
        if self.u_slopes is None:
            return (0.0,) * len(self.u_values)
        return tuple(self.u_slopes)

    def u_at(self, x, k):
        return self.u_values[k] + self.slopes[k] * (x - self.edges[k])

    def v_at(self, x):
        return float(np.interp(x, self.v_nodes, self.v_values))

    def jumps(self):
        out = []
        for k in range(1, len(self.u_values)):
            left = self.u_at(self.edges[k], k - 1)
            out.append(self.u_values[k] - left)
        return out


def relaxed_energy_1d(sig, params, f=None, f_breaks=(), tol=1e-10):
    """Relaxed energy of a 1-D piecewise signal, jumps charged at the recession slope.

    ``f`` is an optional callable data profile; when given, the data term
    integrates ``phi(|u - f|)`` over the whole interval.  Kinks or jumps of
    ``f`` should be listed in ``f_breaks`` so every quadrature piece is smooth.
    """
    F, G, data = params.F, params.G, params.data
    lo, hi = sig.edges[0], sig.edges[-1]
    inner_pts = [float(x) for x in (*sig.v_nodes, *f_breaks) if lo < x < hi]
    breaks = sorted(set(map(float, sig.edges)) | set(inner_pts))
    total = 0.0
    for a, b in zip(breaks[:-1], breaks[1:]):
        k = int(np.searchsorted(sig.edges, 0.5 * (a + b), side="right")) - 1
        du = sig.slopes[k]
        dv = (sig.v_at(b) - sig.v_at(a)) / (b - a)

        def integrand(x, k=k, du=du, dv=dv):
            val = params.alpha * float(F.g(abs(dv))) + params.beta * float(G.g(abs(du - sig.v_at(x))))
            if f is not None:
                val += float(data.value(abs(sig.u_at(x, k) - f(x))))
            return val

        total += adaptive_simpson(integrand, a, b, tol)
    total += params.beta * G.slope * sum(abs(j) for j in sig.jumps())
    return total
