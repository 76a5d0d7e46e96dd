"""Radial integrands of linear growth and scalar data-fitting terms.

A radial density is a function ``P(p) = g(|p|)`` of a vector or matrix
argument, where the profile ``g: [0, inf) -> [0, inf)`` is convex with
``g(0) = g'(0) = 0`` and ``g'`` bounded by the recession slope.  Two families
are provided:

* ``mu_elliptic(mu)``: ``g''(t) = (1 + t)**(-mu)`` integrated twice from zero.
* ``min_surface(eps)``: ``g(t) = sqrt(eps**2 + t**2) - eps``.

Array arguments of the lifted functions carry their components along the
first axis; matrix arguments must be flattened to four components first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "RadialDensity",
    "DataTerm",
    "EllipticityReport",
    "make_mu_elliptic",
    "make_min_surface",
    "eval_derivs",
    "lift_value",
    "lift_gradient",
    "lift_hessian_quadform",
    "conjugate_eval",
    "recession_slope",
    "ellipticity_probe",
    "invert_increasing",
    "data_term_eval",
]

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 100


def invert_increasing(dfun, d2fun, s, sup=math.inf, tol=NEWTON_TOL, maxiter=NEWTON_MAXITER):
    """Solve ``dfun(t) = s`` for ``t >= 0`` with ``dfun`` strictly increasing.

    Vectorized safeguarded Newton iteration: a Newton step leaving the current
    bracket is replaced by bisection, so convergence is guaranteed.  Entries
    with ``s >= sup`` (no finite solution) come back as ``inf``.
    """
    s = np.asarray(s, dtype=float)
    t = np.zeros_like(s)
    active = (s > 0) & (s < sup)
    t[s >= sup] = np.inf
    if not active.any():
        return t
    target = s[active]
    lo = np.zeros_like(target)
    hi = np.ones_like(target)
    # grow the bracket until dfun(hi) >= target
    for _ in range(2000):
        short = dfun(hi) < target
        if not short.any():
            break
        hi[short] *= 2.0
        if np.isinf(hi).any():
            break
    x = 0.5 * (lo + hi)
    done = np.zeros(x.shape, dtype=bool)
    for _ in range(maxiter):
        r = dfun(x) - target
        lo = np.where(r < 0, x, lo)
        hi = np.where(r > 0, x, hi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = x - r / d2fun(x)
        bad = ~np.isfinite(step) | (step <= lo) | (step >= hi)
        x_new = np.where(done, x, np.where(bad, 0.5 * (lo + hi), step))
        # stop on the size of the update relative to t, not on the residual:
        # far out dfun is flat and a tiny residual still leaves t inaccurate
        scale = tol * (1.0 + x)
        done |= (r == 0) | (np.abs(x_new - x) <= scale) | (hi - lo <= scale)
        x = x_new
        if done.all():
            break
    t[active] = x
    return t


@dataclass(frozen=True)
class RadialDensity:
    """Convex even integrand ``g(|p|)`` of linear growth.

    Use :func:`make_mu_elliptic` or :func:`make_min_surface` rather than
    constructing instances directly.
    """

    kind: str
    param: float
    slope: float = field(init=False)

    def __post_init__(self):
        if self.kind == "mu_elliptic":
            if not self.param > 1:
                raise DomainError(f"mu must exceed 1 for linear growth, got {self.param}")
            slope = 1.0 / (self.param - 1.0)
        elif self.kind == "min_surface":
            if not self.param > 0:
                raise DomainError(f"eps must be positive, got {self.param}")
            slope = 1.0
        else:
            raise DomainError(f"unknown density kind {self.kind!r}")
        object.__setattr__(self, "slope", slope)

    def __str__(self):
        return f"{self.kind}({self.param:g})"

    # -- radial profile ---------------------------------------------------
    def g(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "min_surface":
            e = self.param
            # sqrt(e^2 + t^2) - e without cancellation
            return t * t / (np.sqrt(e * e + t * t) + e)
        mu = self.param
        lt = np.log1p(t)
        if mu == 2.0:
            out = t - lt
        else:
            out = (t - np.expm1((2.0 - mu) * lt) / (2.0 - mu)) / (mu - 1.0)
        # near 0 the closed form cancels; integrate the binomial series of g'' twice
        small = t < 0.05
        if np.any(small):
            ts = t[small] if t.ndim else t
            series, c = 0.0, 1.0
            for k in range(16):
                series = series + c * ts ** (k + 2) / ((k + 1) * (k + 2))
                c *= -(mu + k) / (k + 1)
            if t.ndim:
                out[small] = series
            else:
                out = series
        return out

    def d1(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "min_surface":
            e = self.param
            return t / np.sqrt(e * e + t * t)
        mu = self.param
        return -np.expm1((1.0 - mu) * np.log1p(t)) / (mu - 1.0)

    def d2(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "min_surface":
            e = self.param
            return e * e / (e * e + t * t) ** 1.5
        return np.exp(-self.param * np.log1p(t))

    def d1_over_t(self, t):
        """``g'(t)/t`` with its limit ``g''(0)`` at the origin."""
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self.d1(t) / t
        return np.where(t > 0, out, self.d2(0.0))

    # -- conjugate --------------------------------------------------------
    def boundary_conjugate(self):
        """``lim g*(s)`` as ``s`` increases to the recession slope."""
        if self.kind == "min_surface":
            return self.param
        mu = self.param
        if mu > 2.0:
            return 1.0 / ((mu - 1.0) * (mu - 2.0))
        return math.inf

    def argmax_conjugate(self, s):
        """The ``t >= 0`` with ``g'(t) = s`` (``inf`` when ``s >= slope``)."""
        s = np.asarray(s, dtype=float)
        if self.kind == "mu_elliptic" and self.param != 2.0:
            mu = self.param
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.expm1(np.log1p(-(mu - 1.0) * np.minimum(s, self.slope)) / (1.0 - mu))
            return np.where(s < self.slope, t, np.inf)
        return invert_increasing(self.d1, self.d2, s, sup=self.slope)

    def conjugate(self, s):
        s = np.asarray(s, dtype=float)
        t = self.argmax_conjugate(s)
        with np.errstate(invalid="ignore"):
            val = s * t - self.g(t)
        val = np.where(s < self.slope, val, np.inf)
        return np.where(s == self.slope, self.boundary_conjugate(), val)

    def linear_growth_constants(self):
        """``(c1, c2)`` with ``g(t) >= c1*t - c2`` for every ``t >= 0``.

        ``c1`` is half the recession slope; the sharp ``c2`` is then
        ``max_t (c1*t - g(t)) = g*(c1)``.
        """
        c1 = 0.5 * self.slope
        return c1, float(self.conjugate(c1))


def make_mu_elliptic(mu):
    """Density with ``g''(t) = (1+t)**(-mu)``; ``mu = 2`` gives ``t - log(1+t)``."""
    return RadialDensity("mu_elliptic", float(mu))


def make_min_surface(eps):
    return RadialDensity("min_surface", float(eps))


def recession_slope(d):
    return d.slope


def eval_derivs(d, t):
    """Return ``(g(t), g'(t), g''(t))`` for a scalar ``t >= 0``."""
    t = float(t)
    if not math.isfinite(t) or t < 0:
        raise DomainError(f"radial argument must be finite and >= 0, got {t}")
    return float(d.g(t)), float(d.d1(t)), float(d.d2(t))


def _finite(arg):
    arg = np.asarray(arg, dtype=float)
    if not np.all(np.isfinite(arg)):
        raise DomainError("argument contains non-finite entries")
    return arg


def lift_value(d, arg):
    """``g(|arg|)`` with the norm taken over the first axis."""
    arg = _finite(arg)
    return d.g(np.sqrt(np.sum(arg * arg, axis=0)))


def lift_gradient(d, arg):
    """``g'(|p|) p/|p|``, zero at ``p = 0``; magnitude stays below the slope."""
    arg = _finite(arg)
    r = np.sqrt(np.sum(arg * arg, axis=0))
    return d.d1_over_t(r) * arg


def lift_hessian_quadform(d, arg, direction):
    """Second derivative of ``g(|.|)`` at ``arg`` in the given direction."""
    arg = _finite(arg)
    direction = _finite(direction)
    r = np.sqrt(np.sum(arg * arg, axis=0))
    qq = np.sum(direction * direction, axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        radial = np.where(r > 0, np.sum(arg * direction, axis=0) / r, 0.0)
    radial2 = radial * radial
    tangential = np.maximum(qq - radial2, 0.0)
    out = d.d2(r) * radial2 + d.d1_over_t(r) * tangential
    return np.where(r > 0, out, d.d2(0.0) * qq)


def conjugate_eval(d, s):
    """``g*(s) = sup_t (s t - g(t))``; ``inf`` above the recession slope."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0) or np.any(np.isnan(s_arr)):
        raise DomainError("conjugate argument must be >= 0")
    out = d.conjugate(s_arr)
    return float(out) if out.ndim == 0 else out


@dataclass
class EllipticityReport:
    n_samples: int
    lower_min: float | None
    lower_max: float | None
    upper_min: float | None
    upper_max: float | None
    window: tuple
    passed: bool


def ellipticity_probe(d, mu_claimed, n_samples, seed=0, dim=4, window=(1e-3, 1e3), max_norm=1e6):
    """Empirical check of the two-sided ``mu``-ellipticity bounds.

    For random ``(p, q)`` with ``|p|`` log-uniform up to ``max_norm`` this
    forms ``Q (1+|p|)**mu / |q|^2`` (must stay above ``window[0]``) and
    ``Q (1+|p|) / |q|^2`` (must stay below ``window[1]``), where ``Q`` is the
    Hessian quadratic form.
    """
    if n_samples <= 0:
        return EllipticityReport(0, None, None, None, None, tuple(window), True)
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal((dim, n_samples))
    direction /= np.linalg.norm(direction, axis=0)
    radius = 10.0 ** rng.uniform(-3.0, math.log10(max_norm), n_samples)
    p = direction * radius
    q = rng.standard_normal((dim, n_samples))
    # a quarter of the samples probe the purely radial direction
    k = n_samples // 4
    q[:, :k] = direction[:, :k] * rng.uniform(0.5, 2.0, k)
    Q = lift_hessian_quadform(d, p, q)
    qq = np.sum(q * q, axis=0)
    lower = Q * (1.0 + radius) ** mu_claimed / qq
    upper = Q * (1.0 + radius) / qq
    passed = bool(lower.min() >= window[0] and upper.max() <= window[1])
    return EllipticityReport(
        n_samples,
        float(lower.min()),
        float(lower.max()),
        float(upper.min()),
        float(upper.max()),
        tuple(window),
        passed,
    )


@dataclass(frozen=True)
class DataTerm:
    """Fidelity profile ``phi(|u - f|)``.

    ``quadratic``: ``w t^2``; ``power``: ``w t^p`` with ``p > 1``;
    ``linear_growth``: ``w (sqrt(1 + t^2) - 1)``.
    """

    kind: str = "quadratic"
    weight: float = 1.0
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("quadratic", "power", "linear_growth"):
            raise DomainError(f"unknown data term kind {self.kind!r}")
        if not self.weight > 0:
            raise DomainError("data term weight must be positive")
        if self.kind == "power" and not self.p > 1:
            raise DomainError("power data term needs p > 1")

    @property
    def sup_slope(self):
        return self.weight if self.kind == "linear_growth" else math.inf

    def value(self, t):
        t = np.asarray(t, dtype=float)
        w = self.weight
        if self.kind == "quadratic":
            return w * t * t
        if self.kind == "power":
            return w * t**self.p
        return w * t * t / (np.sqrt(1.0 + t * t) + 1.0)

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        w = self.weight
        if self.kind == "quadratic":
            return 2.0 * w * t
        if self.kind == "power":
            return w * self.p * t ** (self.p - 1.0)
        return w * t / np.sqrt(1.0 + t * t)

    def deriv2(self, t):
        t = np.asarray(t, dtype=float)
        w = self.weight
        if self.kind == "quadratic":
            return np.full_like(t, 2.0 * w)
        if self.kind == "power":
            with np.errstate(divide="ignore"):
                return w * self.p * (self.p - 1.0) * t ** (self.p - 2.0)
        return w / (1.0 + t * t) ** 1.5

    def conjugate(self, s):
        """``phi*(s)`` for ``s >= 0``; the quadratic case is closed form."""
        s = np.asarray(s, dtype=float)
        if self.kind == "quadratic":
            return s * s / (4.0 * self.weight)
        t = invert_increasing(self.deriv, self.deriv2, s, sup=self.sup_slope)
        with np.errstate(invalid="ignore"):
            val = s * t - self.value(t)
        if self.kind == "linear_growth":
            val = np.where(s < self.weight, val, np.inf)
            val = np.where(s == self.weight, self.weight, val)
        return val


def data_term_eval(t, data):
    """Return ``(phi(t), phi'(t))`` for ``t >= 0``."""
    t = float(t)
    if not t >= 0 or not math.isfinite(t):
        raise DomainError(f"data residual magnitude must be finite and >= 0, got {t}")
    return float(data.value(t)), float(data.deriv(t))
