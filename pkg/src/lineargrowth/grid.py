"""Pixel-grid fields and the difference operators behind the coupled model.

Fields are dense numpy arrays in row-major ``(H, W)`` layout:

* scalar field ``u``: shape ``(H, W)``
* vector field ``v``: shape ``(2, H, W)``, component ``k`` differentiates
  along array axis ``k``
* matrix field ``s``: shape ``(2, 2, H, W)``, row ``i`` is the gradient of
  ``v[i]``

Gradients use forward differences with a homogeneous Neumann closure (zero
in the last row/column); divergences are the exact negative adjoints under
:func:`inner`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError

__all__ = [
    "Grid",
    "Mask",
    "grad_scalar",
    "grad_vector",
    "div_vector",
    "div_matrix",
    "lambda_apply",
    "lambda_adjoint",
    "inner",
    "norm",
]


@dataclass(frozen=True)
class Grid:
    width: int
    height: int
    spacing: float = 1.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise DomainError("grid needs at least one pixel")
        if not self.spacing > 0:
            raise DomainError("grid spacing must be positive")

    @property
    def shape(self):
        return (self.height, self.width)


@dataclass(frozen=True)
class Mask:
    """Observed-pixel flags (``True`` outside the deficiency set) and data ``f``.

    ``f`` is stored as a full ``(H, W)`` array; entries on missing pixels are
    never read.
    """

    observed: np.ndarray
    f: np.ndarray
    spacing: float = 1.0

    def __post_init__(self):
        observed = np.array(self.observed, dtype=bool)
        f = np.asarray(self.f, dtype=float)
        if observed.ndim != 2 or f.shape != observed.shape:
            raise ShapeError(f"mask {observed.shape} and data {f.shape} must be equal 2-D shapes")
        if not observed.any():
            raise DomainError("at least one pixel must be observed")
        if not np.all(np.isfinite(f[observed])):
            raise DomainError("observed data must be finite")
        f = np.where(observed, f, 0.0)
        f.setflags(write=False)
        observed.setflags(write=False)
        object.__setattr__(self, "observed", observed)
        object.__setattr__(self, "f", f)
        Grid(observed.shape[1], observed.shape[0], self.spacing)

    @classmethod
    def full(cls, f, spacing=1.0):
        """Pure denoising: every pixel observed."""
        f = np.asarray(f, dtype=float)
        return cls(np.ones(f.shape, dtype=bool), f, spacing)

    @property
    def shape(self):
        return self.observed.shape

    @property
    def grid(self):
        return Grid(self.shape[1], self.shape[0], self.spacing)

    @property
    def denoising(self):
        return bool(self.observed.all())


def _fwd(u, axis, h):
    out = np.zeros_like(u)
    src = np.moveaxis(u, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    dst[:-1] = src[1:] - src[:-1]
    return out / h


def _bwd(p, axis, h):
    # negative adjoint of _fwd: p[-1] along the axis is never read
    out = np.zeros_like(p)
    src = np.moveaxis(p, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    if src.shape[0] > 1:
        dst[:-1] = src[:-1]
        dst[1:] -= src[:-1]
    return out / h


def grad_scalar(u, h=1.0):
    """Forward-difference gradient, shape ``(2, H, W)``."""
    u = np.asarray(u, dtype=float)
    return np.stack([_fwd(u, 0, h), _fwd(u, 1, h)])


def div_vector(p, h=1.0):
    """Backward-difference divergence with ``<grad u, p> = -<u, div p>``."""
    p = np.asarray(p, dtype=float)
    return _bwd(p[0], 0, h) + _bwd(p[1], 1, h)


def grad_vector(v, h=1.0):
    v = np.asarray(v, dtype=float)
    return np.stack([grad_scalar(v[0], h), grad_scalar(v[1], h)])


def div_matrix(s, h=1.0):
    s = np.asarray(s, dtype=float)
    return np.stack([div_vector(s[0], h), div_vector(s[1], h)])


def _same_grid(u, v):
    if v.shape[1:] != u.shape:
        raise ShapeError(f"scalar field {u.shape} and vector field {v.shape[1:]} differ")


def lambda_apply(u, v, h=1.0):
    """The coupling operator ``(u, v) -> (grad u - v, grad v)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    _same_grid(u, v)
    return grad_scalar(u, h) - v, grad_vector(v, h)


def lambda_adjoint(rho, sigma, h=1.0):
    """Adjoint of :func:`lambda_apply`: ``(-div rho, -rho - div sigma)``."""
    rho = np.asarray(rho, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if sigma.shape[:2] != (2, 2) or sigma.shape[2:] != rho.shape[1:]:
        raise ShapeError(f"dual fields {rho.shape} and {sigma.shape} do not match")
    return -div_vector(rho, h), -rho - div_matrix(sigma, h)


def inner(a, b, h=1.0):
    """Spacing-weighted Euclidean pairing ``h^2 * sum(a*b)``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"cannot pair fields of shapes {a.shape} and {b.shape}")
    return h * h * float(np.sum(a * b))


def norm(a, h=1.0):
    return float(np.sqrt(inner(a, a, h)))


def pointwise_norm(field, comp_ndim):
    """Euclidean (Frobenius for matrices) norm over the leading component axes."""
    axes = tuple(range(comp_ndim))
    return np.sqrt(np.sum(np.asarray(field) ** 2, axis=axes))
