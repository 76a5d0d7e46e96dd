"""Deterministic synthetic test images."""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = ["synth", "PATTERNS"]

PATTERNS = ("ramp", "step", "staircase", "disk")


def _clean(kind, size):
    x = np.arange(size) / (size - 1)
    X = np.broadcast_to(x, (size, size))
    if kind == "ramp":
        return X.copy()
    if kind == "step":
        return np.where(X < 0.5, 0.2, 0.8)
    if kind == "staircase":
        return np.minimum(np.floor(X * 4.0), 3.0) / 3.0
    if kind == "disk":
        c = (size - 1) / 2.0
        i, j = np.indices((size, size))
        return np.where((i - c) ** 2 + (j - c) ** 2 <= (size / 4.0) ** 2, 0.8, 0.2)
    raise DomainError(f"unknown pattern {kind!r}; choose from {PATTERNS}")


def synth(kind, size, noise_sigma=0.0, seed=0):
    """Return ``(noisy, clean)`` images of shape ``(size, size)`` in ``[0, 1]``.

    Patterns vary along the column axis (except ``disk``); noise is seeded
    Gaussian, clamped back to ``[0, 1]``.
    """
    if size < 4:
        raise DomainError("size must be at least 4")
    if noise_sigma < 0:
        raise DomainError("noise_sigma must be >= 0")
    clean = _clean(kind, size)
    if noise_sigma == 0:
        return clean.copy(), clean
    rng = np.random.default_rng(seed)
    noisy = np.clip(clean + noise_sigma * rng.standard_normal(clean.shape), 0.0, 1.0)
    return noisy, clean
