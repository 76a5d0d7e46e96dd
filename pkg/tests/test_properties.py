"""Randomized property checks."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lineargrowth import (
    EnergyParams,
    Mask,
    conjugate_eval,
    div_vector,
    energy_E,
    grad_scalar,
    inner,
    make_min_surface,
    make_mu_elliptic,
    norm,
    staircase_metric,
)
from lineargrowth.imageio import quantize

densities = st.one_of(
    st.floats(1.05, 4.0).map(make_mu_elliptic),
    st.floats(0.01, 10.0).map(make_min_surface),
)
finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@given(densities, st.floats(0.0, 1e4), st.floats(0.0, 0.999))
def test_fenchel_young_inequality(d, t, frac):
    s = frac * d.slope
    assert float(d.g(t)) + conjugate_eval(d, s) >= t * s - 1e-9 * (1 + t * s)


@given(densities, st.floats(0.0, 0.99), st.floats(0.0, 0.99))
def test_conjugate_monotone(d, a, b):
    lo, hi = sorted((a * d.slope, b * d.slope))
    assert conjugate_eval(d, lo) <= conjugate_eval(d, hi) + 1e-12


@given(densities, st.floats(0.0, 1e5), st.floats(0.0, 1e5))
def test_profile_convex_increasing(d, a, b):
    lo, hi = sorted((a, b))
    g = d.g(np.array([lo, 0.5 * (lo + hi), hi]))
    assert g[0] <= g[2] + 1e-12 * abs(g[2])
    assert g[1] <= 0.5 * (g[0] + g[2]) + 1e-12 * (1 + abs(g[2]))


@settings(max_examples=50)
@given(st.integers(1, 12), st.integers(1, 12), st.floats(0.1, 3.0), st.integers(0, 2**32 - 1))
def test_adjointness_any_shape(H, W, h, seed):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((H, W))
    p = rng.standard_normal((2, H, W))
    res = inner(grad_scalar(u, h), p, h) + inner(u, div_vector(p, h), h)
    assert abs(res) <= 1e-12 * (norm(u, h) * norm(p, h) + 1)


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=finite))
def test_quantization_error(x):
    q = quantize(x).astype(float) / 255.0
    assert np.max(np.abs(q - np.clip(x, 0, 1))) <= 1 / 510 + 1e-15


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5))
def test_energy_invariant_under_global_shift(seed, c):
    # shifting u and f together leaves every term unchanged
    rng = np.random.default_rng(seed)
    f = rng.uniform(0, 1, (5, 5))
    u = rng.standard_normal((5, 5))
    v = rng.standard_normal((2, 5, 5))
    params = EnergyParams()
    a = energy_E(u, v, Mask.full(f), params)
    b = energy_E(u + c, v, Mask.full(f + c), params)
    assert abs(a - b) <= 1e-9 * (1 + abs(a))


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 0.5))
def test_staircase_fraction_in_unit_interval(seed, tol):
    u = np.random.default_rng(seed).uniform(0, 1, (12, 12))
    assert 0.0 <= staircase_metric(u, tol) <= 1.0
