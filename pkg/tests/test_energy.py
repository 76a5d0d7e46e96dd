import math

import numpy as np
import pytest
from scipy import integrate

from lineargrowth import (
    DataTerm,
    EnergyParams,
    Mask,
    PiecewiseSignal1D,
    ShapeError,
    SolverConfig,
    energy_and_grad,
    energy_E,
    energy_Edelta,
    grad_Edelta,
    grad_scalar,
    grad_vector,
    make_min_surface,
    make_mu_elliptic,
    minimize_delta,
    relaxed_energy_1d,
    synth,
)
from lineargrowth.energy import adaptive_simpson
from oracles import central_difference, energy_loop

DATA_TERMS = [DataTerm(), DataTerm("power", 0.8, 1.5), DataTerm("linear_growth", 2.0)]
DENSITIES = [make_mu_elliptic(1.3), make_min_surface(0.5)]


def _instance(seed, shape=(6, 7), holes=True, h=1.0):
    rng = np.random.default_rng(seed)
    f = rng.uniform(0, 1, shape)
    observed = rng.uniform(size=shape) > (0.3 if holes else -1)
    observed[0, 0] = True
    u = rng.standard_normal(shape)
    v = rng.standard_normal((2,) + shape)
    return Mask(observed, f, h), u, v


@pytest.mark.parametrize("data", DATA_TERMS, ids=lambda d: d.kind)
@pytest.mark.parametrize("F", DENSITIES, ids=str)
def test_energy_matches_pixel_loop(F, data):
    mask, u, v = _instance(0, h=0.5)
    G = make_mu_elliptic(1.7)
    params = EnergyParams(0.7, 3.0, F, G, data, delta=0.05)
    phi = lambda t: float(data.value(t))
    ref = energy_loop(u, v, mask.observed, mask.f, 0.7, 3.0, (F.kind, F.param), (G.kind, G.param), phi, 0.05, 0.5)
    assert energy_Edelta(u, v, mask, params) == pytest.approx(ref, rel=1e-12)
    ref0 = energy_loop(u, v, mask.observed, mask.f, 0.7, 3.0, (F.kind, F.param), (G.kind, G.param), phi, 0.0, 0.5)
    assert energy_E(u, v, mask, params) == pytest.approx(ref0, rel=1e-12)


def test_energy_at_origin():
    mask, _, _ = _instance(1, h=0.25)
    zero_u = np.zeros(mask.shape)
    zero_v = np.zeros((2,) + mask.shape)
    expected = 0.25**2 * np.sum(mask.f[mask.observed] ** 2)
    for delta in (0.0, 0.1, 10.0):
        params = EnergyParams(delta=delta)
        assert energy_Edelta(zero_u, zero_v, mask, params) == pytest.approx(expected, rel=1e-14)
        assert energy_E(zero_u, zero_v, mask, params) == pytest.approx(expected, rel=1e-14)


def test_regularization_term():
    mask, u, v = _instance(2)
    params = EnergyParams(delta=0.3)
    extra = 0.15 * (np.sum(grad_scalar(u) ** 2) + np.sum(grad_vector(v) ** 2))
    diff = energy_Edelta(u, v, mask, params) - energy_E(u, v, mask, params)
    assert diff == pytest.approx(extra, rel=1e-12)


@pytest.mark.parametrize("data", DATA_TERMS, ids=lambda d: d.kind)
@pytest.mark.parametrize("F", DENSITIES, ids=str)
def test_gradient_directional_derivative(F, data):
    mask, u, v = _instance(3, shape=(8, 8), h=0.5)
    params = EnergyParams(1.3, 4.0, F, make_mu_elliptic(1.4), data, delta=0.02)
    rng = np.random.default_rng(4)
    du = rng.standard_normal(u.shape)
    dv = rng.standard_normal(v.shape)
    gu, gv = grad_Edelta(u, v, mask, params)
    analytic = 0.25 * (np.sum(gu * du) + np.sum(gv * dv))
    n = u.size

    def energy(x):
        return energy_Edelta(x[:n].reshape(u.shape), x[n:].reshape(v.shape), mask, params)

    x = np.concatenate([u.ravel(), v.ravel()])
    d = np.concatenate([du.ravel(), dv.ravel()])
    assert analytic == pytest.approx(central_difference(energy, x, d), rel=1e-5)


def test_gradient_small_at_solver_output():
    f, _ = synth("step", 12, 0.05, 0)
    mask = Mask.full(f)
    params = EnergyParams(1.0, 10.0, make_mu_elliptic(1.5), make_mu_elliptic(1.5), delta=1e-2)
    init = (f.copy(), np.zeros((2,) + f.shape))
    u, v, rec = minimize_delta(init, mask, params, SolverConfig(grad_tol=1e-7))
    gu, gv = grad_Edelta(u, v, mask, params)
    assert rec.converged
    assert max(np.abs(gu).max(), np.abs(gv).max()) <= 1e-7


def test_energy_shape_mismatch():
    mask, u, v = _instance(5)
    with pytest.raises(ShapeError):
        energy_and_grad(u[:-1], v, mask, EnergyParams())
    with pytest.raises(ShapeError):
        energy_E(u, v[:1], mask, EnergyParams())


def test_adaptive_simpson():
    assert adaptive_simpson(math.sin, 0.0, math.pi) == pytest.approx(2.0, abs=1e-10)
    assert adaptive_simpson(lambda x: x**0.5, 0.0, 1.0, tol=1e-12) == pytest.approx(2 / 3, abs=1e-8)


@pytest.mark.parametrize("G", [make_mu_elliptic(1.5), make_mu_elliptic(1.2), make_min_surface(0.3)], ids=str)
def test_relaxed_unit_step(G):
    params = EnergyParams(1.0, 2.5, make_mu_elliptic(1.5), G)
    sig = PiecewiseSignal1D((0.0, 0.5, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 0.0))
    assert relaxed_energy_1d(sig, params) == pytest.approx(2.5 * G.slope, abs=1e-10)


def test_relaxed_step_with_constant_v():
    G = make_mu_elliptic(1.5)
    params = EnergyParams(1.0, 2.0, make_mu_elliptic(1.5), G)
    c, L = 0.7, 3.0
    sig = PiecewiseSignal1D((0.0, 1.2, L), (0.0, 1.0), (0.0, L), (c, c))
    expected = 2.0 * float(G.g(c)) * L + 2.0 * G.slope
    assert relaxed_energy_1d(sig, params) == pytest.approx(expected, abs=1e-10)


def test_relaxed_smooth_signal_matches_quadrature():
    F, G = make_mu_elliptic(1.3), make_min_surface(0.4)
    data = DataTerm("power", 1.0, 1.5)
    params = EnergyParams(0.8, 1.7, F, G, data)
    edges = (0.0, 0.4, 1.0)
    slopes = (1.5, -0.5)
    values = (0.2, 0.2 + 1.5 * 0.4)  # continuous at 0.4
    nodes, vv = (0.0, 0.3, 1.0), (0.0, 2.0, -1.0)
    sig = PiecewiseSignal1D(edges, values, nodes, vv, slopes)
    assert sig.jumps() == pytest.approx([0.0], abs=1e-15)
    f = lambda x: 0.5 * math.sin(3 * x)

    def u(x):
        return values[0] + slopes[0] * x if x < 0.4 else values[1] + slopes[1] * (x - 0.4)

    def integrand(x):
        du = slopes[0] if x < 0.4 else slopes[1]
        v = float(np.interp(x, nodes, vv))
        dv = (2.0 / 0.3) if x < 0.3 else (-3.0 / 0.7)
        return (0.8 * float(F.g(abs(dv))) + 1.7 * float(G.g(abs(du - v)))
                + float(data.value(abs(u(x) - f(x)))))

    ref, _ = integrate.quad(integrand, 0.0, 1.0, points=(0.3, 0.4), epsabs=1e-13, epsrel=1e-13, limit=200)
    assert relaxed_energy_1d(sig, params, f=f, tol=1e-12) == pytest.approx(ref, abs=1e-8)


def test_piecewise_signal_validation():
    from lineargrowth import DomainError

    with pytest.raises(DomainError):
        PiecewiseSignal1D((0.0, 0.0), (1.0,), (0.0, 1.0), (0.0, 0.0))
    with pytest.raises(DomainError):
        PiecewiseSignal1D((0.0, 1.0), (1.0, 2.0), (0.0, 1.0), (0.0, 0.0))
    with pytest.raises(DomainError):
        PiecewiseSignal1D((0.0, 1.0), (1.0,), (0.2, 1.0), (0.0, 0.0))
