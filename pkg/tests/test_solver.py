import numpy as np
import pytest
from scipy.optimize import minimize

from lineargrowth import (
    ConfigError,
    EnergyParams,
    Mask,
    NumericError,
    SolverConfig,
    continuation_solve,
    energy_and_grad,
    energy_E,
    initial_guess,
    make_mu_elliptic,
    minimize_delta,
    synth,
    uniqueness_probe,
)

PARAMS = EnergyParams(1.0, 10.0, make_mu_elliptic(1.5), make_mu_elliptic(1.5))


def _oracle_minimum(mask, params):
    """Reference minimum of the regularized energy from scipy's L-BFGS-B."""
    shape = mask.shape
    n = shape[0] * shape[1]
    w = mask.spacing**2

    def fun(x):
        e, gu, gv = energy_and_grad(x[:n].reshape(shape), x[n:].reshape((2,) + shape), mask, params)
        # convert the h^2-weighted gradient into the Euclidean one
        return e, w * np.concatenate([gu.ravel(), gv.ravel()])

    u0, v0 = initial_guess(mask)
    x0 = np.concatenate([u0.ravel(), v0.ravel()])
    res = minimize(fun, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": 100_000, "maxcor": 30, "gtol": 1e-13, "ftol": 1e-16})
    return res.fun


@pytest.fixture(scope="module")
def step16():
    f, _ = synth("step", 16, 0.05, 3)
    return Mask.full(f)


@pytest.mark.parametrize("method", ["gd", "lbfgs"])
def test_minimizer_matches_oracle(step16, method):
    params = EnergyParams(1.0, 10.0, make_mu_elliptic(1.5), make_mu_elliptic(1.5), delta=1e-2)
    cfg = SolverConfig(grad_tol=1e-9, method=method)
    u, v, rec = minimize_delta(initial_guess(step16), step16, params, cfg)
    assert rec.converged
    zero = energy_E(np.zeros(step16.shape), np.zeros((2,) + step16.shape), step16, params)
    assert rec.energy <= zero
    ref = _oracle_minimum(step16, params)
    assert abs(rec.energy - ref) <= 1e-6 * abs(ref)
    assert rec.energy <= ref + 1e-12 * abs(ref)


def test_energies_strictly_decrease(step16):
    params = EnergyParams(delta=1e-2)
    for method in ("gd", "lbfgs"):
        _, _, rec = minimize_delta(initial_guess(step16), step16, params, SolverConfig(method=method))
        assert np.all(np.diff(rec.energies) <= 1e-13 * (1 + np.abs(rec.energies[1:])))
        assert rec.iterations == len(rec.energies) - 1


def test_continuation_energies_nonincreasing(step16):
    cfg = SolverConfig(delta_schedule=(1e-1, 1e-2, 1e-3))
    _, _, rep = continuation_solve(step16, PARAMS, cfg)
    plain = [s.certificate.primal for s in rep.stages]
    assert all(b <= a + 1e-9 for a, b in zip(plain, plain[1:]))
    zero = energy_E(np.zeros(step16.shape), np.zeros((2,) + step16.shape), step16, PARAMS)
    assert all(s.energy <= zero + 1e-10 for s in rep.stages)
    assert rep.termination == "converged"
    assert rep.certificate is rep.stages[-1].certificate


def test_max_iters_is_flagged(step16):
    params = EnergyParams(delta=1e-3)
    _, _, rec = minimize_delta(initial_guess(step16), step16, params, SolverConfig(max_iters=3))
    assert rec.status == "max_iters" and rec.iterations == 3
    _, _, rep = continuation_solve(step16, PARAMS, SolverConfig(max_iters=2, delta_schedule=(1e-2,)))
    assert rep.termination == "max_iters"


def test_on_stage_callback(step16):
    seen = []
    continuation_solve(step16, PARAMS, SolverConfig(delta_schedule=(1e-1, 1e-2)),
                       on_stage=lambda u, v, p, rec: seen.append((p.delta, rec.delta)))
    assert seen == [(0.1, 0.1), (0.01, 0.01)]


def test_freeze_v_keeps_v(step16):
    _, v, rec = minimize_delta(initial_guess(step16), step16, EnergyParams(delta=1e-2), SolverConfig(),
                               freeze_v=True)
    assert rec.converged and np.all(v == 0)


def test_config_validation():
    with pytest.raises(ConfigError):
        SolverConfig(grad_tol=0)
    with pytest.raises(ConfigError):
        SolverConfig(delta_schedule=(1e-2, 1e-1))
    with pytest.raises(ConfigError):
        SolverConfig(delta_schedule=())
    with pytest.raises(ConfigError):
        SolverConfig(armijo_c=1.5)
    with pytest.raises(ConfigError):
        SolverConfig(method="newton")
    assert SolverConfig().feas_tol == pytest.approx(1e-5)
    assert SolverConfig().to_dict()["delta_schedule"][0] == 0.1


def test_minimize_errors(step16):
    with pytest.raises(ConfigError):
        minimize_delta(initial_guess(step16), step16, EnergyParams(delta=0.0), SolverConfig())
    u, v = initial_guess(step16)
    u[0, 0] = np.nan
    with pytest.raises(NumericError):
        minimize_delta((u, v), step16, EnergyParams(delta=1e-2), SolverConfig())


def test_stage_record_serialization(step16):
    _, _, rep = continuation_solve(step16, PARAMS, SolverConfig(delta_schedule=(1e-2,)))
    d = rep.stages[0].to_dict()
    assert "wall_time" not in d and "energies" not in d
    assert "wall_time" in rep.stages[0].to_dict(timings=True)
    assert set(d["certificate"]) >= {"primal", "dual", "gap", "normalized_gap", "r1", "r2"}


def test_uniqueness_denoising():
    f, _ = synth("disk", 12, 0.05, 1)
    mask = Mask.full(f)
    cfg = SolverConfig(grad_tol=1e-7, delta_schedule=(1e-2,))
    rep = uniqueness_probe(mask, PARAMS, cfg, seeds=(1, 2))
    assert max(rep.u_observed, rep.coupling, rep.jacobian) <= 10 * cfg.grad_tol
    assert rep.u_missing == 0.0


def test_uniqueness_inpainting_on_observed_part():
    f, _ = synth("step", 12, 0.05, 1)
    observed = np.ones(f.shape, dtype=bool)
    observed[:, 8:] = False
    mask = Mask(observed, f)
    cfg = SolverConfig(grad_tol=1e-8, delta_schedule=(1e-2,))
    rep = uniqueness_probe(mask, PARAMS, cfg, seeds=(1, 2))
    assert max(rep.u_observed, rep.coupling, rep.jacobian) <= 1e-5
    assert np.isfinite(rep.u_missing)
