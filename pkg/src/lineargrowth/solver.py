"""Minimization of the regularized energy and continuation in ``delta``.

Each stage runs a monotone first-order method with Armijo backtracking until
the sup-norm of the energy gradient drops below ``grad_tol``.  Two search
directions are available: steepest descent with a Barzilai-Borwein initial
step (``method="gd"``) and limited-memory BFGS (``method="lbfgs"``).  Both
accept only steps satisfying the sufficient-decrease condition, so energies
never increase along a stage.  Once the predicted decrease drops to rounding
level the condition is checked in its derivative form (approximate Armijo
plus the Wolfe curvature condition), which lets tight gradient tolerances be
reached; such steps may change the computed energy by rounding noise only.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .duality import Certificate, duality_gap
from .energy import energy_and_grad
from .errors import ConfigError, NumericError

__all__ = [
    "SolverConfig",
    "StageRecord",
    "SolveReport",
    "UniquenessReport",
    "default_schedule",
    "initial_guess",
    "minimize_delta",
    "continuation_solve",
    "uniqueness_probe",
]

log = logging.getLogger(__name__)

MIN_STEP = 1e-16
# relative size below which energy differences are dominated by rounding
ROUNDOFF = 1e-10
WOLFE_CURV = 0.9
# energy changes this small (relative) are indistinguishable from rounding
NOISE = 1e-13


def default_schedule():
    return tuple(0.1 * 4.0**-k for k in range(6))


@dataclass(frozen=True)
class SolverConfig:
    grad_tol: float = 1e-6
    max_iters: int = 20000
    armijo_c: float = 1e-4
    shrink: float = 0.5
    init_step: float = 1.0
    delta_schedule: tuple = field(default_factory=default_schedule)
    warm_start: bool = True
    method: str = "gd"
    memory: int = 10
    tol_feas: float | None = None

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ConfigError("grad_tol must be positive")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be >= 0")
        if not (0 < self.armijo_c < 1 and 0 < self.shrink < 1 and self.init_step > 0):
            raise ConfigError("Armijo parameters out of range")
        sched = tuple(float(d) for d in self.delta_schedule)
        if not sched:
            raise ConfigError("delta schedule is empty")
        if any(b >= a for a, b in zip(sched, sched[1:])) or sched[-1] <= 0:
            raise ConfigError("delta schedule must be strictly decreasing and positive")
        if self.method not in ("gd", "lbfgs"):
            raise ConfigError(f"unknown method {self.method!r}")
        object.__setattr__(self, "delta_schedule", sched)

    @property
    def feas_tol(self):
        return self.tol_feas if self.tol_feas is not None else 10.0 * self.grad_tol

    def to_dict(self):
        return {
            "grad_tol": self.grad_tol,
            "max_iters": self.max_iters,
            "armijo_c": self.armijo_c,
            "shrink": self.shrink,
            "init_step": self.init_step,
            "delta_schedule": list(self.delta_schedule),
            "warm_start": self.warm_start,
            "method": self.method,
            "memory": self.memory,
            "tol_feas": self.feas_tol,
        }


@dataclass
class StageRecord:
    delta: float
    iterations: int
    energy: float
    grad_norm: float
    status: str
    wall_time: float
    energies: list = field(repr=False, default_factory=list)
    certificate: Certificate | None = None

    @property
    def converged(self):
        return self.status == "converged"

    def to_dict(self, timings=False, trajectory=False):
        d = {
            "delta": self.delta,
            "iterations": self.iterations,
            "energy": self.energy,
            "grad_norm": self.grad_norm,
            "status": self.status,
        }
        if timings:
            d["wall_time"] = self.wall_time
        if trajectory:
            d["energies"] = list(self.energies)
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_dict()
        return d


@dataclass
class SolveReport:
    stages: list = field(default_factory=list)
    termination: str = "converged"

    @property
    def certificate(self):
        return self.stages[-1].certificate if self.stages else None


def initial_guess(mask):
    """``u`` equal to the data, extended by its observed mean; ``v = 0``."""
    u = np.where(mask.observed, mask.f, mask.f[mask.observed].mean())
    return u, np.zeros((2,) + mask.shape)


def _pack(u, v):
    return np.concatenate([np.ravel(u), np.ravel(v)])


def _unpack(x, shape):
    n = shape[0] * shape[1]
    return x[:n].reshape(shape), x[n:].reshape((2,) + shape)


def minimize_delta(init, mask, params, cfg, freeze_v=False):
    """Minimize the regularized energy for ``params.delta > 0`` from ``init``.

    Returns ``(u, v, record)``.  ``record.status`` is ``"converged"``,
    ``"max_iters"`` or ``"line_search_failed"``.  With ``freeze_v`` only
    ``u`` moves; holding ``v = 0`` this is the first-order model
    ``beta G(grad u) + data``.
    """
    if not params.delta > 0:
        raise ConfigError("minimize_delta needs delta > 0")
    u0, v0 = init
    u0 = np.asarray(u0, dtype=float)
    v0 = np.asarray(v0, dtype=float)
    if not (np.all(np.isfinite(u0)) and np.all(np.isfinite(v0))):
        raise NumericError("initial fields contain non-finite values")
    shape = mask.shape
    w = mask.spacing**2
    t_start = time.perf_counter()

    def evaluate(x):
        u, v = _unpack(x, shape)
        e, gu, gv = energy_and_grad(u, v, mask, params)
        if freeze_v:
            gv = np.zeros_like(gv)
        g = _pack(gu, gv)
        if not (np.isfinite(e) and np.all(np.isfinite(g))):
            raise NumericError(f"non-finite energy or gradient at delta={params.delta:g}")
        return e, g

    x = _pack(u0, v0)
    e, g = evaluate(x)
    energies = [e]
    gnorm = float(np.max(np.abs(g)))
    s_hist, y_hist = [], []
    step0 = cfg.init_step
    status = "max_iters"
    it = 0
    while True:
        if gnorm <= cfg.grad_tol:
            status = "converged"
            break
        if it >= cfg.max_iters:
            break
        if cfg.method == "lbfgs":
            d = -_two_loop(g, s_hist, y_hist, w)
            slope = w * float(g @ d)
            if not slope < 0:
                s_hist.clear()
                y_hist.clear()
                d = -g
                slope = -w * float(g @ g)
            t = 1.0 if s_hist else min(1.0, step0 / max(gnorm, 1e-300))
        else:
            d = -g
            slope = -w * float(g @ g)
            t = step0
        accepted = False
        while t >= MIN_STEP:
            x_new = x + t * d
            e_new, g_new = evaluate(x_new)
            if e_new <= e + cfg.armijo_c * t * slope and e_new < e:
                accepted = True
                break
            noise = NOISE * (1.0 + abs(e))
            if -t * slope <= ROUNDOFF * (1.0 + abs(e)) and e_new <= e + noise:
                # predicted decrease is at rounding level: use the
                # derivative form of the Armijo test instead
                # with the curvature half of the Wolfe conditions so that
                # vanishing steps are not accepted
                dslope = w * float(g_new @ d)
                if (2.0 * cfg.armijo_c - 1.0) * slope >= dslope >= WOLFE_CURV * slope:
                    accepted = True
                    break
            t *= cfg.shrink
        if not accepted:
            if cfg.method == "lbfgs" and s_hist:
                # retry from a steepest-descent direction before giving up
                s_hist.clear()
                y_hist.clear()
                continue
            status = "line_search_failed"
            log.warning("line search failed at delta=%g after %d iterations", params.delta, it)
            break
        s = x_new - x
        y = g_new - g
        sy = w * float(s @ y)
        if cfg.method == "lbfgs":
            if sy > 1e-12 * w * float(s @ s):
                s_hist.append(s)
                y_hist.append(y)
                if len(s_hist) > cfg.memory:
                    s_hist.pop(0)
                    y_hist.pop(0)
        else:
            # Barzilai-Borwein estimate for the next trial step
            step0 = float(s @ s) / float(s @ y) if sy > 0 else cfg.init_step
        x, e, g = x_new, e_new, g_new
        gnorm = float(np.max(np.abs(g)))
        energies.append(e)
        it += 1

    u, v = _unpack(x, shape)
    record = StageRecord(
        delta=params.delta,
        iterations=it,
        energy=e,
        grad_norm=gnorm,
        status=status,
        wall_time=time.perf_counter() - t_start,
        energies=energies,
    )
    return u.copy(), v.copy(), record


def _two_loop(g, s_hist, y_hist, w):
    q = g.copy()
    alphas = []
    rhos = []
    for s, y in zip(reversed(s_hist), reversed(y_hist)):
        rho = 1.0 / float(s @ y)
        a = rho * float(s @ q)
        q -= a * y
        alphas.append(a)
        rhos.append(rho)
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= float(s @ y) / float(y @ y)
    for (s, y), a, rho in zip(zip(s_hist, y_hist), reversed(alphas), reversed(rhos)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return q


def continuation_solve(mask, params, cfg, init=None, freeze_v=False, on_stage=None):
    """Run :func:`minimize_delta` along ``cfg.delta_schedule`` with warm starts.

    Every stage record carries a duality certificate (not meaningful when
    ``freeze_v`` is set).  ``on_stage(u, v, stage_params, record)`` is called
    after each stage.  Returns ``(u, v, report)`` for the last stage.
    """
    base = initial_guess(mask) if init is None else init
    u, v = base
    report = SolveReport()
    for delta in cfg.delta_schedule:
        stage_params = replace(params, delta=delta)
        start = (u, v) if cfg.warm_start else base
        u, v, rec = minimize_delta(start, mask, stage_params, cfg, freeze_v)
        rec.certificate = duality_gap(u, v, mask, stage_params, cfg.feas_tol, rec.iterations)
        report.stages.append(rec)
        if on_stage is not None:
            on_stage(u, v, stage_params, rec)
        log.info(
            "delta=%.3g iters=%d energy=%.10g gap=%.3g (%s)",
            delta, rec.iterations, rec.energy, rec.certificate.gap, rec.status,
        )
        if not rec.converged:
            report.termination = rec.status
    return u, v, report


@dataclass
class UniquenessReport:
    seeds: tuple
    u_observed: float
    u_missing: float
    coupling: float
    jacobian: float


def uniqueness_probe(mask, params, cfg, seeds, init_scale=1.0):
    """Solve from random initializations and compare the solutions.

    Distances are sup-norms over all seed pairs of ``u`` on observed pixels,
    ``u`` on missing pixels (reported only), ``grad u - v`` and ``grad v``.
    """
    from .grid import grad_scalar, grad_vector

    h = mask.spacing
    sols = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        u0 = init_scale * rng.standard_normal(mask.shape)
        v0 = init_scale * rng.standard_normal((2,) + mask.shape)
        u, v, _ = continuation_solve(mask, params, cfg, init=(u0, v0))
        sols.append((u, grad_scalar(u, h) - v, grad_vector(v, h)))
    obs = mask.observed
    dist = np.zeros(4)
    for i in range(len(sols)):
        for j in range(i + 1, len(sols)):
            du = np.abs(sols[i][0] - sols[j][0])
            dist = np.maximum(dist, [
                du[obs].max(),
                du[~obs].max() if (~obs).any() else 0.0,
                np.abs(sols[i][1] - sols[j][1]).max(),
                np.abs(sols[i][2] - sols[j][2]).max(),
            ])
    return UniquenessReport(tuple(seeds), *map(float, dist))

