"""
Reading a duality-gap certificate
=================================

Every stage returns a primal value ``E(u, v)`` and a dual value ``R``.  Weak
duality gives ``R <= min E <= E(u, v)``, so the gap bounds the suboptimality
of the returned pair without knowing the true minimum.
"""

from lineargrowth import EnergyParams, Mask, duality_gap, make_mu_elliptic, SolverConfig, continuation_solve, synth

f, _ = synth("staircase", 24, noise_sigma=0.05, seed=2)
mask = Mask.full(f)
params = EnergyParams(1.0, 10.0, make_mu_elliptic(1.5), make_mu_elliptic(1.5))

u, v, rep = continuation_solve(mask, params, SolverConfig(delta_schedule=(1e-1, 1e-2, 1e-3, 1e-4)))
cert = rep.stages[-1].certificate
print(f"primal {cert.primal:.8f}")
print(f"dual   {cert.dual:.8f}")
print(f"gap    {cert.gap:.2e}  (normalized {cert.normalized_gap:.2e})")

# a crude candidate, u = f and v = 0, has a much larger gap
crude = duality_gap(f, 0 * v, mask, params, 1e-9)
print(f"gap at (f, 0): {crude.gap:.2e}")
