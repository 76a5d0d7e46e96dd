"""
Denoising a noisy step
======================

A 32x32 step edge with Gaussian noise is cleaned by the coupled model.  The
solver walks down a delta schedule and each stage reports its energy and a
duality-gap certificate.
"""

import numpy as np

from lineargrowth import EnergyParams, Mask, SolverConfig, continuation_solve, make_mu_elliptic, synth

noisy, clean = synth("step", 32, noise_sigma=0.05, seed=0)
print(f"noisy rms error: {np.sqrt(np.mean((noisy - clean) ** 2)):.4f}")

# alpha weighs the second-order part, beta the coupling of grad u and v
params = EnergyParams(alpha=1.0, beta=10.0, F=make_mu_elliptic(1.5), G=make_mu_elliptic(1.5))
u, v, report = continuation_solve(Mask.full(noisy), params, SolverConfig())

for s in report.stages:
    print(f"delta={s.delta:8.1e}  E={s.energy:10.5f}  iters={s.iterations:5d}  "
          f"gap={s.certificate.normalized_gap:.2e}")

print(f"restored rms error: {np.sqrt(np.mean((u - clean) ** 2)):.4f}")
# the edge is smoothed over a few pixels rather than kept as a sharp jump
print("row 16 around the edge:", np.round(u[16, 13:19], 3))
