"""The truncated operator and nonlinearity behind every shot.

The curvature operator phi(s) = s / sqrt(1 - s^2) blows up at |s| = 1, so the
solver never integrates it directly.  Instead it builds a globally Lipschitz
surrogate: phi is continued affinely beyond a computable slope bound gamma,
and the nonlinearity q(r) g(u) is ramped to zero once |u| passes the domain
radius R.  Solutions of the surrogate boundary value problem are solutions of
the original one, because a priori bounds keep them inside the unmodified
region.  This script visualizes both modifications for the reference problem
N = 2, R = 10, lambda = 5, g(u) = u^3.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from minkshoot import build_truncation, phi, problem_from_dict

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

spec = problem_from_dict({
    "dimension": 2,
    "geometry": {"ball": {"R": 10.0}},
    "lambda": 5.0,
    "bc": "dirichlet",
    "q": "1",
    "g": "u^3",
    "delta": 1.0,
})
system = build_truncation(spec)

print(f"bound on |q g| over the relevant box:  M = {system.M:.6g}")
print(f"slope bound:                       gamma = {system.gamma:.15f}")
print(f"flux at the slope bound:      phi(gamma) = {system.flux_at_gamma:.6g}")
print(f"affine continuation slope: phi'(gamma) = {system.slope_out:.6g}")

# phi vs its truncation.  gamma is extremely close to 1 here, so on a plot
# the two are indistinguishable near the origin; zoom on the flux axis.
y = np.linspace(-3.0 * system.flux_at_gamma, 3.0 * system.flux_at_gamma, 2001)
s_true = np.clip(y / np.sqrt(1.0 + y * y), -0.999999, 0.999999)

fig, axes = plt.subplots(1, 2, figsize=(10.5, 4.0))
axes[0].plot(y, system.phiT_inv(y), label="truncated inverse")
axes[0].plot(y, s_true, "--", label="exact inverse")
axes[0].set_xlabel("flux y")
axes[0].set_ylabel("slope")
axes[0].set_title("inverse operator: exact vs truncated")
axes[0].legend()

u = np.linspace(-12.0, 12.0, 2001)
axes[1].plot(u, system.fT(np.zeros_like(u), u), label="ramped u^3")
axes[1].plot(u, u ** 3, "--", lw=0.8, label="u^3")
axes[1].set_ylim(-1.3 * system.M, 1.3 * system.M)
axes[1].axvline(10.0, color="k", lw=0.5)
axes[1].axvline(11.0, color="k", lw=0.5)
axes[1].set_xlabel("u")
axes[1].set_title("nonlinearity with the amplitude ramp on [R, R+1]")
axes[1].legend()
fig.tight_layout()
fig.savefig(os.path.join(OUT, "truncated_operator.svg"))
print(f"figure written to {OUT}/truncated_operator.svg")

# the surrogate never sees slopes beyond gamma: phiT_inv is 1-Lipschitz and
# bounded slopes follow from the flux bound |v| <= lam M R
print(f"phiT_inv(lam M R) = {system.phiT_inv(5.0 * system.M * 10.0):.15f} "
      f"(= gamma, the largest slope any shot can attain)")
