"""Shooting from the center: winding versus shooting parameter.

Each shot starts at u(0) = eta with zero slope and is integrated out to the
boundary.  The state (u, r^{N-1} phi(u')) rotates clockwise around the origin
of the scaled phase plane, and the total rotation theta(R; eta) decides
everything: Dirichlet solutions are the eta with theta(R) = (1/2 + j) pi.

The winding rises from ~0 for tiny eta (the linearization has no room to
oscillate), peaks at intermediate eta, and collapses again as eta approaches
the amplitude ceiling -- which is why every crossing of a target level is hit
twice: once on the way up ("small" branch) and once on the way down ("large").
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from minkshoot import (
    EtaGrid,
    ShotInput,
    build_truncation,
    lift_angle,
    problem_from_dict,
    scan_eta,
    shoot_rk,
)
from minkshoot.shoot import bracket_and_bisect, dirichlet_target

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

spec = problem_from_dict({
    "dimension": 2,
    "geometry": {"ball": {"R": 10.0}},
    "lambda": 5.0,
    "q": "1",
    "g": "u^3",
    "delta": 1.0,
})
system = build_truncation(spec)

grid = EtaGrid(n_geometric=60, n_uniform=200)
etas = grid.values(10.0)
records = scan_eta(system, etas)
windings = np.array([rec.winding for rec in records])
print(f"scanned {len(records)} shots; peak winding {windings.max() / np.pi:.3f} pi "
      f"at eta = {etas[np.argmax(windings)]:.4f}")

fig, ax = plt.subplots(figsize=(7.0, 4.2))
ax.semilogx(etas, windings / np.pi, ".-", ms=3, lw=0.8)
for j in range(4):
    ax.axhline(0.5 + j, color="tab:red", lw=0.6)
    ax.text(1.2e-5, 0.55 + j, f"j = {j}", color="tab:red", fontsize=8)
ax.set_xlabel("shooting parameter eta")
ax.set_ylabel("winding theta(R) / pi")
ax.set_title("each red level is crossed twice: a small and a large solution")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "winding_scan.svg"))

# bisect the j = 2 crossings and draw the phase portrait of both solutions
profiles = bracket_and_bisect(system, records, dirichlet_target(2))
fig, axes = plt.subplots(1, 2, figsize=(10.5, 4.2))
for p in profiles:
    traj = p.trajectory
    rr = np.linspace(0.0, 10.0, 1500)
    axes[0].plot(rr, traj.u_at(rr), label=f"eta = {p.eta:.5g} ({p.branch})")
    axes[1].plot(traj.u, traj.v / np.sqrt(5.0), lw=0.9,
                 label=f"{p.branch}: {len(p.nodal.zero_locations)} interior zeros")
    print(f"j = {p.j} ({p.branch:5s}): eta = {p.eta:.8f}, "
          f"residual = {p.boundary_residual:.2e}, zeros at "
          + ", ".join(f"{z:.4f}" for z in p.nodal.zero_locations))
axes[0].axhline(0.0, color="k", lw=0.5)
axes[0].set_xlabel("r")
axes[0].set_ylabel("u")
axes[0].set_title("profiles with exactly 2 interior zeros")
axes[0].legend(fontsize=8)
axes[1].plot([0], [0], "k+")
axes[1].set_xlabel("u")
axes[1].set_ylabel("v / sqrt(lambda)")
axes[1].set_title("phase plane: 2.5 clockwise half-turns, ending on the v-axis")
axes[1].legend(fontsize=8)
fig.tight_layout()
fig.savefig(os.path.join(OUT, "phase_plane_j2.svg"))
print(f"figures written to {OUT}/winding_scan.svg and {OUT}/phase_plane_j2.svg")

# the lifted angle of the large solution, against the zero levels
p = max(profiles, key=lambda q: q.eta)
lift = lift_angle(p.trajectory)
fig, ax = plt.subplots(figsize=(7.0, 4.0))
ax.plot(p.trajectory.r, lift.theta / np.pi)
for k in range(3):
    ax.axhline(0.5 + k, color="tab:red", lw=0.6)
ax.set_xlabel("r")
ax.set_ylabel("theta / pi")
ax.set_title("lifted angle: each level theta = pi/2 + k pi is a zero of u")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "lifted_angle.svg"))
