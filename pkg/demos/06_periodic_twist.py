"""Periodic problem on the line: twist annulus and return-map fixed points.

For a T-periodic weight the relevant object is the Poincare return map of
u' = phi^{-1}(v), v' = -lam q(t) g(u) over one period.  Small circles rotate
slowly (the nonlinearity is superlinear at 0), very large ones rotate slowly
too (the truncation freezes far-out states), but for lam large enough some
intermediate circle completes more than a full clockwise turn.  That twist
pattern forces fixed points of the return map -- T-periodic solutions --
inside the annulus.

The script maps winding versus starting radius for q = 1, g = u^3, T = 2 pi,
lam = 5, then hunts fixed points inside the twisted annulus with a damped
Newton iteration on P(z) - z.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from minkshoot.periodic import PeriodicSpec, find_periodic, poincare_map, verify_twist

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

spec = PeriodicSpec(
    period=2.0 * np.pi,
    q=lambda t: np.ones_like(np.asarray(t, float)),
    g=lambda u: np.asarray(u, float) ** 3,
    lam=5.0, delta=1.0, half_width=10.0,
)
system = spec.truncation()

radii = np.geomspace(1e-3, 12.0, 25)
twist = verify_twist(spec, 1, radii, system=system)
w = np.array(twist["min_windings"]) / (2.0 * np.pi)
print(f"twist found: {twist['twist_found']} "
      f"(witness radius {twist['witness_radius']:.4g})")

fig, ax = plt.subplots(figsize=(7.0, 4.2))
ax.semilogx(radii, w, ".-")
ax.axhline(1.0, color="tab:red", lw=0.8)
ax.set_xlabel("scaled starting radius")
ax.set_ylabel("min winding over start angles / 2 pi")
ax.set_title("inner and outer circles stay below one turn; the middle exceeds it")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "twist_windings.svg"))

# fixed points inside the twisted annulus
radii_sorted = sorted(twist["radii"])
idx = radii_sorted.index(twist["witness_radius"])
inner, outer = radii_sorted[max(idx - 2, 0)], radii_sorted[min(idx + 2, len(radii) - 1)]
fixed = find_periodic(spec, 1, (inner, outer), system=system)
print(f"\nreturn-map fixed points in [{inner:.3g}, {outer:.3g}]:")
for f in fixed:
    print(f"  z = ({f['point'][0]:+.6f}, {f['point'][1]:+.6f})  "
          f"|P(z) - z| = {f['residual']:.1e}  winding = {f['winding'] / np.pi:.4f} pi")

# show one periodic orbit over three periods
if fixed:
    z = fixed[0]["point"]
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    pt = tuple(z)
    for _ in range(3):
        s = poincare_map(spec, pt, system=system)
        pt = s.end
    print(f"\nafter 3 periods the orbit returns to "
          f"({pt[0]:+.6f}, {pt[1]:+.6f}) -- drift {np.hypot(pt[0]-z[0], pt[1]-z[1]):.1e}")
    from scipy.integrate import solve_ivp
    sol = solve_ivp(lambda t, y: [system.phiT_inv(y[1]),
                                  -spec.lam * system.fT(np.mod(t, spec.period), y[0])],
                    (0.0, 3.0 * spec.period), z, rtol=1e-10, atol=1e-12,
                    dense_output=True)
    tt = np.linspace(0.0, 3.0 * spec.period, 4000)
    uu, vv = sol.sol(tt)
    ax.plot(uu, vv / np.sqrt(spec.lam), lw=0.8)
    ax.plot([z[0]], [z[1] / np.sqrt(spec.lam)], "ro", ms=4)
    ax.set_xlabel("u")
    ax.set_ylabel("v / sqrt(lambda)")
    ax.set_aspect("equal")
    ax.set_title("a periodic orbit traced over three periods")
    fig.tight_layout()
    fig.savefig(os.path.join(OUT, "periodic_orbit.svg"))
print(f"figures written to {OUT}/")
