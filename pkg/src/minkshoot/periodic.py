"""Poincare return map and twist-based periodic solutions on the line.

For a T-periodic weight the truncated planar system u' = phiT^{-1}(v),
v' = -lam fT(t, u) is integrated over one period.  Small and very large
starting circles rotate by less than one turn, while for lam beyond a
threshold some intermediate circle rotates by more than 2k pi; fixed points
of the return map inside such a twisted annulus are T-periodic solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import MinkshootError
from .model import ProblemSpec, Ball, TruncatedSystem, build_truncation

__all__ = [
    "PeriodicSpec",
    "ReturnMapSample",
    "poincare_map",
    "verify_twist",
    "find_periodic",
]


@dataclass(frozen=True)
class PeriodicSpec:
    """The 1D periodic problem; truncation uses a configured strip half-width."""

    period: float
    q: Callable
    g: Callable
    lam: float
    delta: float
    half_width: float = 10.0
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10

    def __post_init__(self):
        if not self.period > 0:
            raise MinkshootError("period must be positive")
        if abs(float(self.q(0.0)) - float(self.q(self.period))) > 1e-9 * (
            1.0 + abs(float(self.q(0.0)))
        ):
            raise MinkshootError("q must be T-periodic: q(0) != q(T)")

    def truncation(self) -> TruncatedSystem:
        # reuse the radial truncation with the strip half-width in place of R;
        # the slope bound uses lam*M*T since u' vanishes somewhere on a period
        spec = ProblemSpec(
            dimension=1,
            geometry=Ball(R=self.half_width),
            q=_periodized(self.q, self.period, self.half_width),
            g=self.g,
            lam=self.lam,
            bc="dirichlet",
            delta=min(self.delta, self.half_width * 0.99),
            superlinear=False,
        )
        system = build_truncation(spec)
        # slope bound: u' vanishes somewhere on a period, so |phiT(u')| <= lam M T;
        # take the larger of period and half-width as the integral length scale
        y = self.lam * system.M * max(self.period, self.half_width)
        gamma = y / np.sqrt(1.0 + y * y)
        return TruncatedSystem(source=spec, M=system.M, gamma=float(gamma))


def _periodized(q: Callable, T: float, half_width: float) -> Callable:
    """Wrap q periodically so the truncation's r-grid sampling stays valid."""

    def qp(t):
        return q(np.mod(t, T))

    return qp


@dataclass
class ReturnMapSample:
    start: tuple
    end: tuple
    winding: float


def _integrate_period(spec: PeriodicSpec, system: TruncatedSystem, point,
                      n_periods: int = 1):
    lam = spec.lam
    q, g = spec.q, spec.g
    phiT_inv = system.phiT_inv
    fT = system.fT

    def rhs(t, z):
        return (phiT_inv(z[1]), -lam * fT(np.mod(t, spec.period), z[0]))

    sol = solve_ivp(rhs, (0.0, spec.period * n_periods), list(point),
                    rtol=spec.rel_tol, atol=spec.abs_tol, dense_output=True)
    if not sol.success:
        raise MinkshootError(f"return map integration failed: {sol.message}")
    return sol


def poincare_map(spec: PeriodicSpec, point, system: Optional[TruncatedSystem] = None) -> ReturnMapSample:
    """One period of the flow: end state and lifted clockwise winding."""
    if point[0] == 0.0 and point[1] == 0.0:
        return ReturnMapSample(start=(0.0, 0.0), end=(0.0, 0.0), winding=0.0)
    if system is None:
        system = spec.truncation()
    sol = _integrate_period(spec, system, point)
    t, (u, v) = sol.t, sol.y
    scale = 1.0 / np.sqrt(spec.lam)
    for _ in range(30):
        z = u + 1j * v * scale
        if np.any(np.abs(z) == 0.0):
            raise MinkshootError("return map path touched the origin")
        dang = np.abs(np.angle(z[1:] / z[:-1]))
        bad = np.nonzero(dang >= 0.45 * np.pi)[0]
        if bad.size == 0:
            break
        mid = 0.5 * (t[bad] + t[bad + 1])
        um, vm = sol.sol(mid)
        t = np.insert(t, bad + 1, mid)
        u = np.insert(u, bad + 1, um)
        v = np.insert(v, bad + 1, vm)
    z = u + 1j * v * scale
    winding = float(-np.sum(np.angle(z[1:] / z[:-1])))
    return ReturnMapSample(
        start=(float(point[0]), float(point[1])),
        end=(float(u[-1]), float(v[-1])),
        winding=winding,
    )


def verify_twist(spec: PeriodicSpec, k: int, radius_grid, n_angles: int = 8,
                 system: Optional[TruncatedSystem] = None) -> dict:
    """Search the radius grid for the twist pattern needed for k full turns.

    Reports, per radius, the minimum winding over starting angles; the twist
    holds when the inner and outer radii wind by less than 2 pi while some
    intermediate radius winds by more than 2 k pi.
    """
    if k < 1:
        raise MinkshootError("k must be >= 1")
    if system is None:
        system = spec.truncation()
    sq = np.sqrt(spec.lam)
    radii = np.asarray(radius_grid, dtype=float)
    min_windings = []
    for rho in radii:
        ws = []
        for ang in np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False):
            # scaled circle: (u, v/sqrt(lam)) of radius rho
            point = (rho * np.cos(ang), -sq * rho * np.sin(ang))
            ws.append(poincare_map(spec, point, system=system).winding)
        min_windings.append(min(ws))
    min_windings = np.array(min_windings)

    twist_idx = np.nonzero(min_windings > 2.0 * k * np.pi)[0]
    inner_ok = min_windings[0] < 2.0 * np.pi
    outer_ok = min_windings[-1] < 2.0 * np.pi
    found = bool(twist_idx.size > 0 and inner_ok and outer_ok)
    report = {
        "k": int(k),
        "radii": radii.tolist(),
        "min_windings": min_windings.tolist(),
        "inner_ok": bool(inner_ok),
        "outer_ok": bool(outer_ok),
        "twist_found": found,
        "witness_radius": float(radii[twist_idx[0]]) if twist_idx.size else None,
    }
    return report


def find_periodic(spec: PeriodicSpec, j: int, annulus_radii, n_seeds_r: int = 3,
                  n_seeds_ang: int = 8, residual_tol: float = 1e-8,
                  winding_tol: float = np.pi / 2, max_newton: int = 40,
                  system: Optional[TruncatedSystem] = None) -> list[dict]:
    """Grid-seeded damped Newton search for fixed points of the return map.

    Accepted points satisfy |P(z) - z| < residual_tol and carry winding
    2 j pi within tolerance.  Absence of results does not prove nonexistence.
    """
    if system is None:
        system = spec.truncation()
    r_in, r_out = annulus_radii
    sq = np.sqrt(spec.lam)

    def P(z):
        s = poincare_map(spec, (z[0], z[1]), system=system)
        return np.array(s.end), s.winding

    def G(z):
        end, _w = P(z)
        return end - z

    fixed = []
    for rho in np.linspace(r_in, r_out, n_seeds_r):
        for ang in np.linspace(0.0, 2.0 * np.pi, n_seeds_ang, endpoint=False):
            z = np.array([rho * np.cos(ang), -sq * rho * np.sin(ang)])
            ok = False
            for _ in range(max_newton):
                g = G(z)
                if float(np.hypot(*g)) < residual_tol:
                    ok = True
                    break
                h = 1e-7 * max(1.0, float(np.hypot(*z)))
                J = np.empty((2, 2))
                for col in range(2):
                    dz = np.zeros(2)
                    dz[col] = h
                    J[:, col] = (G(z + dz) - g) / h
                try:
                    step = np.linalg.solve(J, -g)
                except np.linalg.LinAlgError:
                    break
                if not np.all(np.isfinite(step)):
                    break
                damp = 1.0
                norm_g = float(np.hypot(*g))
                for _ in range(8):
                    z_try = z + damp * step
                    if float(np.hypot(*G(z_try))) < norm_g:
                        break
                    damp *= 0.5
                else:
                    break
                z = z + damp * step
            if not ok:
                continue
            end, winding = P(z)
            residual = float(np.hypot(*(end - z)))
            if residual >= residual_tol:
                continue
            if abs(winding - 2.0 * np.pi * j) > winding_tol:
                continue
            if any(np.hypot(*(z - np.array(f["point"]))) < 1e-3 * max(1.0, r_out)
                   for f in fixed):
                continue
            fixed.append({
                "point": [float(z[0]), float(z[1])],
                "residual": residual,
                "winding": float(winding),
                "j": int(j),
            })
    fixed.sort(key=lambda f: (f["point"][0], f["point"][1]))
    return fixed
