"""Initial value solvers for the truncated radial system.

Two independent routes solve the singular Cauchy problem from r = 0:

* ``shoot_rk`` — adaptive embedded Runge-Kutta 5(4) with dense output,
  started slightly off the origin with a second-order series state;
* ``picard_solve`` — the contraction-mapping iteration in integral form,
  on a fixed Simpson grid, which handles r = 0 natively.

The second serves as an oracle for the first: both must agree to tight
tolerance on a battery of shots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicHermiteSpline

from .errors import MinkshootError, NoConvergence, OriginHit, StepSizeUnderflow
from .model import TruncatedSystem

__all__ = ["ShotInput", "Trajectory", "shoot_rk", "picard_solve", "continuity_probe"]

DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-9
DEFAULT_EPS_SING = 1e-6


@dataclass(frozen=True)
class ShotInput:
    """One shot of the initial value problem.

    For ball spans (r_span[0] == 0) ``eta`` is the center value u(0); for
    annulus spans it is the initial slope u'(r_a) with u(r_a) = 0.
    """

    system: TruncatedSystem
    eta: float
    r_span: tuple[float, float]
    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    eps_sing: float = DEFAULT_EPS_SING

    def __post_init__(self):
        if not self.r_span[0] < self.r_span[1]:
            raise MinkshootError("r_span must be increasing")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise MinkshootError("tolerances must be positive")

    @property
    def is_ball(self) -> bool:
        return self.r_span[0] == 0.0


@dataclass
class Trajectory:
    """Sampled path r -> (u, v) of one shot, with dense evaluation.

    v = r^{N-1} phiT(u'); ``up`` stores u' at the samples.  ``theta`` is
    filled in by the phase module once the angle is lifted.
    """

    r: np.ndarray
    u: np.ndarray
    v: np.ndarray
    up: np.ndarray
    eta: float
    system: TruncatedSystem
    is_ball: bool
    method: str
    theta: Optional[np.ndarray] = None
    _u_interp: object = field(default=None, repr=False)
    _v_interp: object = field(default=None, repr=False)

    def u_at(self, r):
        return self._u_interp(r)

    def v_at(self, r):
        return self._v_interp(r)

    def max_slope(self) -> float:
        return float(np.max(np.abs(self.up)))

    def min_radius_sq(self) -> float:
        return float(np.min(self.u * self.u + self.v * self.v))

    def terminal(self) -> tuple[float, float]:
        return float(self.u[-1]), float(self.v[-1])

    def to_csv(self, path) -> None:
        """Write samples as CSV with header r,u,v,theta (15 significant digits)."""
        theta = self.theta if self.theta is not None else np.full_like(self.r, np.nan)
        with open(path, "w") as fh:
            fh.write("r,u,v,theta\n")
            for row in zip(self.r, self.u, self.v, theta):
                fh.write(",".join(f"{x:.15g}" for x in row) + "\n")


def _series_state(system: TruncatedSystem, eta: float, r: float):
    """Second-order expansion around r = 0: u'(0) = 0, u(0) = eta."""
    N = system.source.dimension
    lam = system.source.lam
    f0 = system.fT(0.0, eta)
    u = eta - lam * f0 * r * r / (2.0 * N)
    v = -lam * f0 * r**N / N
    return u, v


def _check_origin(inp: ShotInput, u: np.ndarray, v: np.ndarray) -> None:
    if inp.is_ball and inp.eta != 0.0:
        floor = (1e-12 * max(abs(inp.eta), 1.0)) ** 2
        if float(np.min(u * u + v * v)) < floor:
            raise OriginHit(f"shot eta={inp.eta} passed through the phase-plane origin")


def _refine_samples(r, u, v, u_of, v_of, lam):
    """Insert dense-output samples until scaled angle increments stay below pi/2.

    Scaled state is (u, v / sqrt(lam)); skip intervals touching the origin.
    """
    scale = 1.0 / np.sqrt(lam)
    for _ in range(40):
        z = u + 1j * v * scale
        mask = (np.abs(z[:-1]) > 0) & (np.abs(z[1:]) > 0)
        dang = np.abs(np.angle(z[1:] / np.where(z[:-1] == 0, 1.0, z[:-1])))
        bad = np.nonzero(mask & (dang >= 0.45 * np.pi))[0]
        if bad.size == 0:
            return r, u, v
        mid = 0.5 * (r[bad] + r[bad + 1])
        r = np.insert(r, bad + 1, mid)
        u = np.insert(u, bad + 1, u_of(mid))
        v = np.insert(v, bad + 1, v_of(mid))
    return r, u, v


def shoot_rk(inp: ShotInput) -> Trajectory:
    """Adaptive RK45 solution of u' = phiT^{-1}(v / r^{N-1}), v' = -lam r^{N-1} fT(r, u).

    Ball shots start at r_start = eps_sing * r_b from a second-order series
    state; the returned samples include every accepted step, subdivided via
    dense output so the scaled angle never jumps by pi/2 between samples.
    """
    system = inp.system
    N = system.source.dimension
    lam = system.source.lam
    r_a, r_b = inp.r_span
    phiT_inv = system.phiT_inv
    fT = system.fT

    def rhs(r, y):
        w = r ** (N - 1)
        return (phiT_inv(y[1] / w), -lam * w * fT(r, y[0]))

    if inp.is_ball:
        r_start = inp.eps_sing * r_b
        y0 = _series_state(system, inp.eta, r_start)
    else:
        r_start = r_a
        y0 = (0.0, r_a ** (N - 1) * system.phiT(inp.eta))

    sol = solve_ivp(
        rhs,
        (r_start, r_b),
        y0,
        method="RK45",
        rtol=inp.rel_tol,
        atol=inp.abs_tol,
        dense_output=True,
    )
    if not sol.success:
        raise StepSizeUnderflow(f"integrator failed: {sol.message}")

    r = sol.t
    u, v = sol.y
    dense = sol.sol

    def u_of(rr):
        return dense(rr)[0]

    def v_of(rr):
        return dense(rr)[1]

    if inp.eta != 0.0:
        r, u, v = _refine_samples(r, u, v, u_of, v_of, lam)

    if inp.is_ball:
        # prepend the exact initial state at the origin
        r = np.concatenate(([0.0], r))
        u = np.concatenate(([inp.eta], u))
        v = np.concatenate(([0.0], v))

    with np.errstate(divide="ignore", invalid="ignore"):
        up = system.phiT_inv(np.where(r > 0, v / np.where(r > 0, r, 1.0) ** (N - 1), 0.0))
    if inp.is_ball:
        up[0] = 0.0

    traj = Trajectory(
        r=r,
        u=u,
        v=v,
        up=up,
        eta=inp.eta,
        system=system,
        is_ball=inp.is_ball,
        method="rk45",
        _u_interp=_DenseEval(dense, 0, r_start, inp, series=inp.is_ball),
        _v_interp=_DenseEval(dense, 1, r_start, inp, series=inp.is_ball),
    )
    _check_origin(inp, u, v)
    return traj


class _DenseEval:
    """Dense evaluation of one component, with the series patch below r_start."""

    def __init__(self, dense, component, r_start, inp, series):
        self.dense = dense
        self.component = component
        self.r_start = r_start
        self.inp = inp
        self.series = series

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        out = np.empty_like(r)
        inside = r >= self.r_start
        if np.any(inside):
            out[inside] = np.atleast_2d(self.dense(r[inside]))[self.component]
        if np.any(~inside):
            if self.series:
                uv = _series_state(self.inp.system, self.inp.eta, r[~inside])
                out[~inside] = uv[self.component]
            else:
                out[~inside] = np.nan
        return float(out[0]) if scalar else out


def picard_solve(inp: ShotInput, max_iter: int = 400, n_panels: int = 65536) -> Trajectory:
    """Fixed-point iteration for the integral form of the ball Cauchy problem.

    Iterates Tu(r) = eta - int_0^r phiT^{-1}( s^{1-N} int_0^s lam t^{N-1}
    fT(t, u(t)) dt ) ds on a uniform Simpson grid until successive iterates
    are closer than abs_tol in sup norm.  Returns the trajectory together
    with the recorded iterate distances (``traj.picard_distances``).
    """
    if not inp.is_ball:
        raise MinkshootError("the fixed-point operator is stated from r = 0")
    system = inp.system
    N = system.source.dimension
    lam = system.source.lam
    r = np.linspace(0.0, inp.r_span[1], n_panels + 1)
    w = r ** (N - 1)
    with np.errstate(divide="ignore"):
        inv_w = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0) ** (N - 1), 0.0)

    u = np.full_like(r, inp.eta)
    distances = []
    for _ in range(max_iter):
        integrand = lam * w * system.fT(r, u)
        inner = cumulative_simpson(integrand, x=r, initial=0.0)
        slope = -system.phiT_inv(inner * inv_w)
        slope[0] = 0.0  # inner ~ r^N, so the quotient vanishes at the origin
        u_next = inp.eta + cumulative_simpson(slope, x=r, initial=0.0)
        d = float(np.max(np.abs(u_next - u)))
        distances.append(d)
        u = u_next
        if d < inp.abs_tol:
            break
    else:
        raise NoConvergence(f"picard iteration did not reach {inp.abs_tol} in {max_iter} steps")

    integrand = lam * w * system.fT(r, u)
    inner = cumulative_simpson(integrand, x=r, initial=0.0)
    v = -inner
    up = -system.phiT_inv(inner * inv_w)
    up[0] = 0.0
    vp = -integrand

    traj = Trajectory(
        r=r,
        u=u,
        v=v,
        up=up,
        eta=inp.eta,
        system=system,
        is_ball=True,
        method="picard",
        _u_interp=CubicHermiteSpline(r, u, up),
        _v_interp=CubicHermiteSpline(r, v, vp),
    )
    traj.picard_distances = np.array(distances)
    _check_origin(inp, u, v)
    return traj


def picard_distance_bound(system: TruncatedSystem, R: float, k: np.ndarray, d0: float) -> np.ndarray:
    """Contraction bound on iterate distances: (L^k R^{2k} / k!) d0, in logs.

    L = (lam / N) Lip(phiT^{-1}) Lip(fT).
    """
    from scipy.special import gammaln

    lam = system.source.lam
    N = system.source.dimension
    L = lam / N * system.lip_phiT_inv() * system.lip_fT()
    k = np.asarray(k, dtype=float)
    logb = k * np.log(L) + 2.0 * k * np.log(R) - gammaln(k + 1.0) + np.log(max(d0, 1e-300))
    return np.exp(np.minimum(logb, 700.0))


def continuity_probe(system: TruncatedSystem, eta_center: float, radii, r_span=None,
                     n_eval: int = 512, **shot_kwargs) -> dict:
    """Sup-norm distance of perturbed shots from the center shot, per radius.

    Distances must decay as the perturbation radius shrinks (continuous
    dependence on the shooting datum).
    """
    if r_span is None:
        r_span = system.source.geometry.r_span
    grid = np.linspace(r_span[0], r_span[1], n_eval)
    center = shoot_rk(ShotInput(system, eta_center, r_span, **shot_kwargs))
    uc = center.u_at(grid)
    out = {"eta_center": eta_center, "radii": list(radii), "distances": []}
    for rho in radii:
        if rho == 0.0:
            out["distances"].append(0.0)
            continue
        d = 0.0
        for eta in (eta_center - rho, eta_center + rho):
            traj = shoot_rk(ShotInput(system, eta, r_span, **shot_kwargs))
            d = max(d, float(np.max(np.abs(traj.u_at(grid) - uc))))
        out["distances"].append(d)
    return out
