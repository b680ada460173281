"""Comparison spirals and rotation thresholds for squeezed planar systems.

For a planar Hamiltonian system x' = X(t, y), y' = -Y(t, x) whose right-hand
sides are squeezed between sign-compatible bounds a_i, b_i, two spiraling
curves built from the energy pair E_A = A_1(y) + A_2(x), E_B = B_1(y) + B_2(x)
control the clockwise rotation from below and above.  This yields, for each
rotation count j, a time bound tau_star and a starting radius rho_star that
force a winding larger than j pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline

from .errors import BoxExceeded, MinkshootError, SpiralBlowup

__all__ = [
    "BoundPair",
    "SpiralEstimate",
    "build_spirals",
    "estimate_thresholds",
    "verify_energy_monotonicity",
    "random_squeezed_system",
    "validate_rotation",
]

EXTENSION_RANGE_FACTOR = 10.0  # coercivity / blowup test range, in units of delta_hat


def _extend_linear(f: Callable, delta_hat: float) -> Callable:
    """Continue f beyond (-delta_hat, delta_hat) linearly with the boundary slope."""
    s0 = delta_hat * (1.0 - 1e-9)
    h = delta_hat * 1e-7
    f_pos, f_neg = float(f(s0)), float(f(-s0))
    slope_pos = (float(f(s0)) - float(f(s0 - h))) / h
    slope_neg = (float(f(-s0 + h)) - float(f(-s0))) / h

    def ext(s):
        s = np.asarray(s, dtype=float)
        out = np.where(
            s > s0,
            f_pos + slope_pos * (s - s0),
            np.where(s < -s0, f_neg + slope_neg * (s + s0), f(np.clip(s, -s0, s0))),
        )
        return float(out) if out.ndim == 0 else out

    return ext


@dataclass
class BoundPair:
    """Sign-compatible corridor bounds: a1 s <= X s <= b1 s, b2 s <= Y s <= a2 s."""

    a1: Callable
    b1: Callable
    a2: Callable
    b2: Callable
    delta_hat: float
    a1e: Callable = field(init=False, repr=False)
    b1e: Callable = field(init=False, repr=False)
    a2e: Callable = field(init=False, repr=False)
    b2e: Callable = field(init=False, repr=False)

    def __post_init__(self):
        if not self.delta_hat > 0:
            raise MinkshootError("delta_hat must be positive")
        for name in ("a1", "b1", "a2", "b2"):
            setattr(self, name + "e", _extend_linear(getattr(self, name), self.delta_hat))
        self.validate()

    def validate(self, n_grid: int = 2001) -> None:
        S = EXTENSION_RANGE_FACTOR * self.delta_hat
        s = np.linspace(-S, S, n_grid)
        s = s[np.abs(s) > 1e-9 * self.delta_hat]
        a1s, b1s = self.a1e(s) * s, self.b1e(s) * s
        a2s, b2s = self.a2e(s) * s, self.b2e(s) * s
        if not (np.all(a1s > 0) and np.all(a1s <= b1s * (1 + 1e-12))):
            raise MinkshootError("corridor condition 0 < a1 s <= b1 s fails on the test grid")
        if not (np.all(b2s > 0) and np.all(b2s <= a2s * (1 + 1e-12))):
            raise MinkshootError("corridor condition 0 < b2 s <= a2 s fails on the test grid")

    # -- energies -------------------------------------------------------------

    def _primitive(self, f: Callable):
        S = EXTENSION_RANGE_FACTOR * self.delta_hat
        s = np.linspace(-S, S, 20001)
        F = CubicSpline(s, f(s)).antiderivative()
        F0 = float(F(0.0))
        return lambda x: F(np.clip(x, -S, S)) - F0

    def energies(self):
        """(E_A, E_B) as callables of (x, y)."""
        A1, A2 = self._primitive(self.a1e), self._primitive(self.a2e)
        B1, B2 = self._primitive(self.b1e), self._primitive(self.b2e)

        def E_A(x, y):
            return A1(y) + A2(x)

        def E_B(x, y):
            return B1(y) + B2(x)

        return E_A, E_B


def _spiral_rate(bounds: BoundPair, outer: bool):
    """Radial growth rate rho'(theta)/rho, piecewise by the sign of x*y."""
    a1, b1 = bounds.a1e, bounds.b1e
    a2, b2 = bounds.a2e, bounds.b2e

    def rate(x, y):
        num_b = b1(y) * x - b2(x) * y
        den_b = b2(x) * x + b1(y) * y
        num_a = a1(y) * x - a2(x) * y
        den_a = a2(x) * x + a1(y) * y
        use_b = (x * y >= 0.0) != outer  # M-: b on xy>=0; M+: b on xy<=0
        if x * y == 0.0:
            use_b = True
        num, den = (num_b, den_b) if use_b else (num_a, den_a)
        if den <= 0.0:
            raise SpiralBlowup("spiral denominator lost positivity")
        return num / den

    return rate


@dataclass
class SpiralPair:
    theta: np.ndarray
    rho_minus: np.ndarray
    rho_plus: np.ndarray

    def at(self, theta):
        return (
            np.interp(theta, self.theta, self.rho_minus),
            np.interp(theta, self.theta, self.rho_plus),
        )


def build_spirals(bounds: BoundPair, theta_span: float, rho0: float,
                  rtol: float = 1e-9, atol: float = 1e-12) -> SpiralPair:
    """Integrate both spiral equations over [0, theta_span] from radius rho0."""
    limit = EXTENSION_RANGE_FACTOR * bounds.delta_hat

    def make_rhs(outer):
        rate = _spiral_rate(bounds, outer)

        def rhs(th, rho):
            r = rho[0]
            if r > limit:
                raise SpiralBlowup("spiral left the coercivity test range")
            x, y = r * np.cos(th), -r * np.sin(th)
            return [r * rate(x, y)]

        return rhs

    thetas = np.linspace(0.0, theta_span, max(int(theta_span * 64), 64))
    sols = []
    for outer in (False, True):
        sol = solve_ivp(make_rhs(outer), (0.0, theta_span), [rho0],
                        t_eval=thetas, rtol=rtol, atol=atol)
        if not sol.success:
            raise SpiralBlowup(f"spiral integration failed: {sol.message}")
        sols.append(sol.y[0])
    return SpiralPair(theta=thetas, rho_minus=sols[0], rho_plus=sols[1])


@dataclass
class SpiralEstimate:
    j: int
    tau_star: float
    rho_star: float
    spirals: SpiralPair
    omega_min: float

    def to_dict(self) -> dict:
        return {
            "j": int(self.j),
            "tau_star": float(self.tau_star),
            "rho_star": float(self.rho_star),
            "omega_min": float(self.omega_min),
        }


def estimate_thresholds(bounds: BoundPair, j: int, margin: float = 1.1,
                        n_angles: int = 256, n_radii: int = 64) -> SpiralEstimate:
    """Numerical (tau_star_j, rho_star_j) certificate for j pi of rotation.

    rho_star is shrunk until the outer spiral stays inside the delta_hat box
    over j pi (plus margin) radians; tau_star comes from the minimal angular
    speed over the annulus the motion can visit, with a safety margin.
    """
    if j < 1:
        raise MinkshootError("j must be >= 1")
    theta_span = j * np.pi * margin + np.pi
    rho0 = bounds.delta_hat * 0.5
    spirals = None
    for _ in range(200):
        if rho0 < 1e-12 * bounds.delta_hat:
            raise BoxExceeded(f"no admissible starting radius for j={j}")
        try:
            spirals = build_spirals(bounds, theta_span, rho0)
        except SpiralBlowup:
            rho0 *= 0.7
            continue
        rho_max = max(float(np.max(spirals.rho_plus)), float(np.max(spirals.rho_minus)))
        if rho_max < 0.95 * bounds.delta_hat:
            break
        rho0 *= 0.7
    else:
        raise BoxExceeded(f"no admissible starting radius for j={j}")

    rho_min = min(float(np.min(spirals.rho_minus)), float(np.min(spirals.rho_plus)))
    r_lo = max(rho_min * 0.9, 1e-9 * bounds.delta_hat)
    r_hi = min(rho_max * 1.1, bounds.delta_hat)
    ang = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    rad = np.linspace(r_lo, r_hi, n_radii)
    TH, RD = np.meshgrid(ang, rad)
    x = RD * np.cos(TH)
    y = -RD * np.sin(TH)
    # lower bound on clockwise angular speed: (Y x + X y)/rho^2 with Y >= b2, X >= a1
    omega = (bounds.b2e(x) * x + bounds.a1e(y) * y) / (RD * RD)
    omega_min = float(np.min(omega))
    if omega_min <= 0.0:
        raise BoxExceeded("angular speed lower bound is not positive on the annulus")
    tau_star = j * np.pi / omega_min * margin
    return SpiralEstimate(j=j, tau_star=tau_star, rho_star=rho0, spirals=spirals,
                          omega_min=omega_min)


def verify_energy_monotonicity(bounds: BoundPair, t: np.ndarray, x: np.ndarray,
                               y: np.ndarray, tol: float = 1e-6) -> dict:
    """Check the quadrant-wise monotonicity of both energies along a path.

    E_A must not decrease while x y >= 0 and not increase while x y <= 0;
    E_B mirrors this.  Violations are measured relative to the energy scale.
    """
    E_A, E_B = bounds.energies()
    ea = E_A(x, y)
    eb = E_B(x, y)
    scale_a = max(float(np.max(np.abs(ea))), 1e-300)
    scale_b = max(float(np.max(np.abs(eb))), 1e-300)
    xy = x * y
    same = (xy[:-1] >= 0) & (xy[1:] >= 0)
    opp = (xy[:-1] <= 0) & (xy[1:] <= 0)
    dea = np.diff(ea)
    deb = np.diff(eb)
    viol_a = max(
        float(np.max(-dea[same] / scale_a, initial=0.0)),
        float(np.max(dea[opp] / scale_a, initial=0.0)),
    )
    viol_b = max(
        float(np.max(deb[same] / scale_b, initial=0.0)),
        float(np.max(-deb[opp] / scale_b, initial=0.0)),
    )
    return {
        "worst_violation_EA": viol_a,
        "worst_violation_EB": viol_b,
        "passed": viol_a <= tol and viol_b <= tol,
    }


def random_squeezed_system(bounds: BoundPair, rng: np.random.Generator):
    """A random time-dependent (X, Y) staying inside the corridor bounds."""
    w1, w2 = rng.uniform(0.3, 3.0, size=2)
    p1, p2 = rng.uniform(0.0, 2.0 * np.pi, size=2)

    def sX(t):
        return 0.5 * (1.0 + np.sin(w1 * t + p1))

    def sY(t):
        return 0.5 * (1.0 + np.sin(w2 * t + p2))

    def X(t, y):
        return bounds.a1e(y) + sX(t) * (bounds.b1e(y) - bounds.a1e(y))

    def Y(t, x):
        return bounds.b2e(x) + sY(t) * (bounds.a2e(x) - bounds.b2e(x))

    return X, Y


def _clockwise_winding(x: np.ndarray, y: np.ndarray) -> float:
    z = x + 1j * y
    if np.any(np.abs(z) == 0.0):
        raise MinkshootError("path touches the origin")
    dang = np.angle(z[1:] / z[:-1])
    if np.any(np.abs(dang) >= np.pi / 2):
        raise MinkshootError("winding samples under-resolved")
    return float(-np.sum(dang))


def validate_rotation(bounds: BoundPair, estimate: SpiralEstimate, n_systems: int = 100,
                      seed: int = 0, rtol: float = 1e-8, atol: float = 1e-11) -> dict:
    """Randomized end-to-end check of the rotation certificate.

    Integrates random squeezed systems from radius rho_star over tau_star and
    verifies winding > j pi with the path staying away from the origin.
    """
    rng = np.random.default_rng(seed)
    j = estimate.j
    results = {"j": j, "n_systems": n_systems, "windings": [], "min_radii": [], "passed": True}
    for _ in range(n_systems):
        X, Y = random_squeezed_system(bounds, rng)
        theta0 = rng.uniform(0.0, 2.0 * np.pi)
        z0 = [estimate.rho_star * np.cos(theta0), -estimate.rho_star * np.sin(theta0)]

        def rhs(t, z):
            return [X(t, z[1]), -Y(t, z[0])]

        sol = solve_ivp(rhs, (0.0, estimate.tau_star * 1.01), z0,
                        rtol=rtol, atol=atol, dense_output=True)
        if not sol.success:
            results["passed"] = False
            continue
        t, (x, y) = sol.t, sol.y
        for _ in range(30):  # subdivide until angle steps are unambiguous
            dang = np.abs(np.angle((x[1:] + 1j * y[1:]) / (x[:-1] + 1j * y[:-1])))
            bad = np.nonzero(dang >= 0.45 * np.pi)[0]
            if bad.size == 0:
                break
            mid = 0.5 * (t[bad] + t[bad + 1])
            xm, ym = sol.sol(mid)
            t = np.insert(t, bad + 1, mid)
            x = np.insert(x, bad + 1, xm)
            y = np.insert(y, bad + 1, ym)
        winding = _clockwise_winding(x, y)
        min_rho = float(np.min(np.hypot(x, y)))
        results["windings"].append(winding)
        results["min_radii"].append(min_rho)
        if not (winding > j * np.pi and min_rho > 1e-6 * estimate.rho_star):
            results["passed"] = False
    return results
