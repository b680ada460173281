"""Problem definitions and the globally Lipschitz truncated system.

The radial Minkowski-curvature equation (r^{N-1} phi(u'))' + lam r^{N-1} q(r) g(u) = 0
uses phi(s) = s / sqrt(1 - s^2).  Shooting works on a modified system in which
phi is extended affinely beyond a computable slope bound gamma < 1 and the
nonlinearity q(r) g(u) is ramped to zero for |u| >= R + 1.  Solutions of the
modified boundary value problem coincide with solutions of the original one,
so all downstream machinery operates on the truncation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateProblem, ExpressionError, MinkshootError, NonFiniteWeight, SlopeOutOfRange
from .expressions import compile_expression

__all__ = [
    "Ball",
    "Annulus",
    "ProblemSpec",
    "TruncatedSystem",
    "phi",
    "phi_prime",
    "phi_inv",
    "build_truncation",
    "problem_from_dict",
    "problem_from_json",
]


def phi(s):
    """phi(s) = s / sqrt(1 - s^2), defined for |s| < 1."""
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) >= 1.0):
        raise SlopeOutOfRange("phi requires |s| < 1")
    out = s / np.sqrt(1.0 - s * s)
    return float(out) if out.ndim == 0 else out


def phi_prime(s):
    """phi'(s) = (1 - s^2)^{-3/2}."""
    s = np.asarray(s, dtype=float)
    if np.any(np.abs(s) >= 1.0):
        raise SlopeOutOfRange("phi' requires |s| < 1")
    out = (1.0 - s * s) ** -1.5
    return float(out) if out.ndim == 0 else out


def phi_inv(y):
    """Inverse of phi in closed form: y / sqrt(1 + y^2)."""
    y = np.asarray(y, dtype=float)
    out = y / np.sqrt(1.0 + y * y)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Ball:
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise MinkshootError("ball radius must be positive")

    @property
    def r_span(self):
        return (0.0, self.R)

    @property
    def outer(self):
        return self.R


@dataclass(frozen=True)
class Annulus:
    R1: float
    R2: float

    def __post_init__(self):
        if not 0 < self.R1 < self.R2:
            raise MinkshootError("annulus radii must satisfy 0 < R1 < R2")

    @property
    def r_span(self):
        return (self.R1, self.R2)

    @property
    def outer(self):
        return self.R2


@dataclass(frozen=True)
class ProblemSpec:
    """A radial boundary value problem instance.

    ``q`` maps radius to weight, ``g`` the state to the nonlinearity value;
    both must accept floats and numpy arrays.  ``delta`` is the radius of the
    interval around 0 on which the local sign condition g(u) u > 0 holds.
    """

    dimension: int
    geometry: Ball | Annulus
    q: Callable
    g: Callable
    lam: float
    bc: str = "dirichlet"
    delta: float = 1.0
    superlinear: bool = True

    def __post_init__(self):
        if self.dimension < 1:
            raise MinkshootError("dimension must be >= 1")
        if not self.lam > 0:
            raise MinkshootError("lambda must be positive")
        if self.bc not in ("dirichlet", "neumann"):
            raise MinkshootError("bc must be 'dirichlet' or 'neumann'")
        if not 0 < self.delta < self.geometry.outer:
            raise MinkshootError("delta must lie in (0, R)")

    def validate(self, n_grid: int = 201, superlin_tol: float = 1e-3) -> None:
        """Check the sampled invariants: q finite, sign condition, superlinearity."""
        r = np.linspace(self.geometry.r_span[0], self.geometry.r_span[1], n_grid)
        qv = np.asarray(self.q(r), dtype=float)
        if not np.all(np.isfinite(qv)):
            raise NonFiniteWeight("q produced non-finite values on the radial interval")
        u = np.linspace(-self.delta, self.delta, n_grid)
        u = u[np.abs(u) > 1e-12 * self.delta]
        gv = np.asarray(self.g(u), dtype=float)
        if abs(float(self.g(0.0))) > 1e-14:
            raise MinkshootError("g(0) must vanish")
        if not np.all(gv * u > 0):
            raise MinkshootError("sign condition g(u) u > 0 fails on (-delta, delta)")
        if self.superlinear:
            u_small = self.delta * np.array([1e-8, 1e-7, 1e-6])
            ratios = np.abs(np.asarray(self.g(u_small), dtype=float) / u_small)
            if np.any(ratios > superlin_tol):
                raise MinkshootError("g(u)/u does not vanish at 0 (superlinearity declared)")


def _ramp(t):
    """C^1 cubic step: 1 at t<=0, 0 at t>=1, zero slope at both ends."""
    t = np.clip(t, 0.0, 1.0)
    return 1.0 - t * t * (3.0 - 2.0 * t)


@dataclass(frozen=True)
class TruncatedSystem:
    """Globally Lipschitz surrogate system equivalent to the original BVP.

    ``fT(r, u)`` equals q(r) g(u) for |u| <= R and vanishes for |u| >= R + 1,
    ramped with a C^1 cubic in between; M bounds |fT|.  ``phiT`` agrees with
    phi on [-gamma, gamma] and is affine with slope phi'(gamma) outside.
    """

    source: ProblemSpec
    M: float
    gamma: float
    ramp_width: float = 1.0
    slope_out: float = field(init=False, default=0.0)
    flux_at_gamma: float = field(init=False, default=0.0)

    def __post_init__(self):
        object.__setattr__(self, "slope_out", phi_prime(self.gamma))
        object.__setattr__(self, "flux_at_gamma", phi(self.gamma))

    # -- truncated operator -------------------------------------------------

    def phiT(self, x):
        if not isinstance(x, np.ndarray):
            ax = abs(x)
            if ax <= self.gamma:
                return x / (1.0 - x * x) ** 0.5
            return (1.0 if x > 0 else -1.0) * (
                self.slope_out * (ax - self.gamma) + self.flux_at_gamma
            )
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        core = np.where(ax < 1.0, ax, 0.0)  # placeholder to avoid sqrt domain error
        inner = core / np.sqrt(np.clip(1.0 - core * core, 1e-300, None))
        outer = self.slope_out * (ax - self.gamma) + self.flux_at_gamma
        out = np.sign(x) * np.where(ax <= self.gamma, inner, outer)
        return float(out) if out.ndim == 0 else out

    def phiT_inv(self, y):
        if not isinstance(y, np.ndarray):
            ay = abs(y)
            if ay <= self.flux_at_gamma:
                return y / (1.0 + y * y) ** 0.5
            return (1.0 if y > 0 else -1.0) * (
                (ay - self.flux_at_gamma) / self.slope_out + self.gamma
            )
        y = np.asarray(y, dtype=float)
        ay = np.abs(y)
        inner = ay / np.sqrt(1.0 + ay * ay)
        outer = (ay - self.flux_at_gamma) / self.slope_out + self.gamma
        out = np.sign(y) * np.where(ay <= self.flux_at_gamma, inner, outer)
        return float(out) if out.ndim == 0 else out

    # -- truncated nonlinearity ---------------------------------------------

    def ramp(self, u):
        R = self.source.geometry.outer
        return _ramp((np.abs(np.asarray(u, dtype=float)) - R) / self.ramp_width)

    def fT(self, r, u):
        if isinstance(u, np.ndarray) or isinstance(r, np.ndarray):
            return np.asarray(self.source.q(r), dtype=float) * np.asarray(
                self.source.g(u), dtype=float
            ) * self.ramp(u)
        R = self.source.geometry.outer
        au = abs(u)
        if au >= R + self.ramp_width:
            return 0.0
        psi = 1.0
        if au > R:
            t = (au - R) / self.ramp_width
            psi = 1.0 - t * t * (3.0 - 2.0 * t)
        return float(self.source.q(r)) * float(self.source.g(u)) * psi

    # -- Lipschitz data ------------------------------------------------------

    def lip_phiT_inv(self) -> float:
        """phiT' >= 1 everywhere, hence the inverse is 1-Lipschitz."""
        return 1.0

    def lip_fT(self, n_grid: int = 20001) -> float:
        """Sampled Lipschitz constant of fT in u, uniform over r."""
        R = self.source.geometry.outer
        u = np.linspace(-(R + self.ramp_width), R + self.ramp_width, n_grid)
        r = np.linspace(self.source.geometry.r_span[0], self.source.geometry.r_span[1], 2001)
        qmax = float(np.max(np.abs(np.asarray(self.source.q(r), dtype=float))))
        prof = np.asarray(self.source.g(u), dtype=float) * self.ramp(u)
        slopes = np.abs(np.diff(prof) / np.diff(u))
        return qmax * float(np.max(slopes))


def build_truncation(spec: ProblemSpec, grid_step: float = 1e-3, safety: float = 1.05) -> TruncatedSystem:
    """Construct the truncated system: certified bound M and closed-form gamma.

    M is a dense-grid maximum of |q(r) g(u) ramp(u)| times a safety factor;
    the nonlinearity is a product, so the maximization separates.
    """
    spec.validate()
    r_lo, r_hi = spec.geometry.r_span
    R = spec.geometry.outer
    r = np.arange(r_lo, r_hi + grid_step, grid_step)
    qv = np.asarray(spec.q(r), dtype=float)
    if not np.all(np.isfinite(qv)):
        raise NonFiniteWeight("q produced non-finite values on the radial interval")
    u = np.arange(-(R + 1.0), R + 1.0 + grid_step, grid_step)
    gv = np.asarray(spec.g(u), dtype=float)
    prof = np.abs(gv) * _ramp((np.abs(u) - R) / 1.0)
    M = float(np.max(np.abs(qv)) * np.max(prof)) * safety
    if M == 0.0:
        raise DegenerateProblem("q*g vanishes on the scanned box")
    y = spec.lam * M * R
    gamma = y / np.sqrt(1.0 + y * y)
    return TruncatedSystem(source=spec, M=M, gamma=float(gamma))


# -- JSON problem documents ---------------------------------------------------


def problem_from_dict(doc: dict) -> ProblemSpec:
    """Build a ProblemSpec from the documented JSON schema."""
    try:
        geometry_doc = doc["geometry"]
        if "ball" in geometry_doc:
            geometry = Ball(R=float(geometry_doc["ball"]["R"]))
        elif "annulus" in geometry_doc:
            geometry = Annulus(
                R1=float(geometry_doc["annulus"]["R1"]),
                R2=float(geometry_doc["annulus"]["R2"]),
            )
        else:
            raise MinkshootError("geometry must contain 'ball' or 'annulus'")
        return ProblemSpec(
            dimension=int(doc["dimension"]),
            geometry=geometry,
            q=compile_expression(doc["q"], "r"),
            g=compile_expression(doc["g"], "u"),
            lam=float(doc["lambda"]),
            bc=str(doc.get("bc", "dirichlet")),
            delta=float(doc.get("delta", geometry.outer / 2)),
            superlinear=bool(doc.get("superlinear", True)),
        )
    except KeyError as exc:
        raise MinkshootError(f"problem document missing key {exc}") from exc


def problem_from_json(path) -> ProblemSpec:
    with open(path) as fh:
        return problem_from_dict(json.load(fh))
