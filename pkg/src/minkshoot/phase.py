"""Lifted clockwise polar angle, zero counting and angular checks.

The phase point is scaled as (u, v / sqrt(lam)) and written
u = rho cos(theta), v = -sqrt(lam) rho sin(theta), with theta increasing
clockwise.  Dirichlet solutions on a ball correspond to
theta(R) = (1/2 + j) pi and carry exactly j interior zeros.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import CountMismatch, LiftAmbiguous, MinkshootError
from .integrate import Trajectory

__all__ = ["AngleLift", "NodalSummary", "lift_angle", "count_nodal", "verify_angular_lemmas"]

ANGLE_TOL = 1e-8
ZERO_REL_TOL = 1e-10


@dataclass
class AngleLift:
    trajectory: Trajectory
    theta: np.ndarray
    lam: float

    @property
    def winding(self) -> float:
        return float(self.theta[-1] - self.theta[0])


@dataclass
class NodalSummary:
    zero_locations: list
    nodal_domain_count: int
    sign_at_start: int

    def to_dict(self) -> dict:
        return {
            "zeros": list(map(float, self.zero_locations)),
            "nodal_domains": int(self.nodal_domain_count),
            "sign_at_start": int(self.sign_at_start),
        }


def _initial_angle(traj: Trajectory) -> float:
    u0, v0 = traj.u[0], traj.v[0]
    if traj.is_ball:
        if traj.eta == 0.0:
            raise MinkshootError("cannot lift the trivial shot eta = 0")
        return 0.0 if traj.eta > 0 else np.pi
    # annulus start: u = 0, state on the v-axis; y = -rho sin(theta)
    return -np.pi / 2 if v0 > 0 else np.pi / 2


def lift_angle(traj: Trajectory, lam: float | None = None) -> AngleLift:
    """Continuous clockwise angle along a trajectory.

    Raises LiftAmbiguous if any raw increment reaches pi/2 (re-integrate at
    tighter tolerance in that case).  The lifted angle is also stored on the
    trajectory (``traj.theta``).
    """
    if lam is None:
        lam = traj.system.source.lam
    z = traj.u + 1j * traj.v / np.sqrt(lam)
    if np.any(np.abs(z) == 0.0):
        raise MinkshootError("trajectory touches the origin; angle undefined")
    # clockwise convention: theta = -arg(z), incremented continuously
    dalpha = np.angle(z[1:] / z[:-1])
    if np.any(np.abs(dalpha) >= np.pi / 2):
        raise LiftAmbiguous("angle increment reached pi/2; trajectory under-resolved")
    theta = _initial_angle(traj) + np.concatenate(([0.0], np.cumsum(-dalpha)))
    traj.theta = theta
    return AngleLift(trajectory=traj, theta=theta, lam=lam)


def _refined_zeros(traj: Trajectory, interior_only: bool = True) -> list:
    """Zeros of u located from sample sign changes, refined on the dense output."""
    r, u = traj.r, traj.u
    zeros = []
    for i in range(len(r) - 1):
        if u[i] == 0.0:
            if r[i] > r[0]:
                zeros.append(r[i])
            continue
        if u[i] * u[i + 1] < 0.0:
            lo, hi = r[i], r[i + 1]
            root = brentq(traj.u_at, lo, hi, xtol=ZERO_REL_TOL * max(r[-1], 1.0), rtol=8.9e-16)
            zeros.append(float(root))
    if interior_only:
        # boundary zeros of accepted solutions land within integrator accuracy
        # of the endpoints; keep a margin well above that scale
        span = r[-1] - r[0]
        zeros = [z for z in zeros if r[0] + 1e-5 * span < z < r[-1] - 1e-5 * span]
    return zeros


def _expected_interior_zeros(theta: np.ndarray, level_tol: float = 1e-6) -> int:
    """Interior zero count implied by the lifted angle.

    u vanishes exactly on the levels theta = pi/2 + k pi.  An endpoint
    sitting on a level is a boundary zero and is excluded from the count.
    """
    lev = (theta - np.pi / 2) / np.pi
    s, e = float(lev[0]), float(lev[-1])
    if abs(s - round(s)) < level_tol:
        start_count = round(s)  # boundary zero at the start, not interior
    else:
        start_count = int(np.floor(s))
    if abs(e - round(e)) < level_tol:
        end_count = round(e) - 1  # boundary zero at the end, not interior
    else:
        end_count = int(np.floor(e))
    return end_count - start_count


def count_nodal(traj: Trajectory, lift: AngleLift, bc: str = "dirichlet") -> NodalSummary:
    """Count interior zeros and nodal domains, reconciled against the winding.

    For an accepted Dirichlet-at-outer solution with winding (1/2 + j) pi the
    count must be exactly j interior zeros (j + 1 nodal domains, the boundary
    zero not opening a new domain).
    """
    zeros = _refined_zeros(traj)
    sign_start = 1 if (traj.u[np.nonzero(traj.u)[0][0]] > 0) else -1

    expected = _expected_interior_zeros(lift.theta)
    if len(zeros) != expected:
        raise CountMismatch(
            f"{len(zeros)} refined zeros vs {expected} winding-level crossings"
        )
    return NodalSummary(
        zero_locations=zeros,
        nodal_domain_count=len(zeros) + 1,
        sign_at_start=sign_start,
    )


def verify_angular_lemmas(lift: AngleLift, tol: float = 1e-8) -> dict:
    """Discrete checks of the angular estimates along one lifted trajectory.

    (a) theta(r2) - theta(r1) > -pi for every ordered sample pair;
    (b) at every u-zero with v != 0, one-sided angle increments are >= -tol.
    """
    theta = lift.theta
    traj = lift.trajectory
    running_max = np.maximum.accumulate(theta)
    backward = theta - running_max
    min_backward = float(np.min(backward))
    check_a = min_backward > -np.pi

    check_b = True
    worst_b = 0.0
    u = traj.u
    for i in range(len(u) - 1):
        crossing = u[i] * u[i + 1] < 0.0 or (u[i] == 0.0 and 0 < i)
        if not crossing:
            continue
        if abs(traj.v[i]) == 0.0 and abs(traj.v[i + 1]) == 0.0:
            continue
        for inc in (theta[i + 1] - theta[i],
                    theta[i] - theta[i - 1] if i > 0 else 0.0):
            worst_b = min(worst_b, inc)
            if inc < -tol:
                check_b = False
    return {
        "min_pairwise_increment": min_backward,
        "backward_bound_ok": check_a,
        "zero_crossing_increments_ok": check_b,
        "worst_crossing_increment": worst_b,
        "passed": check_a and check_b,
    }
