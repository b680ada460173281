"""Shooting pipeline: eta scans, bisection to target angles, sweeps.

The map eta -> theta(R; eta) is sampled on a mixed geometric/uniform grid,
brackets around the target angles (1/2 + j) pi (Dirichlet) or j pi (Neumann,
annulus) are refined by bisection, and accepted roots are classified as
small or large relative to the scan's winding argmax.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import MinkshootError, NotSuperlinear
from .integrate import ShotInput, Trajectory, shoot_rk
from .model import ProblemSpec, TruncatedSystem, build_truncation
from .phase import ANGLE_TOL, NodalSummary, count_nodal, lift_angle

__all__ = [
    "EtaGrid",
    "ShotRecord",
    "SolutionProfile",
    "SweepReport",
    "scan_eta",
    "bracket_and_bisect",
    "estimate_eta_star_small",
    "lambda_sweep",
    "singular_limit_diagnostics",
    "elastic_diagnostic",
    "dirichlet_target",
    "neumann_target",
    "solve_targets",
]


@dataclass(frozen=True)
class EtaGrid:
    """Geometric spacing near zero plus uniform spacing up to the cap.

    Defaults: 200 geometric points in [1e-6 R, 0.1 R] and 400 uniform points
    in (0.1 R, R + 1]; the winding varies fastest at small and intermediate
    shooting data.
    """

    n_geometric: int = 200
    n_uniform: int = 400
    min_frac: float = 1e-6
    split_frac: float = 0.1
    eta_max: Optional[float] = None

    def values(self, R: float) -> np.ndarray:
        cap = self.eta_max if self.eta_max is not None else R + 1.0
        geo = np.geomspace(self.min_frac * R, self.split_frac * R, self.n_geometric)
        uni = np.linspace(self.split_frac * R, cap, self.n_uniform + 1)[1:]
        return np.concatenate([geo, uni])


@dataclass
class ShotRecord:
    eta: float
    winding: float = np.nan
    terminal: tuple = (np.nan, np.nan)
    slope_bound_ok: bool = False
    origin_free: bool = False
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class SolutionProfile:
    eta: float
    j: int
    branch: str
    sign_at_center: int
    trajectory: Trajectory
    winding: float
    boundary_residual: float
    nodal: NodalSummary

    def to_dict(self) -> dict:
        return {
            "eta": float(self.eta),
            "j": int(self.j),
            "branch": self.branch,
            "sign": int(self.sign_at_center),
            "winding": float(self.winding),
            "boundary_residual": float(self.boundary_residual),
            "zeros": [float(z) for z in self.nodal.zero_locations],
        }


def dirichlet_target(j: int) -> float:
    return (0.5 + j) * np.pi


def neumann_target(j: int) -> float:
    return j * np.pi


def _shot_span(system: TruncatedSystem) -> tuple[float, float]:
    return system.source.geometry.r_span


def _one_shot(system: TruncatedSystem, eta: float, r_span, shot_kwargs) -> tuple[ShotRecord, Optional[Trajectory]]:
    rec = ShotRecord(eta=eta)
    try:
        traj = shoot_rk(ShotInput(system, eta, r_span, **shot_kwargs))
        lift = lift_angle(traj)
        rec.winding = lift.winding
        rec.terminal = traj.terminal()
        rec.slope_bound_ok = traj.max_slope() <= system.gamma * (1 + 1e-12)
        rec.origin_free = traj.min_radius_sq() > 0.0
        return rec, traj
    except MinkshootError as exc:
        rec.error = f"{type(exc).__name__}: {exc}"
        return rec, None


def scan_eta(system: TruncatedSystem, etas, r_span=None, threads: int = 1,
             **shot_kwargs) -> list[ShotRecord]:
    """One ShotRecord per eta, deterministic ordering; failures flagged."""
    if r_span is None:
        r_span = _shot_span(system)
    etas = np.asarray(etas, dtype=float)

    def work(eta):
        return _one_shot(system, float(eta), r_span, shot_kwargs)[0]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, etas))
    return [work(eta) for eta in etas]


def _winding_argmax(records: list[ShotRecord]) -> float:
    best = None
    for rec in records:
        if rec.ok and (best is None or rec.winding > best.winding):
            best = rec
    if best is None:
        raise MinkshootError("no successful shots in scan")
    return best.eta


def bracket_and_bisect(system: TruncatedSystem, records: list[ShotRecord], target: float,
                       r_span=None, bc: Optional[str] = None, angle_tol: float = ANGLE_TOL,
                       residual_tol: float = 1e-8, eta_separator: Optional[float] = None,
                       **shot_kwargs) -> list[SolutionProfile]:
    """Bisect every adjacent winding bracket around ``target`` to a solution.

    Roots within 1e-9 R of each other are merged.  Returns an empty list if
    no bracket exists (the parameter is below threshold for this target).
    """
    if r_span is None:
        r_span = _shot_span(system)
    if bc is None:
        bc = system.source.bc
    R = system.source.geometry.outer
    N = system.source.dimension
    if eta_separator is None:
        eta_separator = _winding_argmax(records)

    profiles: list[SolutionProfile] = []
    for lo_rec, hi_rec in zip(records[:-1], records[1:]):
        if not (lo_rec.ok and hi_rec.ok):
            continue
        f_lo = lo_rec.winding - target
        f_hi = hi_rec.winding - target
        if f_lo == 0.0:
            f_lo = -1e-300 if f_hi > 0 else 1e-300
        if f_lo * f_hi > 0.0:
            continue
        a, b = lo_rec.eta, hi_rec.eta
        fa = f_lo
        traj = None
        eta_mid, f_mid, residual = a, fa, np.inf

        def _residual(t: Trajectory) -> float:
            u_end, v_end = t.terminal()
            if bc == "dirichlet":
                return abs(u_end)
            return abs(system.phiT_inv(v_end / r_span[1] ** (N - 1)))

        # the angle tolerance alone is too loose when the phase radius is
        # large; keep halving until the boundary residual itself is small
        while abs(b - a) > 1e-13 * max(abs(a), abs(b), R):
            eta_mid = 0.5 * (a + b)
            rec, traj = _one_shot(system, eta_mid, r_span, shot_kwargs)
            if not rec.ok:
                raise MinkshootError(f"shot failed during bisection: {rec.error}")
            f_mid = rec.winding - target
            residual = _residual(traj)
            if abs(f_mid) < angle_tol and residual < residual_tol:
                break
            if fa * f_mid <= 0.0:
                b = eta_mid
            else:
                a, fa = eta_mid, f_mid
        if traj is None or abs(f_mid) >= angle_tol:
            continue
        if float(np.max(np.abs(traj.u))) >= R * (1.0 + 1e-6):
            # truncated-system artifact: the equivalence with the original
            # problem requires the amplitude to stay below R (relative slack
            # for roots that approach the ceiling as the parameter grows)
            continue
        lift = lift_angle(traj)
        nodal = count_nodal(traj, lift, bc=bc)
        if bc == "dirichlet" and r_span[0] == 0.0:
            j = round(lift.winding / np.pi - 0.5)
        else:
            j = round(lift.winding / np.pi)
        branch = "small" if abs(eta_mid) < abs(eta_separator) else "large"
        profiles.append(
            SolutionProfile(
                eta=eta_mid,
                j=int(j),
                branch=branch,
                sign_at_center=1 if traj.eta > 0 else -1,
                trajectory=traj,
                winding=lift.winding,
                boundary_residual=residual,
                nodal=nodal,
            )
        )

    profiles.sort(key=lambda p: p.eta)
    merged: list[SolutionProfile] = []
    for p in profiles:
        if merged and abs(p.eta - merged[-1].eta) < 1e-9 * R:
            continue
        merged.append(p)
    return merged


def estimate_eta_star_small(system: TruncatedSystem, eps_choice: float,
                            n_grid: int = 4001, max_halvings: int = 40,
                            **shot_kwargs) -> float:
    """Threshold below which shots provably stay in the slow-angle regime.

    Requires sqrt(eps_choice) < pi / (2 R).  First finds eta_hat such that
    lam |q(r) g(u) u| <= eps_choice u^2 for |u| <= eta_hat, then shrinks the
    threshold until shots launched below it stay within eta_hat in amplitude.
    """
    spec = system.source
    R = spec.geometry.outer
    if not np.sqrt(eps_choice) < np.pi / (2.0 * R):
        raise MinkshootError("eps_choice must satisfy sqrt(eps) < pi/(2R)")
    r = np.linspace(spec.geometry.r_span[0], spec.geometry.r_span[1], 2001)
    qmax = float(np.max(np.abs(np.asarray(spec.q(r), dtype=float))))
    u = np.linspace(spec.delta * 1e-9, spec.delta * (1 - 1e-12), n_grid)
    ok = spec.lam * qmax * np.abs(np.asarray(spec.g(u), dtype=float) * u) <= eps_choice * u * u
    if not ok[0]:
        raise NotSuperlinear("no small-amplitude threshold on the search grid")
    bad = np.nonzero(~ok)[0]
    eta_hat = float(u[-1] if bad.size == 0 else u[bad[0] - 1])

    eta_star = eta_hat
    r_span = _shot_span(system)
    for _ in range(max_halvings):
        rec, traj = _one_shot(system, eta_star, r_span, shot_kwargs)
        if rec.ok and float(np.max(np.abs(traj.u))) <= eta_hat:
            return eta_star
        eta_star *= 0.5
    raise NotSuperlinear("could not confine shots below the amplitude threshold")


@dataclass
class SweepReport:
    lambda_grid: list
    k_max: int
    counts: dict  # (lam, sign, branch, j) -> count
    lambda_star: dict  # k -> smallest grid lambda with >= 4k nodal solutions

    def nodal_count(self, lam: float) -> int:
        return sum(
            c for (lv, _s, _b, j), c in self.counts.items() if lv == lam and j >= 1
        )

    def to_dict(self) -> dict:
        return {
            "lambda_grid": [float(x) for x in self.lambda_grid],
            "k_max": int(self.k_max),
            "counts": [
                {"lambda": float(lv), "sign": s, "branch": b, "j": int(j), "count": int(c)}
                for (lv, s, b, j), c in sorted(self.counts.items())
            ],
            "lambda_star": {str(k): (float(v) if v is not None else None)
                            for k, v in sorted(self.lambda_star.items())},
        }

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("lambda,sign,branch,j,count\n")
            for (lv, s, b, j), c in sorted(self.counts.items()):
                fh.write(f"{lv:.15g},{s},{b},{j},{c}\n")


def solve_targets(system: TruncatedSystem, targets_j, signs=(1, -1), bc: Optional[str] = None,
                  grid: Optional[EtaGrid] = None, threads: int = 1,
                  **shot_kwargs) -> tuple[dict, list]:
    """Scan both signs and bisect all requested nodal targets.

    Returns ({(sign, j): [profiles]}, missing) where ``missing`` lists the
    (sign, j) targets with no bracket.
    """
    if bc is None:
        bc = system.source.bc
    if grid is None:
        grid = EtaGrid()
    R = system.source.geometry.outer
    r_span = _shot_span(system)
    is_ball = r_span[0] == 0.0
    target_of = dirichlet_target if (bc == "dirichlet" and is_ball) else neumann_target

    found: dict = {}
    missing: list = []
    for sign in signs:
        etas = sign * grid.values(R)
        records = scan_eta(system, etas, r_span=r_span, threads=threads, **shot_kwargs)
        separator = _winding_argmax(records)
        for j in targets_j:
            profiles = bracket_and_bisect(
                system, records, target_of(j), r_span=r_span, bc=bc,
                eta_separator=separator, **shot_kwargs
            )
            found[(sign, j)] = profiles
            if not profiles:
                missing.append((sign, j))
    return found, missing


def lambda_sweep(spec_template: ProblemSpec, lambda_grid, k_max: int,
                 grid: Optional[EtaGrid] = None, threads: int = 1,
                 signs=(1, -1), **shot_kwargs) -> SweepReport:
    """Run scan + bisect per lambda; count solutions by (sign, branch, j)."""
    counts: dict = {}
    for lam in lambda_grid:
        spec = dataclasses.replace(spec_template, lam=float(lam))
        system = build_truncation(spec)
        found, _missing = solve_targets(
            system, range(0, k_max + 1), signs=signs, grid=grid, threads=threads,
            **shot_kwargs
        )
        for (sign, j), profiles in found.items():
            for p in profiles:
                key = (float(lam), "+" if sign > 0 else "-", p.branch, j)
                counts[key] = counts.get(key, 0) + 1

    lambda_star: dict = {}
    for k in range(1, k_max + 1):
        lambda_star[k] = None
        for lam in sorted(float(x) for x in lambda_grid):
            nodal = sum(c for (lv, _s, _b, j), c in counts.items() if lv == lam and j >= 1)
            if nodal >= 4 * k:
                lambda_star[k] = lam
                break
    return SweepReport(
        lambda_grid=list(lambda_grid), k_max=k_max, counts=counts, lambda_star=lambda_star
    )


def singular_limit_diagnostics(spec_template: ProblemSpec, lambdas,
                               grid: Optional[EtaGrid] = None, n_eval: int = 2001,
                               **shot_kwargs) -> dict:
    """Track the positive large j = 0 branch toward the cone profile R - r.

    Reports the sup distance to R - r (expected decreasing in lambda), the
    minimum slope (approaching -1 from above) and the slope at the center.
    """
    lambdas = sorted(float(x) for x in lambdas)
    if len(lambdas) < 3:
        raise MinkshootError("need at least 3 increasing lambda values")
    R = spec_template.geometry.outer
    rr = np.linspace(0.0, R, n_eval)
    cone = R - rr
    report = {"lambdas": lambdas, "sup_distance": [], "min_slope": [], "center_slope": []}
    for lam in lambdas:
        spec = dataclasses.replace(spec_template, lam=lam)
        system = build_truncation(spec)
        found, missing = solve_targets(system, [0], signs=(1,), grid=grid, **shot_kwargs)
        profiles = found.get((1, 0), [])
        large = [p for p in profiles if p.branch == "large"]
        if not large:
            raise MinkshootError(f"no positive large j=0 profile at lambda={lam}")
        p = max(large, key=lambda pr: pr.eta)
        u = p.trajectory.u_at(rr)
        report["sup_distance"].append(float(np.max(np.abs(u - cone))))
        report["min_slope"].append(float(np.min(p.trajectory.up)))
        report["center_slope"].append(float(p.trajectory.up[0]))
    return report


def elastic_diagnostic(records: list[ShotRecord]) -> dict:
    """Large shooting data should stop rotating: winding < pi/2 beyond a threshold.

    Returns the detected threshold (largest |eta| with winding >= pi/2) and
    whether the scan tail beyond it stays below pi/2.
    """
    ok_records = [r for r in records if r.ok]
    ok_records.sort(key=lambda r: abs(r.eta))
    threshold = None
    for rec in ok_records:
        if rec.winding >= np.pi / 2:
            threshold = abs(rec.eta)
    if threshold is None:
        return {"threshold": None, "tail_ok": True}
    tail = [r for r in ok_records if abs(r.eta) > threshold]
    return {
        "threshold": threshold,
        "tail_ok": all(r.winding < np.pi / 2 for r in tail),
        "n_tail": len(tail),
    }
