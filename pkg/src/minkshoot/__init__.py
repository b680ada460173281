"""Radial nodal solutions of Minkowski-curvature boundary value problems.

A shooting-method library for the quasilinear radial equation
(r^{N-1} phi(u'))' + lam r^{N-1} q(r) g(u) = 0 with phi(s) = s/sqrt(1-s^2),
on balls and annuli, with Dirichlet or Neumann boundary conditions, plus the
periodic one-dimensional counterpart via the Poincare return map.
"""

from .errors import MinkshootError
from .integrate import ShotInput, Trajectory, continuity_probe, picard_solve, shoot_rk
from .model import (
    Annulus,
    Ball,
    ProblemSpec,
    TruncatedSystem,
    build_truncation,
    phi,
    phi_inv,
    phi_prime,
    problem_from_dict,
    problem_from_json,
)
from .phase import AngleLift, NodalSummary, count_nodal, lift_angle, verify_angular_lemmas
from .shoot import (
    EtaGrid,
    ShotRecord,
    SolutionProfile,
    SweepReport,
    bracket_and_bisect,
    dirichlet_target,
    elastic_diagnostic,
    estimate_eta_star_small,
    lambda_sweep,
    neumann_target,
    scan_eta,
    singular_limit_diagnostics,
    solve_targets,
)

__version__ = "0.1.0"
