"""Scan / bracket / bisect pipeline and its derived diagnostics."""

import numpy as np
import pytest

from minkshoot.errors import MinkshootError
from minkshoot.model import Annulus, ProblemSpec, build_truncation
from minkshoot.shoot import (
    EtaGrid,
    SweepReport,
    bracket_and_bisect,
    dirichlet_target,
    elastic_diagnostic,
    estimate_eta_star_small,
    neumann_target,
    scan_eta,
    solve_targets,
)

COARSE = EtaGrid(n_geometric=30, n_uniform=80)


@pytest.fixture(scope="module")
def coarse_scan(fig_system):
    etas = COARSE.values(10.0)
    return scan_eta(fig_system, etas)


def test_eta_grid_shape():
    grid = EtaGrid()
    vals = grid.values(10.0)
    assert len(vals) == 600
    assert vals[0] == pytest.approx(1e-5, rel=1e-12)
    assert vals[-1] == pytest.approx(11.0, rel=1e-12)
    assert np.all(np.diff(vals) > 0)


def test_eta_grid_cap_override():
    vals = EtaGrid(eta_max=5.0).values(10.0)
    assert vals[-1] == pytest.approx(5.0, rel=1e-12)


def test_targets():
    assert dirichlet_target(0) == pytest.approx(np.pi / 2)
    assert dirichlet_target(3) == pytest.approx(3.5 * np.pi)
    assert neumann_target(2) == pytest.approx(2.0 * np.pi)


def test_scan_records_are_clean(coarse_scan):
    assert all(rec.ok for rec in coarse_scan)
    assert all(np.isfinite(rec.winding) for rec in coarse_scan)
    assert all(rec.slope_bound_ok for rec in coarse_scan)
    assert all(rec.origin_free for rec in coarse_scan)


def test_scan_threaded_matches_serial(fig_system, coarse_scan):
    etas = COARSE.values(10.0)
    threaded = scan_eta(fig_system, etas, threads=4)
    assert [r.eta for r in threaded] == [r.eta for r in coarse_scan]
    assert [r.winding for r in threaded] == [r.winding for r in coarse_scan]


def test_bracket_and_bisect_j0(fig_system, coarse_scan):
    profiles = bracket_and_bisect(fig_system, coarse_scan, dirichlet_target(0))
    assert len(profiles) >= 2
    for p in profiles:
        assert p.j == 0
        assert p.nodal.zero_locations == []
        assert p.boundary_residual < 1e-8
        assert p.sign_at_center == 1
    branches = {p.branch for p in profiles}
    assert branches == {"small", "large"}


def test_bracket_rejects_out_of_range_amplitudes(fig_system, coarse_scan):
    # the frozen shot at eta = R + 1 solves the modified system exactly but
    # is not a solution of the original problem; no j = 0 slope-free profile
    # may be reported from it
    profiles = bracket_and_bisect(fig_system, coarse_scan, neumann_target(0),
                                  bc="neumann")
    assert all(float(np.max(np.abs(p.trajectory.u))) < 10.0 for p in profiles)
    assert profiles == []


def test_eta_star_closed_form(fig_system):
    # for g = u^3 and q = 1 the amplitude condition lam u^4 <= eps u^2 gives
    # the threshold sqrt(eps / lam)
    eps = 0.02
    eta_star = estimate_eta_star_small(fig_system, eps)
    assert 0.0 < eta_star <= np.sqrt(eps / 5.0) * (1.0 + 1e-6)


def test_eta_star_requires_small_eps(fig_system):
    with pytest.raises(MinkshootError):
        estimate_eta_star_small(fig_system, 1.0)  # sqrt(eps) >= pi / (2 R)


def test_pair_ordering_small_before_large(fig_system, coarse_scan):
    profiles = bracket_and_bisect(fig_system, coarse_scan, dirichlet_target(1))
    small = [p.eta for p in profiles if p.branch == "small"]
    large = [p.eta for p in profiles if p.branch == "large"]
    assert small and large
    assert max(small) < min(large)


def test_root_stable_under_grid_refinement(fig_system, coarse_scan):
    fine = scan_eta(fig_system, EtaGrid(n_geometric=60, n_uniform=160).values(10.0))
    target = dirichlet_target(0)
    eta_coarse = [p.eta for p in bracket_and_bisect(fig_system, coarse_scan, target)]
    eta_fine = [p.eta for p in bracket_and_bisect(fig_system, fine, target)]
    for e in eta_coarse:
        assert min(abs(e - ef) for ef in eta_fine) < 1e-6


def test_annulus_solutions_and_elastic_tail():
    spec = ProblemSpec(
        dimension=2, geometry=Annulus(R1=2.0, R2=10.0),
        q=lambda r: np.ones_like(np.asarray(r, float)),
        g=lambda u: np.asarray(u, float) ** 3, lam=5.0, delta=1.0,
    )
    system = build_truncation(spec)
    etas = COARSE.values(10.0)
    records = scan_eta(system, etas)
    diag = elastic_diagnostic(records)
    assert diag["threshold"] is not None
    assert diag["tail_ok"]
    # winding j pi from the wall means j sign regions: j - 1 interior zeros
    one_sign = bracket_and_bisect(system, records, neumann_target(1))
    assert one_sign
    assert all(p.nodal.zero_locations == [] for p in one_sign)
    two_sign = bracket_and_bisect(system, records, neumann_target(2))
    assert two_sign
    assert all(len(p.nodal.zero_locations) == 1 for p in two_sign)


def test_solve_targets_reports_missing(fig_system):
    found, missing = solve_targets(fig_system, [0, 25], signs=(1,), grid=COARSE)
    assert found[(1, 0)]
    assert (1, 25) in missing
    assert not found[(1, 25)]


def test_sweep_report_counting():
    counts = {
        (5.0, "+", "small", 0): 1, (5.0, "+", "large", 0): 1,
        (5.0, "+", "small", 1): 1, (5.0, "+", "large", 1): 1,
        (5.0, "-", "small", 1): 1, (5.0, "-", "large", 1): 1,
    }
    report = SweepReport(lambda_grid=[5.0], k_max=1, counts=counts,
                         lambda_star={1: 5.0})
    assert report.nodal_count(5.0) == 4
    doc = report.to_dict()
    assert doc["lambda_star"]["1"] == 5.0
    assert len(doc["counts"]) == 6


def test_sweep_report_csv(tmp_path):
    report = SweepReport(lambda_grid=[5.0], k_max=1,
                         counts={(5.0, "+", "small", 1): 2}, lambda_star={1: None})
    path = tmp_path / "sweep.csv"
    report.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "lambda,sign,branch,j,count"
    assert lines[1] == "5,+,small,1,2"
