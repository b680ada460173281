"""Operator closed forms, problem validation and the truncated system."""

import numpy as np
import pytest

from minkshoot.errors import DegenerateProblem, MinkshootError, SlopeOutOfRange
from minkshoot.model import (
    Annulus,
    Ball,
    ProblemSpec,
    build_truncation,
    phi,
    phi_inv,
    phi_prime,
    problem_from_dict,
)

from conftest import FIG_PROBLEM


# -- closed forms -------------------------------------------------------------


def test_phi_values():
    assert phi(0.6) == pytest.approx(0.75, rel=1e-15)
    assert phi(-0.8) == pytest.approx(-4.0 / 3.0, rel=1e-15)
    assert phi(0.0) == 0.0


def test_phi_prime_values():
    assert phi_prime(0.0) == 1.0
    assert phi_prime(0.6) == pytest.approx(1.0 / 0.512, rel=1e-15)


def test_phi_inverse_roundtrip():
    s = np.linspace(-0.99, 0.99, 101)
    assert np.allclose(phi_inv(phi(s)), s, rtol=1e-14, atol=1e-14)
    assert phi_inv(0.75) == pytest.approx(0.6, rel=1e-15)


def test_phi_domain():
    for bad in (1.0, -1.0, 1.5):
        with pytest.raises(SlopeOutOfRange):
            phi(bad)
        with pytest.raises(SlopeOutOfRange):
            phi_prime(bad)


# -- geometry and problem validation -----------------------------------------


def test_geometry_validation():
    with pytest.raises(MinkshootError):
        Ball(R=0.0)
    with pytest.raises(MinkshootError):
        Annulus(R1=2.0, R2=1.0)
    assert Annulus(R1=1.0, R2=3.0).r_span == (1.0, 3.0)
    assert Ball(R=2.0).r_span == (0.0, 2.0)


def test_problem_spec_validation():
    base = dict(dimension=2, geometry=Ball(R=10.0), q=lambda r: 1.0 + 0.0 * r,
                g=lambda u: u ** 3, lam=5.0)
    with pytest.raises(MinkshootError):
        ProblemSpec(**{**base, "lam": 0.0})
    with pytest.raises(MinkshootError):
        ProblemSpec(**{**base, "bc": "robin"})
    with pytest.raises(MinkshootError):
        ProblemSpec(**{**base, "delta": 11.0})
    spec = ProblemSpec(**base, delta=1.0)
    spec.validate()


def test_sign_condition_enforced():
    spec = ProblemSpec(dimension=2, geometry=Ball(R=10.0), q=lambda r: 1.0 + 0.0 * r,
                       g=lambda u: -np.asarray(u) ** 3, lam=5.0, delta=1.0)
    with pytest.raises(MinkshootError):
        spec.validate()


def test_g_must_vanish_at_zero():
    spec = ProblemSpec(dimension=2, geometry=Ball(R=10.0), q=lambda r: 1.0 + 0.0 * r,
                       g=lambda u: np.asarray(u) + 1.0, lam=5.0, delta=1.0,
                       superlinear=False)
    with pytest.raises(MinkshootError):
        spec.validate()


def test_degenerate_weight_rejected():
    spec = problem_from_dict({**FIG_PROBLEM, "q": "0"})
    with pytest.raises(DegenerateProblem):
        build_truncation(spec)


# -- truncated system ---------------------------------------------------------


def test_truncation_bound_and_gamma(fig_system):
    # the amplitude-ramped |u^3| peaks just outside u = R; grid max * 1.05
    assert 1050.0 <= fig_system.M <= 1062.0
    y = 5.0 * fig_system.M * 10.0
    assert fig_system.gamma == pytest.approx(y / np.sqrt(1.0 + y * y), rel=1e-15)
    assert fig_system.gamma < 1.0


def test_phiT_matches_phi_inside(fig_system):
    s = np.linspace(-fig_system.gamma, fig_system.gamma, 101)
    assert np.allclose(fig_system.phiT(s), phi(s), rtol=1e-13, atol=1e-13)


def test_phiT_continuity_and_affine_tail(fig_system):
    g = fig_system.gamma
    # both branches meet at gamma with the value phi(gamma)
    assert fig_system.phiT(g) == pytest.approx(fig_system.flux_at_gamma, rel=1e-12)
    # affine with slope phi'(gamma) beyond gamma
    slope = (fig_system.phiT(g + 2.0) - fig_system.phiT(g + 1.0)) / 1.0
    assert slope == pytest.approx(phi_prime(g), rel=1e-9)
    # on a mildly truncated system the junction is resolvable pointwise
    mild = build_truncation(problem_from_dict({
        **FIG_PROBLEM, "lambda": 0.1,
        "geometry": {"ball": {"R": 1.0}}, "delta": 0.5,
    }))
    eps = 1e-9
    jump = abs(mild.phiT(mild.gamma + eps) - mild.phiT(mild.gamma - eps))
    assert jump < 1e-6


def test_phiT_inv_roundtrip(fig_system):
    x = np.linspace(-5.0, 5.0, 201)  # crosses the affine region on both sides
    assert np.allclose(fig_system.phiT_inv(fig_system.phiT(x)), x, rtol=1e-12, atol=1e-12)
    for v in (0.3, -0.9, 2.5):
        assert fig_system.phiT_inv(fig_system.phiT(v)) == pytest.approx(v, rel=1e-12)


def test_phiT_inv_nonexpansive(fig_system):
    y = np.linspace(-1e4, 1e4, 20001)
    out = fig_system.phiT_inv(y)
    slopes = np.diff(out) / np.diff(y)
    assert np.all(slopes <= 1.0 + 1e-12)
    assert np.all(slopes > 0.0)
    assert fig_system.lip_phiT_inv() == 1.0


def test_fT_support_and_consistency(fig_system):
    assert fig_system.fT(3.0, 2.0) == pytest.approx(8.0, rel=1e-15)
    assert fig_system.fT(3.0, 11.0) == 0.0
    assert fig_system.fT(3.0, -12.5) == 0.0
    u = np.linspace(-12.0, 12.0, 101)
    vec = fig_system.fT(np.full_like(u, 3.0), u)
    assert np.allclose(vec, [fig_system.fT(3.0, float(x)) for x in u], atol=0)
    assert float(np.max(np.abs(vec))) <= fig_system.M


def test_fT_lipschitz_constant(fig_system):
    # dominated by the ramp region where |d/du (u^3 psi)| peaks
    lip = fig_system.lip_fT()
    assert 300.0 <= lip <= 2000.0


# -- JSON documents -----------------------------------------------------------


def test_problem_from_dict_roundtrip():
    spec = problem_from_dict(FIG_PROBLEM)
    assert spec.dimension == 2
    assert spec.geometry == Ball(R=10.0)
    assert spec.lam == 5.0
    assert spec.g(2.0) == 8.0
    assert spec.q(4.2) == 1.0


def test_problem_from_dict_annulus():
    doc = {**FIG_PROBLEM, "geometry": {"annulus": {"R1": 2.0, "R2": 10.0}}}
    spec = problem_from_dict(doc)
    assert spec.geometry == Annulus(R1=2.0, R2=10.0)


def test_problem_from_dict_errors():
    with pytest.raises(MinkshootError):
        problem_from_dict({"dimension": 2})
    with pytest.raises(MinkshootError):
        problem_from_dict({**FIG_PROBLEM, "geometry": {"cube": {"L": 1.0}}})
