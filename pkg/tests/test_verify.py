from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from ldpguard.casegen import CaseRecipe, gen_consistent, make_rng
from ldpguard.dense import mat_vec
from ldpguard.ldp import Status, ldp_solve
from ldpguard.problem import LdpProblem, ToleranceConfig
from ldpguard.verify import kkt_check, verify_feasible

from conftest import KNOWN_BAD


def test_witness_passes():
    for seed in range(50):
        rec = gen_consistent(CaseRecipe(5, 3, seed=seed))
        rep = verify_feasible(rec.problem, rec.witness)
        assert rep.passed and rep.feasible
        assert np.all(rep.violations <= 1e-12 * rep.scales)


def test_known_bad_case1(case1):
    rep = verify_feasible(case1, KNOWN_BAD["case1"])
    assert not rep.passed
    assert rep.worst_row == 1  # row 2, 1-based
    expected = 10123.19482867013 - 74.79768991470337 * (-0.375)
    assert rep.violations[1] == pytest.approx(expected, rel=1e-15)
    assert rep.max_violation == pytest.approx(1.01512e4, rel=1e-5)


def test_known_bad_case2(case2):
    rep = verify_feasible(case2, KNOWN_BAD["case2"])
    assert not rep.passed
    assert rep.max_violation > 1e4


def test_report_fields(case1):
    x = np.array([135.3410091, 0.0])
    rep = verify_feasible(case1, x)
    assert rep.passed
    np.testing.assert_array_equal(rep.violations, case1.h - mat_vec(case1.G, x))
    assert rep.max_violation == rep.violations.max()
    expected_scales = np.maximum.reduce([np.ones(4), np.abs(case1.h), np.abs(case1.G[:, 0]) * np.linalg.norm(x)])
    np.testing.assert_allclose(rep.scales, expected_scales, rtol=1e-15)
    with pytest.raises(ValueError):
        verify_feasible(case1, [1.0, 2.0, 3.0])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32), st.floats(1e-12, 0.5), st.floats(1.0, 1e6))
def test_monotone_in_tolerance(seed, tau, factor):
    rng = make_rng(seed)
    G = rng.uniform(-1, 1, (4, 2))
    h = rng.uniform(-1, 1, 4)
    x = rng.uniform(-2, 2, 2)
    prob = LdpProblem(G, h)
    loose = min(tau * factor, 0.999)
    if verify_feasible(prob, x, ToleranceConfig(tau_feas=tau)).passed:
        assert verify_feasible(prob, x, ToleranceConfig(tau_feas=loose)).passed


def test_kkt_interior_origin():
    prob = LdpProblem([[1.0, 2.0], [-3.0, 1.0], [0.5, -0.5]], [-1.0, -2.0, -0.1])
    cert = kkt_check(prob, np.zeros(2), np.zeros(3))
    assert cert.valid
    assert cert.stationarity_residual == 0.0 and cert.complementarity_residual == 0.0


def test_kkt_case1_single_active_row(case1):
    out = ldp_solve(case1)
    assert out.status is Status.SOLVED
    lam = out.certificate.lam
    assert np.count_nonzero(lam) == 1 and lam[1] > 0
    assert lam[1] == pytest.approx(out.x[0] / case1.G[1, 0], rel=1e-12)
    assert out.certificate.valid


def test_kkt_perturbation_breaks_certificate():
    broken = 0
    for seed in range(200):
        rec = gen_consistent(CaseRecipe(5, 3, seed=seed))
        out = ldp_solve(rec.problem)
        assert out.status is Status.SOLVED
        assert out.certificate.valid
        if np.linalg.norm(out.x) < 1e-9:
            continue
        d = make_rng(seed).normal(size=3)
        xp = out.x + 1e-3 * d / np.linalg.norm(d)
        cert = kkt_check(rec.problem, xp, out.certificate.lam, ToleranceConfig(tau_kkt=1e-9))
        rep = verify_feasible(rec.problem, xp, ToleranceConfig(tau_feas=1e-12))
        assert not (cert.valid and rep.passed)
        broken += 1
    assert broken > 150


def test_kkt_residuals_invariant_under_paired_row_scaling():
    rng = make_rng(8)
    for seed in range(100):
        rec = gen_consistent(CaseRecipe(6, 3, seed=seed))
        out = ldp_solve(rec.problem)
        c = 2.0 ** rng.integers(-6, 7, size=rec.problem.m)
        scaled = LdpProblem(rec.problem.G * c[:, None], rec.problem.h * c)
        a = kkt_check(rec.problem, out.x, out.certificate.lam)
        b = kkt_check(scaled, out.x, out.certificate.lam / c)
        assert a.stationarity_residual == b.stationarity_residual
        assert a.complementarity_residual == b.complementarity_residual
        assert a.lam_min * b.lam_min >= 0
