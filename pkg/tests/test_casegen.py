from fractions import Fraction

import numpy as np
import pytest

from ldpguard import casegen
from ldpguard.casegen import (
    CaseKind,
    CaseRecipe,
    RegenerationLimit,
    derive_seed,
    gen_consistent,
    gen_interior,
    gen_likely_infeasible,
    gen_transformed,
    generate,
)
from ldpguard.ldp import Status, ldp_solve
from ldpguard.oracle import rational_feasible
from ldpguard.verify import verify_feasible


def exact_slack(prob, w):
    """Exact G w - h per row."""
    return [
        sum(Fraction(g) * Fraction(x) for g, x in zip(row, w)) - Fraction(hi)
        for row, hi in zip(prob.G, prob.h)
    ]


def test_derive_seed_reference_values():
    # SplitMix64 first output for state 0 is 0xe220a8397b1dcdaf
    assert casegen._splitmix64(0) == 0xE220A8397B1DCDAF
    assert derive_seed(0, 0) == casegen._splitmix64(0xE220A8397B1DCDAF)
    seeds = {derive_seed(7, i) for i in range(10_000)}
    assert len(seeds) == 10_000
    assert all(0 <= s < 2**64 for s in seeds)


def test_zero_x0_gives_zero_h():
    rec = gen_consistent(CaseRecipe(5, 3, seed=1), x0=np.zeros(3))
    np.testing.assert_array_equal(rec.problem.h, np.zeros(5))
    assert not np.any(np.signbit(rec.problem.h))


def test_witness_is_exactly_feasible():
    for seed in range(300):
        rec = gen_consistent(CaseRecipe(int(seed % 9) + 1, int(seed % 5) + 1, seed=seed))
        assert rec.kind is CaseKind.CONSISTENT_WITNESS
        assert all(s >= 0 for s in exact_slack(rec.problem, rec.witness))
        rep = verify_feasible(rec.problem, rec.witness)
        assert np.all(rep.violations <= 1e-12 * rep.scales)


def test_h_is_floor_of_exact_product():
    rec = gen_consistent(CaseRecipe(6, 4, seed=3))
    for s in exact_slack(rec.problem, rec.witness):
        assert s >= 0
    # one ulp higher would overshoot
    for i, row in enumerate(rec.problem.G):
        exact = sum(Fraction(g) * Fraction(x) for g, x in zip(row, rec.witness))
        assert Fraction(np.nextafter(rec.problem.h[i], np.inf)) > exact


def test_determinism_is_bitwise():
    for recipe in (
        CaseRecipe(7, 3, seed=11),
        CaseRecipe(7, 3, l=4, use_transform=True, seed=11),
        CaseRecipe(7, 3, margin=50.0, seed=11),
        CaseRecipe(7, 3, shift=10.0, seed=11),
    ):
        a, b = generate(recipe), generate(recipe)
        assert a.problem.G.tobytes() == b.problem.G.tobytes()
        assert a.problem.h.tobytes() == b.problem.h.tobytes()
    assert generate(CaseRecipe(7, 3, seed=12)).problem.h.tobytes() != a.problem.h.tobytes()


def test_identity_transform_reproduces_plain_case():
    plain = gen_consistent(CaseRecipe(5, 3, seed=21))
    G, x0 = plain.raw["G"], plain.raw["x0"]
    tr = gen_transformed(CaseRecipe(5, 3, use_transform=True, seed=21), G=G, x0=x0, A=np.eye(5), B=np.eye(3))
    np.testing.assert_array_equal(tr.problem.G, plain.problem.G)
    np.testing.assert_array_equal(tr.problem.h, plain.problem.h)
    np.testing.assert_array_equal(tr.witness, plain.witness)


def test_transform_row_count():
    rec = gen_transformed(CaseRecipe(6, 3, l=2, use_transform=True, seed=5))
    assert rec.problem.m == 2 and rec.problem.n == 3
    rec = gen_transformed(CaseRecipe(2, 3, l=9, use_transform=True, seed=5))
    assert rec.problem.m == 9


def test_transformed_witness_feasible():
    worst = 0.0
    for seed in range(10_000):
        rec = gen_transformed(CaseRecipe(int(seed % 8) + 1, int(seed % 4) + 1, l=int(seed % 5) + 1, use_transform=True, seed=seed))
        rep = verify_feasible(rec.problem, rec.witness)
        worst = max(worst, float(np.max(rep.violations / rep.scales)))
    assert worst <= 1e-9


def test_transformed_witness_is_b_inverse_x0():
    rec = gen_transformed(CaseRecipe(4, 3, use_transform=True, seed=9))
    B, x0 = rec.raw["B"], rec.raw["x0"]
    np.testing.assert_allclose(B @ rec.witness, x0, rtol=1e-12, atol=1e-12 * np.abs(x0).max())


def test_unit_margin():
    rec = gen_interior(CaseRecipe(6, 3, seed=4), C=np.ones(6))
    slack = exact_slack(rec.problem, rec.witness)
    assert min(slack) >= 1 - 1e-9


def test_random_margin_range():
    rec = gen_interior(CaseRecipe(50, 2, margin=3.0, seed=4))
    C = rec.raw["C"]
    assert np.all((C > 0) & (C <= 3.0))
    assert all(s >= c for s, c in zip(exact_slack(rec.problem, rec.witness), C))


def test_interior_cases_solved():
    for seed in range(1000):
        recipe = CaseRecipe(int(seed % 12) + 1, int(seed % 6) + 1, margin=1000.0, use_transform=seed % 2 == 0, seed=seed)
        rec = gen_interior(recipe)
        out = ldp_solve(rec.problem)
        assert out.status is Status.SOLVED
        w = np.linalg.norm(rec.witness)
        assert np.linalg.norm(out.x) <= w + 1e-8 * (1 + w)


def test_hand_checked_infeasible():
    # x >= 1 and -x >= 1
    rec = gen_likely_infeasible(CaseRecipe(2, 1, shift=10.0), G=[[1.0], [-1.0]], x0=[0.0], D=[1.0, 1.0])
    np.testing.assert_array_equal(rec.problem.h, [1.0, 1.0])
    assert rec.witness is None
    assert not rational_feasible(rec.problem).feasible
    assert ldp_solve(rec.problem).status is Status.INFEASIBLE


def test_shift_size():
    rec = gen_likely_infeasible(CaseRecipe(5, 2, shift=10.0, seed=8))
    h0 = np.max(np.abs(rec.problem.h - rec.raw["D"]))
    assert np.all(rec.raw["D"] >= 10.0 * max(1.0, h0) * (1 - 1e-15))
    assert np.all(rec.raw["D"] < 20.0 * max(1.0, h0))


def test_single_column_shift_is_mostly_infeasible():
    # with one unknown, inconsistency needs rows of both signs: 1 - 2^(1-m)
    m, trials = 6, 2000
    bad = sum(
        not rational_feasible(gen_likely_infeasible(CaseRecipe(m, 1, shift=10.0, seed=s)).problem).feasible
        for s in range(trials)
    )
    frac = bad / trials
    assert frac >= 0.9
    assert frac == pytest.approx(1 - 2.0 ** (1 - m), abs=0.02)


@pytest.mark.parametrize("n,k", [(2, 1), (5, 2), (6, 5)])
def test_zero_columns_exact(n, k):
    for seed in range(50):
        rec = gen_consistent(CaseRecipe(4, n, zero_cols=k, seed=seed))
        zero = np.flatnonzero(np.all(rec.problem.G == 0.0, axis=0))
        assert len(zero) == k
        np.testing.assert_array_equal(zero, rec.raw["zero_cols"])


def test_recipe_invariants():
    with pytest.raises(ValueError):
        CaseRecipe(0, 2)
    with pytest.raises(ValueError):
        CaseRecipe(3, 2, zero_cols=2)
    with pytest.raises(ValueError):
        CaseRecipe(3, 2, margin=1.0, shift=1.0)
    with pytest.raises(ValueError):
        CaseRecipe(3, 2, margin=-1.0)
    with pytest.raises(ValueError):
        gen_interior(CaseRecipe(3, 2), C=[1.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        gen_transformed(CaseRecipe(3, 2, use_transform=True), B=np.ones((2, 2)))
    with pytest.raises(ValueError):
        gen_consistent(CaseRecipe(3, 2, margin=1.0))


def test_regeneration_limit(monkeypatch):
    monkeypatch.setattr(casegen, "is_invertible", lambda B, tol: False)
    with pytest.raises(RegenerationLimit):
        gen_transformed(CaseRecipe(3, 2, use_transform=True, seed=1))


def test_b_draw_count_recorded():
    rec = gen_transformed(CaseRecipe(3, 2, use_transform=True, seed=1))
    assert rec.raw["b_draws"] >= 1
