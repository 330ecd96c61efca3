"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""
import time
from itertools import permutations
from math import comb

import numpy as np
import pytest

from qudit_et.bloch_tensor import (
    correlation_tensor,
    correlation_tensor_symmetric,
    extended_tensor,
    k_mode_product,
    product_norm,
    reconstruct_density,
)
from qudit_et.convex_roof import RoofBudget, et_mixed
from qudit_et.local_ops import (
    append_ancilla,
    apply_local_unitaries,
    induced_rotation,
    measure_local,
    random_local_povm,
    random_local_unitary,
    trace_out_and_compare,
)
from qudit_et.measure import (
    check_superadditivity,
    concurrence_2qutrit,
    et_from_concurrence_2qutrit,
    et_ghz3_expanded,
    et_ghz_bruteforce,
    et_ghz_closed_form,
    et_pure,
)
from qudit_et.qudit_state import (
    PureState,
    basis_state,
    ghz_state,
    mixture,
    random_density_matrix,
    random_product_state,
    random_pure_state,
    to_density,
)
from qudit_et.su_algebra import build_generators

SEED = 20240607
GRID = [(d, n) for d in (2, 3, 4) for n in (2, 3, 4)]
S3 = 1 / np.sqrt(3)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
        assert ok, detail
    return emit


def unit3(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def test_criterion_01_ghz_golden_value(report):
    start = time.perf_counter()
    brute = et_pure(ghz_state(3, 3, [S3] * 3)).et
    closed = et_ghz_closed_form(3, S3, S3, S3)
    elapsed = time.perf_counter() - start
    ok = abs(brute - 3.0196) <= 5e-4 and abs(closed - 3.0196) <= 5e-4 \
        and abs(brute - closed) <= 1e-8 and elapsed < 1.0
    report(1, ok, f"brute {brute:.10f}, closed {closed:.10f}, "
                  f"|diff| {abs(brute - closed):.2e}, {elapsed:.3f} s")


def test_criterion_02_ghz_three_way(report):
    rng = np.random.default_rng(SEED + 2)
    worst14, worst11 = 0.0, 0.0
    for _ in range(50):
        v = unit3(rng)
        brute = et_ghz_bruteforce(3, *v)
        worst14 = max(worst14, abs(et_ghz_closed_form(3, *v) - brute))
        worst11 = max(worst11, abs(et_ghz3_expanded(*v) - brute))
    ok = worst14 <= 1e-8
    report(2, ok, f"closed form max |delta| {worst14:.2e}; "
                  f"expanded n=3 form max |delta| {worst11:.2e} (reported only)")


def test_criterion_03_discriminance(report):
    rng = np.random.default_rng(SEED + 3)
    worst_et, worst_norm = 0.0, 0.0
    for k in range(100):
        d, n = GRID[k % len(GRID)]
        r = et_pure(random_product_state(d, n, rng))
        worst_et = max(worst_et, abs(r.et))
        worst_norm = max(worst_norm, abs(r.tensor_norm - product_norm(d, n)))
    ok = worst_et <= 1e-8 and worst_norm <= 1e-8
    report(3, ok, f"100 product states, max |E_T| {worst_et:.2e}, max norm gap {worst_norm:.2e}")


def test_criterion_04_positivity(report):
    rng = np.random.default_rng(SEED + 4)
    worst = np.inf
    for k in range(500):
        d, n = GRID[k % len(GRID)]
        worst = min(worst, et_pure(random_pure_state(d, n, rng)).et)
    report(4, worst >= -1e-9, f"500 random pure states, min E_T {worst:.4g}")


def test_criterion_05_lu_invariance(report):
    rng = np.random.default_rng(SEED + 5)
    worst_et, worst_orth, worst_route = 0.0, 0.0, 0.0
    for k in range(100):
        d, n = GRID[k % len(GRID)]
        if d ** n > 256:
            n -= 1
        gs = build_generators(d)
        psi = random_pure_state(d, n, rng)
        us = [random_local_unitary(d, site, rng) for site in range(1, n + 1)]
        rotated = apply_local_unitaries(psi, us)
        worst_et = max(worst_et, abs(et_pure(rotated).et - et_pure(psi).et))
        t = correlation_tensor(psi)
        for u in us:
            o = induced_rotation(u, gs)
            worst_orth = max(worst_orth, np.abs(o.T @ o - np.eye(gs.size)).max())
            t = k_mode_product(t, o.T, u.site)
        worst_route = max(worst_route, np.abs(t.values - correlation_tensor(rotated).values).max())
    ok = worst_et <= 1e-8 and worst_orth <= 1e-9 and worst_route <= 1e-8
    report(5, ok, f"max |dE_T| {worst_et:.2e}, max |O^T O - I| {worst_orth:.2e}, "
                  f"k-mode route gap {worst_route:.2e}")


def test_criterion_06_measurement_monotonicity(report):
    rng = np.random.default_rng(SEED + 6)
    worst = np.inf
    for _ in range(200):
        psi = random_pure_state(3, 3, rng)
        povm = random_local_povm(3, int(rng.integers(1, 4)), int(rng.integers(2, 4)), rng)
        assert povm.normal
        after = sum(p * et_pure(phi).et for p, phi in measure_local(psi, povm))
        worst = min(worst, et_pure(psi).et - after)
    report(6, worst >= -1e-8, f"200 normal-Kraus trials, min margin {worst:.4g}")


def test_criterion_07_trace_out(report):
    rng = np.random.default_rng(SEED + 7)
    worst_ineq = np.inf
    worst_equal, worst_ratio = 0.0, 0.0
    for _ in range(100):
        v = unit3(rng)
        before, after = trace_out_and_compare(ghz_state(3, 3, v), int(rng.integers(1, 4)))
        worst_ineq = min(worst_ineq, before - after)
        # product-appended case: GHZ-family pair with an independent third qutrit
        psi = append_ancilla(ghz_state(3, 2, v), random_pure_state(3, 1, rng))
        before, after = trace_out_and_compare(psi, 3)
        worst_equal = max(worst_equal, abs(before - after))
        worst_ratio = max(worst_ratio, abs(before / product_norm(3, 3) - after / product_norm(3, 2)))
    exploratory = []
    for _ in range(20):
        before, after = trace_out_and_compare(random_pure_state(3, 3, rng), int(rng.integers(1, 4)))
        exploratory.append(before - after)
    # the GHZ samples are not products, so the inequality must be strict there
    ok = worst_ineq > 1e-8 and worst_equal <= 1e-8
    report(7, ok, f"GHZ inequality min margin {worst_ineq:.4g}; product-appended "
                  f"max |before - after| {worst_equal:.4g} (baseline-normalized gap "
                  f"{worst_ratio:.2e}); random states min margin {min(exploratory):.4g} (exploratory)")


def test_criterion_08_multiplicativity_superadditivity(report):
    rng = np.random.default_rng(SEED + 8)
    worst_rel, worst_margin = 0.0, np.inf
    for _ in range(50):
        r = check_superadditivity(random_pure_state(3, 2, rng), random_pure_state(3, 2, rng))
        worst_rel = max(worst_rel, r.multiplicativity_gap / r.norm_product)
        worst_margin = min(worst_margin, r.margin)
    ok = worst_rel <= 1e-8 and worst_margin >= -1e-9
    report(8, ok, f"max relative norm gap {worst_rel:.2e}, min superadditivity margin {worst_margin:.4g}")


def test_criterion_09_concurrence_relation(report):
    rng = np.random.default_rng(SEED + 9)
    worst = 0.0
    for _ in range(100):
        v = unit3(rng)
        worst = max(worst, abs(et_from_concurrence_2qutrit(*v) - et_ghz_bruteforce(2, *v)))
    boundary = 0.0
    for k in range(3):
        for sign in (1, -1):
            v = np.zeros(3)
            v[k] = sign
            assert concurrence_2qutrit(*v) == 0
            boundary = max(boundary, abs(et_from_concurrence_2qutrit(*v)),
                           abs(et_ghz_bruteforce(2, *v)))
    ok = worst <= 1e-8 and boundary <= 1e-8
    report(9, ok, f"concurrence form vs brute max |delta| {worst:.2e}; C = 0 max |E_T| {boundary:.2e}")


def test_criterion_10_extended_round_trip(report):
    rng = np.random.default_rng(SEED + 10)
    worst = 0.0
    for k in range(50):
        rho = random_density_matrix(3, 1 + k % 2, seed=rng)
        worst = max(worst, np.abs(reconstruct_density(extended_tensor(rho)) - rho.matrix).max())
    report(10, worst <= 1e-8, f"50 density matrices, max reconstruction error {worst:.2e}")


def test_criterion_11_convex_roof(report):
    rng = np.random.default_rng(SEED + 11)
    start = time.perf_counter()
    worst_pure = 0.0
    for psi in [random_pure_state(3, 2, rng), ghz_state(3, 3, [S3] * 3), random_pure_state(2, 3, rng)]:
        worst_pure = max(worst_pure, abs(et_mixed(to_density(psi)).value - et_pure(psi).et))
    sep = mixture([0.5, 0.5], [basis_state(3, [0, 0]), basis_state(3, [1, 1])])
    sep_value = et_mixed(sep, RoofBudget(restarts=20, iterations=500, seed=0)).value
    small = RoofBudget(restarts=5, iterations=100, seed=0)
    worst_convex = -np.inf
    for _ in range(3):
        a, b = random_pure_state(3, 2, rng), random_pure_state(3, 2, rng)
        p = float(rng.uniform(0.2, 0.8))
        lhs = et_mixed(mixture([p, 1 - p], [a, b]), small).value
        worst_convex = max(worst_convex, lhs - p * et_pure(a).et - (1 - p) * et_pure(b).et)
    elapsed = time.perf_counter() - start
    ok = worst_pure <= 1e-6 and sep_value <= 1e-3 and worst_convex <= 1e-3 and elapsed < 60
    report(11, ok, f"rank-1 max gap {worst_pure:.2e}, separable mixture {sep_value:.2e}, "
                   f"worst convexity excess {worst_convex:.2e}, {elapsed:.1f} s")


def _symmetrize(psi):
    x = psi.as_tensor()
    s = sum(x.transpose(p) for p in permutations(range(psi.n)))
    return PureState.normalized(psi.d, psi.n, s.ravel())


def test_criterion_12_symmetric_fastpath(report):
    rng = np.random.default_rng(SEED + 12)
    n = 4
    states = [ghz_state(3, n, [S3] * 3)] + [_symmetrize(random_pure_state(3, n, rng)) for _ in range(4)]
    worst, max_entries = 0.0, 0
    for psi in states:
        fast = correlation_tensor_symmetric(psi)
        worst = max(worst, np.abs(fast.values - correlation_tensor(psi).values).max())
        max_entries = max(max_entries, fast.evaluated_entries)
    bound = comb(n + 7, 7)
    ok = worst <= 1e-10 and max_entries <= bound
    report(12, ok, f"max entry gap {worst:.2e}, {max_entries} evaluated entries (bound {bound})")
