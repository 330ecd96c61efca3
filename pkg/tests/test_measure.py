import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qudit_et.errors import BudgetError, DomainError
from qudit_et.measure import (
    check_superadditivity,
    concurrence_2qutrit,
    et_from_concurrence_2qutrit,
    et_ghz3_expanded,
    et_ghz_bruteforce,
    et_ghz_closed_form,
    et_pure,
    ghz_comparison,
    ghz_norm_squared,
)
from qudit_et.qudit_state import (
    PureState,
    basis_state,
    ghz_state,
    random_product_state,
    random_pure_state,
)

S3 = 1 / np.sqrt(3)


def unit3(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


coeffs = st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3).filter(
    lambda v: np.linalg.norm(v) > 0.1).map(lambda v: tuple(np.array(v) / np.linalg.norm(v)))


def test_equal_ghz_golden_value():
    brute = et_pure(ghz_state(3, 3, [S3] * 3)).et
    closed = et_ghz_closed_form(3, S3, S3, S3)
    assert brute == pytest.approx(3.0196, abs=5e-4)
    assert abs(brute - closed) < 1e-8
    assert brute == pytest.approx(3.01968593987, abs=1e-10)


def test_symmetric_path_agrees():
    psi = ghz_state(3, 3, [0.6, 0.48, 0.64])
    assert et_pure(psi, symmetric=True).et == pytest.approx(et_pure(psi).et, abs=1e-10)


def test_report_fields():
    r = et_pure(basis_state(3, [0, 1]))
    assert r.baseline == pytest.approx(3.0)
    assert r.tensor_norm == pytest.approx(3.0)
    assert abs(r.et) < 1e-12
    assert set(r.to_dict()) == {"tensor_norm", "baseline", "et"}


def test_et_pure_rejects_density():
    from qudit_et.qudit_state import to_density
    with pytest.raises(DomainError):
        et_pure(to_density(basis_state(2, [0])))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_closed_form_matches_bruteforce(rng, n):
    for _ in range(5):
        v = unit3(rng)
        assert et_ghz_closed_form(n, *v) == pytest.approx(et_ghz_bruteforce(n, *v), abs=1e-8)


@settings(max_examples=30, deadline=None)
@given(v=coeffs)
def test_expanded_n3_matches_bruteforce(v):
    assert et_ghz3_expanded(*v) == pytest.approx(et_ghz_bruteforce(3, *v), abs=1e-8)


def test_literal_limits_discrepancy_is_reported():
    cmp = ghz_comparison(3, S3, S3, S3)
    assert abs(cmp["delta_closed_form"]) < 1e-8
    assert abs(cmp["delta_expanded_n3"]) < 1e-8
    # a != b is needed for the dropped all-l_3 term to matter
    cmp = ghz_comparison(3, 0.8, 0.6, 0.0)
    assert abs(cmp["delta_closed_form"]) < 1e-8
    assert cmp["delta_closed_form_literal_limits"] < -1e-3
    # even n: both limits coincide
    assert ghz_norm_squared(4, 0.8, 0.6, 0.0) == ghz_norm_squared(4, 0.8, 0.6, 0.0, literal_limits=True)


def test_comparison_n4_has_no_expanded_entry():
    assert "expanded_n3" not in ghz_comparison(4, S3, S3, S3)


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("v", [(1, 0, 0), (0, 1, 0), (0, 0, 1)])
def test_single_term_ghz_is_product(n, v):
    assert abs(et_ghz_closed_form(n, *v)) < 1e-12
    assert abs(et_ghz_bruteforce(n, *v)) < 1e-12


def test_ghz_rejects_unnormalized_coefficients():
    with pytest.raises(DomainError):
        et_ghz_closed_form(3, 1, 1, 1)
    with pytest.raises(DomainError):
        ghz_norm_squared(1, 1, 0, 0)


def test_concurrence_values():
    assert concurrence_2qutrit(S3, S3, S3) == pytest.approx(np.sqrt(4 / 3))
    assert concurrence_2qutrit(1, 0, 0) == 0
    # maximally entangled two-qutrit state
    assert et_from_concurrence_2qutrit(S3, S3, S3) == pytest.approx(
        et_ghz_bruteforce(2, S3, S3, S3), abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(v=coeffs)
def test_concurrence_relation_matches_bruteforce(v):
    assert et_from_concurrence_2qutrit(*v) == pytest.approx(et_ghz_bruteforce(2, *v), abs=1e-8)


def test_zero_concurrence_means_zero_measure():
    for v in [(1, 0, 0), (0, -1, 0), (0, 0, 1)]:
        assert concurrence_2qutrit(*v) == 0
        assert abs(et_from_concurrence_2qutrit(*v)) < 1e-8


def test_discriminance(rng):
    for d in (2, 3, 4):
        for n in (2, 3):
            assert abs(et_pure(random_product_state(d, n, rng)).et) < 1e-8


def test_entangled_states_are_positive(rng):
    bell = PureState.normalized(2, 2, [1, 0, 0, 1])
    # T = diag(1, -1, 1) and the baseline is 1
    assert et_pure(bell).et == pytest.approx(np.sqrt(3) - 1)
    for _ in range(10):
        assert et_pure(random_pure_state(3, 2, rng)).et > 1e-6


def test_continuity(rng):
    psi = random_pure_state(3, 3, rng)
    base = et_pure(psi).et
    for eps in (1e-4, 1e-6, 1e-8):
        noise = rng.standard_normal(27) + 1j * rng.standard_normal(27)
        moved = PureState.normalized(3, 3, psi.amplitudes + eps * noise)
        assert abs(et_pure(moved).et - base) < 100 * eps


def test_superadditivity_and_multiplicativity(rng):
    for _ in range(5):
        r = check_superadditivity(random_pure_state(3, 2, rng), random_pure_state(3, 2, rng))
        assert r.holds
        assert r.multiplicativity_gap <= 1e-8 * r.norm_product


def test_superadditivity_ghz_pair():
    g = ghz_state(3, 2, [S3] * 3)
    r = check_superadditivity(g, g)
    assert r.margin > 0
    assert r.norm_joint == pytest.approx(r.norm_product, rel=1e-10)


def test_superadditivity_products_are_tight():
    r = check_superadditivity(basis_state(3, [0]), basis_state(3, [1, 2]))
    assert abs(r.margin) < 1e-10


def test_superadditivity_budget_and_dimension():
    with pytest.raises(BudgetError):
        check_superadditivity(random_pure_state(3, 3, 0), random_pure_state(3, 3, 1), max_entries=1000)
    with pytest.raises(DomainError):
        check_superadditivity(basis_state(2, [0]), basis_state(3, [0]))
