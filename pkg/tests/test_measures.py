import math

import numpy as np
import pytest

from belldistill import (
    BipartiteCut,
    bell_diagonal_kl,
    bell_ket,
    er_bound_even,
    er_bound_odd_doubled,
    er_bound_pair,
    er_search,
    log_negativity,
    ppt_check,
    relative_entropy,
    rho_n,
    sample_pairwise_separable,
    sample_separable,
    to_dense,
)
from belldistill.measures import SeparableAnsatz, _block_to_canonical_index_map


# --- closed forms -------------------------------------------------------------


@pytest.mark.parametrize("m", range(1, 11))
def test_even_bound_structured_exact(m):
    report = er_bound_even(m)
    assert report.value_bits == pytest.approx(2 * m - 2, abs=1e-12)
    assert report.support_contained
    assert report.raw_divergence_bits == pytest.approx(report.value_bits, abs=1e-12)
    assert report.support_overlap == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("m, expected", [(1, 0.0), (2, 2.0)])
def test_even_bound_dense(m, expected):
    report = er_bound_even(m, method="dense")
    assert report.value_bits == pytest.approx(expected, abs=1e-8)
    assert report.raw_divergence_bits == pytest.approx(expected, abs=1e-8)
    assert report.support_contained


@pytest.mark.parametrize("m", range(1, 11))
def test_odd_doubled_closed_form(m):
    report = er_bound_odd_doubled(m)
    assert report.value_bits == pytest.approx(4 * m - 2, abs=1e-12)
    assert report.halved_bits == pytest.approx((2 * m + 1) - 2, abs=1e-12)


@pytest.mark.parametrize("m", [1, 2, 5])
def test_odd_doubled_support_diagnostics(m):
    # for an odd copy count every Bell index occurs an odd number of times in
    # the doubled support strings, so no pair-constant string matches them and
    # the raw divergence is infinite; only the matching-index quarter overlaps
    report = er_bound_odd_doubled(m)
    assert not report.support_contained
    assert math.isinf(report.raw_divergence_bits)
    assert report.support_overlap == pytest.approx(0.25, abs=1e-12)


def test_odd_doubled_raw_matches_general_kl():
    p = rho_n(3).tensor(rho_n(3))
    from belldistill import rho2_power

    assert math.isinf(bell_diagonal_kl(p, rho2_power(3)))


@pytest.mark.parametrize("n", range(2, 11))
def test_pair_bound_all_n(n):
    report = er_bound_pair(n)
    assert report.value_bits == pytest.approx(2 * n - 4, abs=1e-12)
    assert report.support_contained == (n % 2 == 0)


def test_pair_bound_n2_coincides_dense():
    report = er_bound_pair(2, method="dense")
    assert report.value_bits == pytest.approx(0.0, abs=1e-8)
    assert report.raw_divergence_bits == pytest.approx(0.0, abs=1e-8)


def test_even_bound_rejects_oversize_dense():
    with pytest.raises(ValueError, match="structured"):
        er_bound_even(4, method="dense")


# --- PPT / negativity -----------------------------------------------------------


def test_ppt_examples():
    r1 = ppt_check(to_dense(rho_n(1)))
    assert r1.is_ppt and r1.min_eigenvalue == pytest.approx(0.25, abs=1e-12)

    r2 = ppt_check(to_dense(rho_n(2)))
    assert r2.is_ppt and r2.min_eigenvalue >= -1e-10

    bell = ppt_check(bell_ket(1).to_dm())
    assert not bell.is_ppt
    assert bell.min_eigenvalue == pytest.approx(-0.5, abs=1e-12)


def test_log_negativity_examples():
    assert log_negativity(bell_ket(1).to_dm()) == pytest.approx(1.0, abs=1e-12)
    assert log_negativity(to_dense(rho_n(2))) == pytest.approx(0.0, abs=1e-10)


def test_log_negativity_rho3_bruteforce():
    # independent oracle: partial transpose of the 64x64 matrix by explicit
    # index arithmetic over Bob's three qubits
    rho = to_dense(rho_n(3)).matrix
    t = rho.reshape((2,) * 12)
    # layout A1,B1,A2,B2,A3,B3: Bob's row axes 1,3,5 swap with col axes 7,9,11
    perm = list(range(12))
    for ax in (1, 3, 5):
        perm[ax], perm[6 + ax] = perm[6 + ax], perm[ax]
    brute = t.transpose(perm).reshape(64, 64)
    brute_logneg = math.log2(np.abs(np.linalg.eigvalsh(brute)).sum())

    value = log_negativity(to_dense(rho_n(3)))
    assert value == pytest.approx(brute_logneg, abs=1e-10)
    assert value >= 1.0 - 1e-10  # distillation yield n-2 never exceeds it
    assert value == pytest.approx(2.0, abs=1e-10)


def test_ppt_respects_explicit_cut():
    rho = to_dense(rho_n(2))
    cut = BipartiteCut(frozenset({"A1", "A2"}), frozenset({"B1", "B2"}))
    assert ppt_check(rho, cut).is_ppt


# --- separable sampling -----------------------------------------------------------


def test_sample_separable_single_term_is_pure_product():
    sigma = sample_separable(2, terms=1, seed=5)
    assert ppt_check(sigma).is_ppt
    vals = np.linalg.eigvalsh(sigma.matrix)
    assert vals[-1] == pytest.approx(1.0, abs=1e-10)


def test_sample_separable_reproducible():
    a = sample_separable(2, terms=8, seed=11)
    b = sample_separable(2, terms=8, seed=11)
    assert np.array_equal(a.matrix, b.matrix)


@pytest.mark.parametrize("batch", range(4))
def test_sampled_separables_ppt_and_bounded_away(batch):
    r2 = to_dense(rho_n(2))
    for k in range(50):
        sigma = sample_separable(2, terms=16, rng=np.random.default_rng([93, batch, k]))
        assert ppt_check(sigma).is_ppt
        assert relative_entropy(r2, sigma) > 1e-6


def test_pairwise_separable_floor_two_bits(rng):
    # product-of-blocks candidates can reach exactly 2 bits but never less
    p4 = rho_n(4)
    values = [bell_diagonal_kl(p4, sample_pairwise_separable(2, rng))
              for _ in range(300)]
    assert min(values) >= 2.0 - 1e-6


# --- search ---------------------------------------------------------------------


def test_block_index_map_is_permutation():
    for n in (1, 2, 3):
        bmap = _block_to_canonical_index_map(n)
        assert sorted(bmap) == list(range(4 ** n))


def test_separable_ansatz_density_is_separable_ppt(rng):
    K, d = 6, 4
    states = rng.standard_normal((2, K, d)) + 1j * rng.standard_normal((2, K, d))
    states /= np.linalg.norm(states, axis=2, keepdims=True)
    ansatz = SeparableAnsatz(n=2, weights=np.full(K, 1 / K),
                             alice_states=states[0], bob_states=states[1])
    assert ppt_check(ansatz.to_density()).is_ppt


def test_er_search_maximally_mixed_target():
    report = er_search(1, terms=8, restarts=5, budget=1200, seed=2)
    assert report.best_bits <= 0.01
    assert report.floor_bits == 0.0


def test_er_search_two_copy_target_converges():
    report = er_search(2, terms=16, restarts=6, budget=6000, seed=0)
    assert report.best_bits <= 0.1  # acceptance runs the full 20-restart budget
    assert report.best_bits >= -1e-6


def test_er_search_reproducible():
    a = er_search(3, restarts=2, budget=300, seed=9)
    b = er_search(3, restarts=2, budget=300, seed=9)
    assert a.best_bits == b.best_bits
    assert a.to_dict() == b.to_dict()
    assert a.terms == 64  # defaults to 4^n so random mixtures are full rank
    assert math.isfinite(a.best_bits)


def test_er_search_underparameterized_reports_inf():
    # 4 product terms cannot cover the 16-dimensional two-copy space, so no
    # restart ever reaches a finite divergence with a tiny budget
    report = er_search(2, terms=4, restarts=1, budget=50, seed=0)
    assert math.isinf(report.best_bits)


def test_er_search_rejects_bad_budget():
    with pytest.raises(ValueError, match="budget"):
        er_search(2, budget=0)
