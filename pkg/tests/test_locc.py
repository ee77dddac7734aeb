import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from belldistill import (
    ShotState,
    correction_unitary,
    discriminate_two_copies,
    distill,
    distill_exact_branches,
    distill_trivial,
    measure_local,
    measure_local_exact,
    output_copy_entropy,
)
from belldistill.locc import PARITY_TO_INDEX, run_shot

SQ2 = 1 / math.sqrt(2)
BELL = np.array([[SQ2, 0, 0, SQ2], [SQ2, 0, 0, -SQ2],
                 [0, SQ2, SQ2, 0], [0, SQ2, -SQ2, 0]], dtype=complex)


def _pauli_correlation(i: int, op: np.ndarray) -> float:
    """Oracle: <op x op> on the i-th Bell state via plain 4x4 algebra."""

    psi = BELL[i - 1]
    return float(np.real(psi.conj() @ np.kron(op, op) @ psi))


Z = np.diag([1.0, -1.0]).astype(complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_z_parity_matches_born_oracle(i, rng):
    corr = _pauli_correlation(i, Z)
    expected_parity = 0 if corr > 0.99 else 1
    assert abs(abs(corr) - 1.0) < 1e-12  # parity is deterministic
    for _ in range(40):
        state = ShotState.prepared(i, 2)
        a, state = measure_local(state, "alice", 1, "Z", rng)
        b, state = measure_local(state, "bob", 1, "Z", rng)
        assert (a ^ b) == expected_parity


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_x_parity_matches_born_oracle(i, rng):
    corr = _pauli_correlation(i, X)
    expected_parity = 0 if corr > 0.99 else 1
    assert abs(abs(corr) - 1.0) < 1e-12
    for _ in range(40):
        state = ShotState.prepared(i, 2)
        a, state = measure_local(state, "alice", 1, "X", rng)
        b, state = measure_local(state, "bob", 1, "X", rng)
        assert (a ^ b) == expected_parity


def test_single_outcomes_unbiased(rng):
    # each side's marginal outcome is a fair coin on every Bell state
    counts = Counter()
    for _ in range(400):
        state = ShotState.prepared(1, 2)
        a, _ = measure_local(state, "alice", 1, "Z", rng)
        counts[a] += 1
    assert 130 < counts[0] < 270


def test_measure_consumed_copy_rejected(rng):
    state = ShotState.prepared(1, 2)
    result = discriminate_two_copies(state, rng)
    with pytest.raises(ValueError, match="consumed"):
        measure_local(result.state, "alice", 1, "Z", rng)


def test_measure_exact_probabilities():
    state = ShotState.prepared(1, 2)
    p0, post = measure_local_exact(state, "alice", 1, "Z", 0)
    assert p0 == pytest.approx(0.5, abs=1e-12)
    p_b, _ = measure_local_exact(post, "bob", 1, "Z", 1)
    assert p_b == pytest.approx(0.0, abs=1e-12)
    p_b0, _ = measure_local_exact(post, "bob", 1, "Z", 0)
    assert p_b0 == pytest.approx(1.0, abs=1e-12)


def test_parity_map_is_the_documented_table():
    assert PARITY_TO_INDEX == {(0, 0): 1, (0, 1): 2, (1, 0): 3, (1, 1): 4}


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_discrimination_zero_error_any_seed(seed):
    gen = np.random.default_rng(seed)
    state = ShotState.sample(2, gen)
    result = discriminate_two_copies(state, gen)
    assert result.guess == state.hidden


def test_discrimination_large_seeded_run():
    correct = 0
    shots = 10_000
    for k in range(shots):
        gen = np.random.default_rng([1234, k])
        state = ShotState.sample(2, gen)
        correct += int(discriminate_two_copies(state, gen).guess == state.hidden)
    assert correct == shots


def test_discrimination_needs_two_copies(rng):
    with pytest.raises(ValueError, match="two unconsumed"):
        discriminate_two_copies(ShotState.prepared(1, 1), rng)


def test_transcript_structure(rng):
    state = ShotState.prepared(3, 4)
    result = discriminate_two_copies(state, rng)
    t = result.transcript
    t.validate()
    assert len(t.measurements) == 4
    assert [m.basis for m in t.measurements] == ["Z", "Z", "X", "X"]
    # only Bob's bits travel; the guess is a function of parities alone
    assert len(t.communications) == 2
    assert all(c.sender == "bob" for c in t.communications)
    rows = t.to_rows()
    assert sum(r["communicated"] for r in rows) == 2
    bob_bits = t.communicated_bits("bob")
    alice = {(m.basis): m.outcome for m in t.measurements if m.party == "alice"}
    assert PARITY_TO_INDEX[(alice["Z"] ^ bob_bits[0], alice["X"] ^ bob_bits[1])] == result.guess


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_correction_unitary_maps_to_first_bell(i):
    # oracle: direct 4x4 application, fidelity up to global phase
    pair = correction_unitary(i)
    mapped = np.kron(pair.u_alice, pair.u_bob) @ BELL[i - 1]
    assert abs(abs(np.vdot(BELL[0], mapped)) - 1.0) < 1e-12
    assert np.allclose(pair.u_bob, np.eye(2))  # one-sided


def test_correction_identity_for_first_index():
    assert np.allclose(correction_unitary(1).tensor(), np.eye(4))


@pytest.mark.parametrize("n", [3, 4, 5])
def test_distill_yield_and_fidelity(n):
    report = distill(n, shots=300, seed=21)
    assert report.success_rate == 1.0
    assert report.ebits_per_shot == n - 2
    assert all(r.ebits == n - 2 for r in report.records)
    assert report.min_fidelity >= 1 - 1e-12
    assert all(r.correct for r in report.records)


def test_distill_reports_are_deterministic():
    a = distill(3, shots=64, seed=5)
    b = distill(3, shots=64, seed=5)
    assert a.to_json() == b.to_json()
    assert a.to_csv() == b.to_csv()


def test_distill_csv_shape():
    report = distill(3, shots=10, seed=1)
    lines = report.to_csv().splitlines()
    assert lines[0] == "shot,hidden,guess,parity_z,parity_x,correct,ebits,fidelity"
    assert len(lines) == 11


def test_distill_rejects_small_n():
    with pytest.raises(ValueError, match="distill_trivial"):
        distill(2, shots=10)


def test_shot_records_follow_parity_table():
    report = distill(4, shots=200, seed=3)
    for r in report.records:
        assert PARITY_TO_INDEX[(r.parity_z, r.parity_x)] == r.guess == r.hidden


def test_run_shot_reproducible():
    assert run_shot(5, 17, seed=2) == run_shot(5, 17, seed=2)


def test_distill_trivial_n1():
    report = distill_trivial(1)
    assert report.ebits == 0
    assert report.distance_to_maximally_mixed <= 1e-12


def test_distill_trivial_n2():
    report = distill_trivial(2)
    assert report.ebits == 0
    assert report.ppt.is_ppt
    assert report.ppt.min_eigenvalue >= -1e-10
    assert report.smolin_residual <= 1e-10


def test_distill_trivial_rejects_other_n():
    with pytest.raises(ValueError, match="n = 1 and n = 2"):
        distill_trivial(3)


def test_exact_branches_n3():
    analysis = distill_exact_branches(3)
    assert len(analysis.branches) == 16
    assert analysis.total_probability() == pytest.approx(1.0, abs=1e-12)
    for b in analysis.branches:
        assert b.guess == b.hidden
        assert b.output_fidelity == pytest.approx(1.0, abs=1e-12)
        assert b.probability == pytest.approx(1 / 16, abs=1e-12)
    per_hidden = Counter(b.hidden for b in analysis.branches)
    assert per_hidden == {1: 4, 2: 4, 3: 4, 4: 4}


def test_exact_branch_outcome_structure():
    # copy-1 Z outcomes on the first Bell state: (0,0) or (1,1), equally likely
    analysis = distill_exact_branches(3)
    z_pairs = Counter()
    for b in analysis.branches:
        if b.hidden != 1:
            continue
        outs = {(p, c, bas): o for p, c, bas, o in b.outcomes}
        z_pairs[(outs[("alice", 1, "Z")], outs[("bob", 1, "Z")])] += b.probability
    assert set(z_pairs) == {(0, 0), (1, 1)}
    for v in z_pairs.values():
        assert v == pytest.approx(1 / 8, abs=1e-12)


def test_sampled_frequencies_match_exact_branches():
    # 3-sigma binomial agreement between shot sampling and the exact branch
    # distribution (16 equally likely branches)
    shots = 10_000
    report = distill(3, shots=shots, seed=99)
    counts = Counter()
    for r in report.records:
        counts[(r.hidden, r.parity_z, r.parity_x)] += 1
    analysis = distill_exact_branches(3)
    exact = Counter()
    for b in analysis.branches:
        outs = {(p, c, bas): o for p, c, bas, o in b.outcomes}
        pz = outs[("alice", 1, "Z")] ^ outs[("bob", 1, "Z")]
        px = outs[("alice", 2, "X")] ^ outs[("bob", 2, "X")]
        exact[(b.hidden, pz, px)] += b.probability
    # parities are deterministic per hidden index: 4 observable cells of 1/4
    assert set(counts) == set(exact)
    for cell, p in exact.items():
        sigma = math.sqrt(p * (1 - p) * shots)
        assert abs(counts[cell] - p * shots) <= 3 * sigma


def test_output_copy_entropy_is_one_ebit():
    assert output_copy_entropy(3) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_yield_meets_divergence_bound(n):
    # the protocol yield and the closed-form bound agree exactly: the two
    # sides of the distillable-entanglement sandwich meet at n - 2
    from belldistill import er_bound_even, er_bound_odd_doubled

    report = distill(n, shots=20, seed=0)
    if n % 2 == 0:
        bound = er_bound_even(n // 2).value_bits
    else:
        bound = er_bound_odd_doubled((n - 1) // 2).halved_bits
    assert report.ebits_per_shot == bound == n - 2
