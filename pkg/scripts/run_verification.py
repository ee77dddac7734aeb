#!/usr/bin/env python3
"""Run the full verification battery and print one line per check.

Covers the closed-form divergence identities, the zero-yield evidence, the
distillation protocol, and the local-unitary permutation table.  Exits 1 if
anything fails.

Usage: python scripts/run_verification.py [--shots 10000] [--seed 0]
"""

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from belldistill import (  # noqa: E402
    distill,
    distill_trivial,
    er_bound_even,
    er_bound_odd_doubled,
    er_bound_pair,
    local_permutation_search,
    log_negativity,
    permutation_action,
    rho_n,
    to_dense,
)
from belldistill.permutations import ALL_PERMUTATIONS  # noqa: E402

PASS = 0
FAIL = 0


def check(name, condition, detail=""):
    global PASS, FAIL
    if condition:
        PASS += 1
        print(f"  [PASS] {name}")
    else:
        FAIL += 1
        print(f"  [FAIL] {name}  {detail}")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--shots", type=int, default=10_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print("=" * 70)
    print("Closed-form divergence identities")
    print("=" * 70)
    for m in range(1, 11):
        r = er_bound_even(m)
        check(f"even 2m={2*m}: value = 2m-2 = {2*m-2}",
              abs(r.value_bits - (2 * m - 2)) <= 1e-12, f"got {r.value_bits}")
    for m in range(1, 11):
        r = er_bound_odd_doubled(m)
        check(f"odd n={2*m+1}: doubled value 4m-2 = {4*m-2}, halved = n-2",
              abs(r.value_bits - (4 * m - 2)) <= 1e-12
              and abs(r.halved_bits - (2 * m - 1)) <= 1e-12,
              f"got {r.value_bits}, halved {r.halved_bits}")
    for n in range(2, 11):
        r = er_bound_pair(n)
        check(f"pair n={n}: value = 2n-4 = {2*n-4}",
              abs(r.value_bits - (2 * n - 4)) <= 1e-12, f"got {r.value_bits}")
    check("dense cross-check (m=2)",
          abs(er_bound_even(2, method="dense").value_bits - 2.0) <= 1e-8)

    print("=" * 70)
    print("Zero-yield cases")
    print("=" * 70)
    r1 = distill_trivial(1)
    check("one copy is maximally mixed", r1.distance_to_maximally_mixed <= 1e-12)
    r2 = distill_trivial(2)
    check("two copies are PPT", r2.ppt.is_ppt, f"min eig {r2.ppt.min_eigenvalue}")
    check("two-copy flip identity", r2.smolin_residual <= 1e-10)

    print("=" * 70)
    print(f"Distillation protocol ({args.shots} shots per n, seed {args.seed})")
    print("=" * 70)
    for n in (3, 4, 5):
        t0 = time.perf_counter()
        rep = distill(n, shots=args.shots, seed=args.seed)
        dt = time.perf_counter() - t0
        check(f"n={n}: {n-2} ebits/shot, exact discrimination, fidelity 1 ({dt:.1f}s)",
              rep.success_rate == 1.0 and rep.ebits_per_shot == n - 2
              and rep.min_fidelity >= 1 - 1e-12)
        check(f"n={n}: yield matches the divergence bound",
              (n % 2 == 0 and rep.ebits_per_shot == er_bound_even(n // 2).value_bits)
              or (n % 2 == 1 and rep.ebits_per_shot ==
                  er_bound_odd_doubled((n - 1) // 2).halved_bits))
    check("log-negativity of three copies bounds the yield",
          log_negativity(to_dense(rho_n(3))) >= 1.0 - 1e-10)

    print("=" * 70)
    print("Local-unitary permutations of the Bell basis")
    print("=" * 70)
    realized = 0
    for perm in ALL_PERMUTATIONS:
        pair = local_permutation_search(perm)
        action = permutation_action(pair)
        realized += int(action is not None and action.perm == perm)
    check("all 24 permutations realized and verified", realized == 24,
          f"only {realized}")

    print("=" * 70)
    print(f"SUMMARY: {PASS} passed, {FAIL} failed out of {PASS + FAIL} checks")
    print("=" * 70)
    sys.exit(1 if FAIL else 0)


if __name__ == "__main__":
    main()
