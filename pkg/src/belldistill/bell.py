"""Bell basis and the rank-structured Bell-diagonal representation.

Every state this package studies is diagonal in the n-fold Bell product
basis, so a sparse probability map over index strings in {1..4}^n describes
it completely.  The dense path exists for cross-validation at small n.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .registers import ALICE, BOB, QubitSpec, RegisterLayout
from .states import DensityOperator, Ket, dm_from_ensemble, ket_tensor, reorder

WEIGHT_SUM_TOL = 1e-12

# Rows are the four Bell amplitude vectors over |00>,|01>,|10>,|11>.
_SQ2 = 1.0 / math.sqrt(2.0)
BELL_AMPLITUDES = np.array(
    [
        [_SQ2, 0.0, 0.0, _SQ2],
        [_SQ2, 0.0, 0.0, -_SQ2],
        [0.0, _SQ2, _SQ2, 0.0],
        [0.0, _SQ2, -_SQ2, 0.0],
    ],
    dtype=complex,
)
BELL_AMPLITUDES.flags.writeable = False


def check_bell_index(i: int) -> int:
    if i not in (1, 2, 3, 4):
        raise ValueError(f"Bell index must be in 1..4, got {i}")
    return i


def bell_amplitudes(i: int) -> np.ndarray:
    return BELL_AMPLITUDES[check_bell_index(i) - 1]


def bell_ket(i: int, copy: int = 1) -> Ket:
    """The i-th Bell state on the pair (A<copy>, B<copy>)."""

    layout = RegisterLayout((QubitSpec(f"A{copy}", ALICE, copy),
                             QubitSpec(f"B{copy}", BOB, copy)))
    return Ket(layout, bell_amplitudes(i).copy())


def bell_ket_on(i: int, qubit_a: QubitSpec, qubit_b: QubitSpec) -> Ket:
    """The i-th Bell state on two explicitly named qubits."""

    layout = RegisterLayout((qubit_a, qubit_b))
    return Ket(layout, bell_amplitudes(i).copy())


def bell_product_ket(indices: Sequence[int]) -> Ket:
    """|Phi_s1> x |Phi_s2> x ... on the canonical copy-major register."""

    if not indices:
        raise ValueError("need at least one Bell index")
    kets = [bell_ket(check_bell_index(s), copy=j + 1) for j, s in enumerate(indices)]
    return reduce(ket_tensor, kets)


def check_bell_string(indices: Sequence[int], n: int) -> tuple[int, ...]:
    s = tuple(int(i) for i in indices)
    if len(s) != n:
        raise ValueError(f"Bell string has length {len(s)}, expected {n}")
    for i in s:
        check_bell_index(i)
    return s


@dataclass(frozen=True)
class BellDiagonalState:
    """Sparse probability distribution over Bell strings of length n."""

    n: int
    weights: Mapping[tuple[int, ...], float]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("copy count must be >= 1")
        clean = {}
        total = 0.0
        for s, w in self.weights.items():
            s = check_bell_string(s, self.n)
            w = float(w)
            if w < 0:
                raise ValueError(f"negative weight {w} for string {s}")
            if w == 0.0:
                continue
            clean[s] = clean.get(s, 0.0) + w
            total += w
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total}, expected 1")
        object.__setattr__(self, "weights", dict(clean))

    def weight(self, s: Sequence[int]) -> float:
        return self.weights.get(tuple(s), 0.0)

    def entropy_bits(self) -> float:
        return float(-sum(w * math.log2(w) for w in self.weights.values() if w > 0))

    def tensor(self, other: "BellDiagonalState") -> "BellDiagonalState":
        """Tensor product; the other state's copies are appended after ours."""

        combined = {}
        for s, w in self.weights.items():
            for t, v in other.weights.items():
                combined[s + t] = w * v
        return BellDiagonalState(self.n + other.n, combined)

    def permute_per_copy(self, perms: Sequence[tuple[int, int, int, int]]) -> "BellDiagonalState":
        """Relabel Bell indices copy-by-copy: s_j -> perms[j][s_j - 1]."""

        if len(perms) != self.n:
            raise ValueError(f"need {self.n} permutations, got {len(perms)}")
        out = {}
        for s, w in self.weights.items():
            t = tuple(perms[j][s[j] - 1] for j in range(self.n))
            out[t] = out.get(t, 0.0) + w
        return BellDiagonalState(self.n, out)

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "weights": {"".join(str(i) for i in s): w for s, w in sorted(self.weights.items())},
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "BellDiagonalState":
        data = json.loads(text)
        weights = {tuple(int(c) for c in key): w for key, w in data["weights"].items()}
        return cls(int(data["n"]), weights)


def rho_n(n: int, representation: str = "bell-diagonal"):
    """Uniform mixture of the four n-fold Bell products: weight 1/4 on each
    constant string (i, i, ..., i)."""

    if n < 1:
        raise ValueError("copy count must be >= 1")
    structured = BellDiagonalState(n, {(i,) * n: 0.25 for i in (1, 2, 3, 4)})
    return _as_representation(structured, representation)


def rho2_power(m: int, representation: str = "bell-diagonal"):
    """m independent two-copy blocks: weight 4^-m on every pair-constant
    string (k1, k1, k2, k2, ..., km, km) of length 2m.

    The sparse map holds 4^m strings, so materialize only for moderate m;
    divergences against this state can be evaluated lazily via
    `pair_constant_weight`.
    """

    if m < 1:
        raise ValueError("block count must be >= 1")
    if m > 10:
        raise ValueError("refusing to materialize more than 4^10 strings")
    w = 4.0 ** (-m)
    weights = {}
    for code in range(4 ** m):
        ks = []
        c = code
        for _ in range(m):
            ks.append(c % 4 + 1)
            c //= 4
        s = []
        for k in ks:
            s.extend((k, k))
        weights[tuple(s)] = w
    structured = BellDiagonalState(2 * m, weights)
    return _as_representation(structured, representation)


def is_pair_constant(s: Sequence[int]) -> bool:
    if len(s) % 2 != 0:
        return False
    return all(s[2 * j] == s[2 * j + 1] for j in range(len(s) // 2))


def pair_constant_weight(s: Sequence[int]) -> float:
    """Weight that rho2_power(len(s)/2) assigns to the string s, without
    materializing the state."""

    if len(s) % 2 != 0:
        raise ValueError("pair-constant reference needs an even copy count")
    m = len(s) // 2
    return 4.0 ** (-m) if is_pair_constant(s) else 0.0


def sigma_n(perms: Sequence[tuple[int, int, int, int]] | Sequence[str],
            representation: str = "bell-diagonal"):
    """Four-term mixture with weight 1/4 on (pi_1(i), ..., pi_n(i)), i=1..4.

    Each copy carries its own Bell-index permutation; permutations may be
    given in one-line notation strings like "2134".
    """

    parsed = [parse_permutation(p) if isinstance(p, str) else check_permutation(p)
              for p in perms]
    if not parsed:
        raise ValueError("need at least one permutation (one per copy)")
    n = len(parsed)
    weights = {}
    for i in (1, 2, 3, 4):
        s = tuple(p[i - 1] for p in parsed)
        weights[s] = weights.get(s, 0.0) + 0.25
    structured = BellDiagonalState(n, weights)
    return _as_representation(structured, representation)


def check_permutation(perm: Sequence[int]) -> tuple[int, int, int, int]:
    t = tuple(int(i) for i in perm)
    if sorted(t) != [1, 2, 3, 4]:
        raise ValueError(f"not a permutation of 1..4: {perm}")
    return t


def parse_permutation(one_line: str) -> tuple[int, int, int, int]:
    """Parse one-line notation, e.g. "2134" maps 1->2, 2->1, 3->3, 4->4."""

    if len(one_line) != 4 or not one_line.isdigit():
        raise ValueError(f"one-line permutation must be 4 digits, got {one_line!r}")
    return check_permutation(tuple(int(c) for c in one_line))


def invert_permutation(perm: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
    inv = [0, 0, 0, 0]
    for i, image in enumerate(perm, start=1):
        inv[image - 1] = i
    return tuple(inv)


def _as_representation(structured: BellDiagonalState, representation: str):
    if representation == "bell-diagonal":
        return structured
    if representation == "dense":
        return to_dense(structured)
    raise ValueError(f"unknown representation {representation!r}; "
                     "use 'dense' or 'bell-diagonal'")


def bell_diagonal_kl(p: BellDiagonalState, q: BellDiagonalState) -> float:
    """Classical KL divergence sum p log2(p/q) in bits.

    States diagonal in the same product basis commute, so this equals the
    dense relative entropy after conversion.  Returns math.inf as soon as p
    carries weight on a string outside q's support.
    """

    if p.n != q.n:
        raise ValueError("states must have the same copy count")
    total = 0.0
    for s, w in p.weights.items():
        qs = q.weight(s)
        if qs <= 0.0:
            return math.inf
        total += w * math.log2(w / qs)
    return total


def to_dense(b: BellDiagonalState) -> DensityOperator:
    """Dense density operator sum_s w(s) |Phi_s><Phi_s| on the canonical
    copy-major register (capped at 12 qubits)."""

    members = [(w, bell_product_ket(s)) for s, w in sorted(b.weights.items())]
    return dm_from_ensemble(members)


def bell_basis_weights(rho: DensityOperator) -> BellDiagonalState:
    """Project a dense state onto the Bell product basis.

    Only valid as a round-trip check for states that are Bell-diagonal;
    the diagonal weights are returned regardless.
    """

    n2 = rho.layout.n_qubits
    if n2 % 2 != 0:
        raise ValueError("register must consist of whole copies")
    n = n2 // 2
    weights = {}
    for code in range(4 ** n):
        s = []
        c = code
        for _ in range(n):
            s.append(c % 4 + 1)
            c //= 4
        s = tuple(s)
        psi = bell_product_ket(s)
        if psi.layout != rho.layout:
            psi = reorder(psi, rho.layout.labels)
        w = float(np.real(np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes)))
        if w > 1e-15:
            weights[s] = w
    return BellDiagonalState(n, weights)


# --- The two-copy flip identity --------------------------------------------
#
# The uniform four-fold mixture on two copies equals the same mixture with
# the Bell pairs re-formed across (A1,A2) and (B1,B2).  In that form every
# term is a product state across the Alice:Bob cut, which is the explicit
# separability witness for the two-copy mixture.

def smolin_flipped_terms() -> list[Ket]:
    """The four flipped product terms |Phi_i>_{A1A2} x |Phi_i>_{B1B2},
    re-expressed on the canonical A1,B1,A2,B2 register."""

    canonical = RegisterLayout.bell_pairs(2)
    a1, b1, a2, b2 = canonical.qubits
    terms = []
    for i in (1, 2, 3, 4):
        alice_part = bell_ket_on(i, a1, a2)
        bob_part = bell_ket_on(i, b1, b2)
        flipped = ket_tensor(alice_part, bob_part)  # order A1,A2,B1,B2
        terms.append(reorder(flipped, canonical.labels))
    return terms


def smolin_flip_check() -> float:
    """Trace distance between the two-copy mixture and its flipped form."""

    from .entropies import trace_distance

    rho2 = to_dense(rho_n(2))
    flipped = dm_from_ensemble([(0.25, t) for t in smolin_flipped_terms()])
    return trace_distance(rho2, flipped)
