"""Pure and mixed states on labeled qubit registers.

Kets and density operators carry their RegisterLayout; all axis bookkeeping
(partial trace, partial transpose, reordering, local gates) is derived from
the layout rather than hand-coded index maps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .registers import RegisterLayout, check_dense_size

NORM_TOL = 1e-12
HERM_TOL = 1e-12
EIG_TOL = 1e-10
TRACE_TOL = 1e-10


def _frozen_array(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=complex)
    if arr.shape != shape:
        raise ValueError(f"expected array of shape {shape}, got {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Ket:
    """Normalized pure state over a labeled register."""

    layout: RegisterLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        check_dense_size(self.layout.n_qubits)
        amps = _frozen_array(self.amplitudes, (self.layout.dim,))
        object.__setattr__(self, "amplitudes", amps)
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL * 10:
            raise ValueError(f"ket is not normalized: |psi|^2 = {norm2}")

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.layout.n_qubits)

    def to_dm(self) -> "DensityOperator":
        return DensityOperator(self.layout, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace operator on a register."""

    layout: RegisterLayout
    matrix: np.ndarray

    def __post_init__(self):
        check_dense_size(self.layout.n_qubits)
        d = self.layout.dim
        m = _frozen_array(self.matrix, (d, d))
        object.__setattr__(self, "matrix", m)
        herm_err = float(np.max(np.abs(m - m.conj().T)))
        if herm_err > HERM_TOL * 10:
            raise ValueError(f"matrix is not Hermitian (max asymmetry {herm_err:.2e})")
        tr_err = abs(float(m.trace().real) - 1.0)
        if tr_err > TRACE_TOL:
            raise ValueError(f"trace differs from 1 by {tr_err:.2e}")
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -EIG_TOL:
            raise ValueError(f"matrix has negative eigenvalue {min_eig:.2e}")


def basis_ket(layout: RegisterLayout, bits: Sequence[int]) -> Ket:
    """Computational basis ket |b1 b2 ...> in the layout's big-endian order."""

    if len(bits) != layout.n_qubits:
        raise ValueError("bit string length must match layout size")
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError("bits must be 0 or 1")
        index = (index << 1) | b
    amps = np.zeros(layout.dim, dtype=complex)
    amps[index] = 1.0
    return Ket(layout, amps)


def ket_tensor(a: Ket, b: Ket) -> Ket:
    """Tensor product; layouts are concatenated (a's qubits most significant)."""

    layout = a.layout.concat(b.layout)
    return Ket(layout, np.kron(a.amplitudes, b.amplitudes))


def dm_tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator:
    layout = a.layout.concat(b.layout)
    return DensityOperator(layout, np.kron(a.matrix, b.matrix))


def dm_from_ensemble(members: Iterable[tuple[float, Ket]]) -> DensityOperator:
    """Mixture sum(w_k |psi_k><psi_k|) of kets sharing one layout."""

    members = list(members)
    if not members:
        raise ValueError("ensemble must not be empty")
    layout = members[0][1].layout
    total = 0.0
    rho = np.zeros((layout.dim, layout.dim), dtype=complex)
    for w, psi in members:
        if w < 0:
            raise ValueError(f"negative ensemble weight {w}")
        if psi.layout != layout:
            raise ValueError("all ensemble members must share a layout")
        total += w
        rho += w * np.outer(psi.amplitudes, psi.amplitudes.conj())
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"ensemble weights sum to {total}, expected 1")
    return DensityOperator(layout, rho)


def partial_trace(rho: DensityOperator, keep: Iterable[str]) -> DensityOperator:
    """Trace out every qubit not in `keep`; kept qubits keep their order."""

    layout = rho.layout
    keep_set = set(keep)
    missing = keep_set - set(layout.labels)
    if missing:
        raise ValueError(f"unknown qubit labels {sorted(missing)}")
    if keep_set == set(layout.labels):
        return rho
    if not keep_set:
        raise ValueError("must keep at least one qubit")
    n = layout.n_qubits
    keep_axes = [k for k, q in enumerate(layout.qubits) if q.label in keep_set]
    drop_axes = [k for k in range(n) if k not in keep_axes]

    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for ax in drop_axes:
        col[ax] = row[ax]
    out = "".join(row[ax] for ax in keep_axes) + "".join(col[ax] for ax in keep_axes)
    t = rho.matrix.reshape((2,) * (2 * n))
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = 2 ** len(keep_axes)
    sub = layout.subset(keep_set)
    return DensityOperator(sub, reduced.reshape(d, d))


def partial_transpose_matrix(matrix: np.ndarray, n_qubits: int,
                             axes: Sequence[int]) -> np.ndarray:
    """Transpose the given qubit axes only (pure index permutation)."""

    d = 2 ** n_qubits
    if matrix.shape != (d, d):
        raise ValueError(f"matrix shape {matrix.shape} does not match {n_qubits} qubits")
    perm = list(range(2 * n_qubits))
    for ax in axes:
        perm[ax], perm[n_qubits + ax] = perm[n_qubits + ax], perm[ax]
    t = matrix.reshape((2,) * (2 * n_qubits))
    return t.transpose(perm).reshape(d, d)


def partial_transpose(rho: DensityOperator, subset: Iterable[str]) -> np.ndarray:
    """Partial transpose over `subset`.  Result is Hermitian and unit-trace
    but generally not positive, so a raw matrix is returned."""

    axes = rho.layout.axes_of(subset)
    return partial_transpose_matrix(rho.matrix, rho.layout.n_qubits, axes)


def reorder(state: Ket | DensityOperator, new_order: Sequence[str]):
    """Rewrite a state on the same register with qubits listed in a new order."""

    layout = state.layout
    new_layout = layout.reordered(new_order)
    perm = [layout.index_of(l) for l in new_order]
    n = layout.n_qubits
    if isinstance(state, Ket):
        t = state.tensor_view().transpose(perm)
        return Ket(new_layout, t.reshape(layout.dim))
    t = state.matrix.reshape((2,) * (2 * n))
    t = t.transpose(perm + [n + p for p in perm])
    return DensityOperator(new_layout, t.reshape(layout.dim, layout.dim))


def _apply_gate_axis(tensor: np.ndarray, gate: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(tensor, axis, 0)
    out = np.tensordot(gate, moved, axes=([1], [0]))
    return np.moveaxis(out, 0, axis)


def apply_local(state: Ket | DensityOperator,
                gates: Mapping[str, np.ndarray]):
    """Apply one-qubit gates (label -> 2x2 unitary) to a state."""

    layout = state.layout
    n = layout.n_qubits
    for label, g in gates.items():
        g = np.asarray(g, dtype=complex)
        if g.shape != (2, 2):
            raise ValueError(f"gate for {label!r} must be 2x2")
        layout.index_of(label)
    if isinstance(state, Ket):
        t = state.tensor_view().copy()
        for label, g in gates.items():
            t = _apply_gate_axis(t, np.asarray(g, dtype=complex), layout.index_of(label))
        return Ket(layout, t.reshape(layout.dim))
    t = state.matrix.reshape((2,) * (2 * n)).copy()
    for label, g in gates.items():
        g = np.asarray(g, dtype=complex)
        ax = layout.index_of(label)
        t = _apply_gate_axis(t, g, ax)
        t = _apply_gate_axis(t, g.conj(), n + ax)
    return DensityOperator(layout, t.reshape(layout.dim, layout.dim))


# --- JSON exchange format -------------------------------------------------
#
# Complex entries are [re, im] pairs, matrices row-major, and the layout is
# embedded so a dump is self-describing.

def _layout_to_json(layout: RegisterLayout) -> list[dict]:
    return [{"label": q.label, "owner": q.owner, "copy": q.copy} for q in layout.qubits]


def _layout_from_json(data: list[dict]) -> RegisterLayout:
    from .registers import QubitSpec

    return RegisterLayout(tuple(QubitSpec(d["label"], d["owner"], d["copy"]) for d in data))


def _complex_out(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def ket_to_json(psi: Ket) -> str:
    payload = {
        "kind": "ket",
        "qubits": _layout_to_json(psi.layout),
        "amplitudes": [_complex_out(z) for z in psi.amplitudes],
    }
    return json.dumps(payload, sort_keys=True)


def dm_to_json(rho: DensityOperator) -> str:
    payload = {
        "kind": "density_operator",
        "qubits": _layout_to_json(rho.layout),
        "matrix": [[_complex_out(z) for z in row] for row in rho.matrix],
    }
    return json.dumps(payload, sort_keys=True)


def ket_from_json(text: str) -> Ket:
    data = json.loads(text)
    if data.get("kind") != "ket":
        raise ValueError("not a ket payload")
    layout = _layout_from_json(data["qubits"])
    amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
    return Ket(layout, amps)


def dm_from_json(text: str) -> DensityOperator:
    data = json.loads(text)
    if data.get("kind") != "density_operator":
        raise ValueError("not a density operator payload")
    layout = _layout_from_json(data["qubits"])
    m = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
    return DensityOperator(layout, m)
