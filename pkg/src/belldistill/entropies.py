"""Spectral quantities: eigendecomposition, entropies, fidelity, distances.

All logarithms are base 2, so entropies and divergences are in bits and one
ebit is the entanglement of one Bell pair.
"""

from __future__ import annotations

import math

import numpy as np

from .states import DensityOperator, Ket

# Eigenvalues at or below this are treated as exact zeros for entropy and
# support purposes; dimensions are <= 4096 so eigensolver noise stays well
# below it.
SUPPORT_CUTOFF = 1e-10
# Relative-entropy support leak: if more of rho's weight than this lies
# outside sigma's support, the divergence is infinite.
SUPPORT_LEAK_TOL = 1e-9

HERM_INPUT_TOL = 1e-10


def herm_eig(matrix: np.ndarray | DensityOperator):
    """Eigenvalues (real, descending) and matching orthonormal eigenvectors.

    Rejects inputs that are not Hermitian within 1e-10.
    """

    m = matrix.matrix if isinstance(matrix, DensityOperator) else np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > HERM_INPUT_TOL:
        raise ValueError(f"matrix is not Hermitian (max asymmetry {asym:.2e})")
    vals, vecs = np.linalg.eigh(m)
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def shannon_bits(probs: np.ndarray) -> float:
    """-sum p log2 p with 0 log 0 = 0."""

    p = np.asarray(probs, dtype=float)
    p = p[p > SUPPORT_CUTOFF]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho: DensityOperator) -> float:
    vals, _ = herm_eig(rho)
    return shannon_bits(np.clip(vals, 0.0, None))


def relative_entropy(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Tr rho (log2 rho - log2 sigma) via spectral decompositions.

    Returns math.inf when the support of rho is not contained in the support
    of sigma (support = eigenvalues above 1e-10; more than 1e-9 of rho's
    weight outside sigma's support counts as non-containment).  Callers must
    branch on math.isinf rather than compare against a large float.
    """

    if rho.layout != sigma.layout:
        raise ValueError("states must share a layout")
    p, _ = herm_eig(rho)
    q, v = herm_eig(sigma)
    # weight of rho along each eigenvector of sigma
    w = np.real(np.sum(v.conj() * (rho.matrix @ v), axis=0))
    w = np.clip(w, 0.0, None)
    on_support = q > SUPPORT_CUTOFF
    leak = float(np.sum(w[~on_support]))
    if leak > SUPPORT_LEAK_TOL:
        return math.inf
    p_pos = p[p > SUPPORT_CUTOFF]
    s_rho = float(np.sum(p_pos * np.log2(p_pos)))
    cross = float(np.sum(w[on_support] * np.log2(q[on_support])))
    return s_rho - cross


def fidelity_pure(rho: DensityOperator, psi: Ket) -> float:
    """<psi| rho |psi> for a pure reference state."""

    if rho.layout != psi.layout:
        raise ValueError("states must share a layout")
    a = psi.amplitudes
    return float(np.real(np.vdot(a, rho.matrix @ a)))


def trace_distance(rho: DensityOperator, tau: DensityOperator) -> float:
    """(1/2) ||rho - tau||_1 from the eigenvalues of the difference."""

    if rho.layout != tau.layout:
        raise ValueError("states must share a layout")
    diff = rho.matrix - tau.matrix
    vals = np.linalg.eigvalsh(diff)
    return float(0.5 * np.sum(np.abs(vals)))


def purity(rho: DensityOperator) -> float:
    return float(np.real(np.trace(rho.matrix @ rho.matrix)))
