import numpy as np
import pytest

from belldistill import DensityOperator, RegisterLayout


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_density(layout: RegisterLayout, rng: np.random.Generator) -> DensityOperator:
    """Ginibre-random full-rank density operator on the given register."""

    d = layout.dim
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T
    return DensityOperator(layout, m / m.trace())


def random_bell_diagonal(n: int, rng: np.random.Generator, support: int | None = None):
    """Random Bell-diagonal state; full support unless `support` is given."""

    from belldistill import BellDiagonalState

    strings = []
    for code in range(4 ** n):
        s, c = [], code
        for _ in range(n):
            s.append(c % 4 + 1)
            c //= 4
        strings.append(tuple(s))
    if support is not None:
        idx = rng.choice(len(strings), size=support, replace=False)
        strings = [strings[i] for i in idx]
    w = rng.dirichlet(np.ones(len(strings)))
    return BellDiagonalState(n, dict(zip(strings, w)))
