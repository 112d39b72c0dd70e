import numpy as np
import pytest

from pwagrn.network import Edge, normalize


def random_network(rng, n_genes, a=None, extra_edges=2):
    """Random network where every gene has at least one input, weights normalised."""
    if a is None:
        a = float(rng.uniform(0.05, 0.95))
    edges = []
    for i in range(n_genes):
        for _ in range(1 + int(rng.integers(0, extra_edges + 1))):
            edges.append(
                Edge(
                    i,
                    int(rng.integers(0, n_genes)),
                    int(rng.choice([-1, 1])),
                    float(rng.uniform(0.2, 2.0)),
                    float(rng.uniform(0.05, 0.95)),
                )
            )
    return normalize(n_genes, a, edges)[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
