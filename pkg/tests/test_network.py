import numpy as np
import pytest

from pwagrn.errors import InvalidNetworkError, SymmetryInapplicableError
from pwagrn.network import (
    CircuitSpec,
    Edge,
    Heaviside,
    RegulatoryNetwork,
    circuit,
    circuit_symmetry,
    cube_distance,
    fixed_point_of_code,
    flip_node,
    iterate,
    negative_2circuit,
    normalize,
    positive_2circuit,
    self_activator,
    self_inhibitor,
    step,
    symbols_of,
)

from conftest import random_network


def test_self_activator_step_above_threshold():
    net = self_activator(0.5, 0.5)
    assert step(net, [0.8])[0] == pytest.approx(0.9, abs=1e-15)


def test_self_inhibitor_step_below_threshold():
    net = self_inhibitor(0.5, 0.5)
    assert step(net, [0.2])[0] == pytest.approx(0.6, abs=1e-15)


@pytest.mark.parametrize("conv, expected", [(Heaviside.STANDARD, 0.75), (Heaviside.GHOST, 0.25)])
def test_heaviside_at_threshold(conv, expected):
    net = self_activator(0.5, 0.5)
    assert step(net, [0.5], conv)[0] == pytest.approx(expected, abs=1e-15)


def test_symbols_in_edge_order():
    net = negative_2circuit(0.4, 0.6, 0.3)
    # edge 0: gene 0 -> gene 1 (+), edge 1: gene 1 -> gene 0 (-)
    # theta = H(s (x_source - T)), so the inhibiting edge reads 1 below its threshold
    assert symbols_of(net, [0.5, 0.5]) == (1, 1)
    assert symbols_of(net, [0.3, 0.7]) == (0, 0)


def test_absorption_and_invariance(rng):
    for trial in range(20):
        net = random_network(rng, int(rng.integers(1, 5)))
        xs = rng.uniform(-5.0, 6.0, size=(60, net.n_genes))
        for x in xs:
            y = step(net, x)
            assert cube_distance(y) <= net.a * cube_distance(x) + 1e-12
        inside = rng.uniform(0.0, 1.0, size=(60, net.n_genes))
        for x in inside:
            y = step(net, x)
            assert np.all(y >= 0.0) and np.all(y <= 1.0)


def test_selector_consistency_exact(rng):
    for _ in range(30):
        net = random_network(rng, int(rng.integers(1, 5)))
        x = rng.uniform(-1.0, 2.0, net.n_genes)
        theta = np.array(symbols_of(net, x))
        drive = np.zeros(net.n_genes)
        for k, e in enumerate(net.edges):
            drive[e.target] += e.weight * theta[k]
        expected = net.a * x + (1 - net.a) * drive
        assert np.array_equal(step(net, x), expected)


def test_row_sum_validation():
    with pytest.raises(InvalidNetworkError):
        RegulatoryNetwork(1, 0.5, (Edge(0, 0, 1, 0.9, 0.5),))
    with pytest.raises(InvalidNetworkError):
        RegulatoryNetwork(1, 1.0, (Edge(0, 0, 1, 1.0, 0.5),))


def _raw_step(a, edges, x):
    y = a * np.asarray(x, dtype=float)
    for e in edges:
        y[e.target] += (1 - a) * e.weight * (e.sign * (x[e.source] - e.threshold) >= 0)
    return y


def test_normalize_conjugates_raw_system(rng):
    edges = [Edge(0, 0, 1, 2.0, 0.4), Edge(0, 1, -1, 6.0, 0.7), Edge(1, 0, 1, 1.0, 0.3)]
    net, alpha = normalize(2, 0.6, edges)
    assert np.allclose(alpha, [0.125, 1.0])
    assert sum(e.weight for e in net.edges if e.target == 0) == pytest.approx(1.0, abs=1e-15)
    for _ in range(10):
        x = rng.uniform(0.0, 8.0, 2)
        y = alpha * x
        for _ in range(100):
            x = _raw_step(0.6, edges, x)
            y = step(net, y)
            assert np.allclose(alpha * x, y, atol=1e-12)


@pytest.mark.parametrize("k", [0, 1, 2])
def test_flip_conjugacy(rng, k):
    checked = 0
    for _ in range(40):
        net = random_network(rng, 3)
        flipped, T = flip_node(net, k)
        x = rng.uniform(0, 1, 3)
        traj = iterate(net, x, 200)
        gaps = [abs(p[e.source] - e.threshold) for p in traj for e in net.edges]
        if min(gaps) <= 1e-9:
            continue
        for p in traj[:-1]:
            assert np.max(np.abs(T(step(net, p)) - step(flipped, T(p)))) <= 1e-12
        checked += 1
    assert checked >= 20


def test_flip_is_involution(rng):
    net = random_network(rng, 3)
    twice, T = flip_node(flip_node(net, 1)[0], 1)
    for e1, e2 in zip(net.edges, twice.edges):
        assert (e1.target, e1.source, e1.sign) == (e2.target, e2.source, e2.sign)
        assert e2.threshold == pytest.approx(e1.threshold, abs=1e-15)
    x = rng.uniform(0, 1, 3)
    assert np.allclose(T(T(x)), x)


def test_symmetry_examples():
    spec = CircuitSpec((1, -1), (0.3, 0.6), 0.4)
    assert np.allclose(circuit_symmetry(spec, "S", [0.3, 0.8]), [0.7, 0.2])
    x = np.array([0.21, 0.67])
    y = x
    for _ in range(4):
        y = circuit_symmetry(spec, "sigmaR", y)
    assert np.allclose(y, x)
    twice = circuit_symmetry(spec, "sigmaR", circuit_symmetry(spec, "sigmaR", x))
    assert np.allclose(twice, circuit_symmetry(spec, "S", x))
    with pytest.raises(SymmetryInapplicableError):
        circuit_symmetry(spec, "R", x)
    with pytest.raises(SymmetryInapplicableError):
        circuit_symmetry(CircuitSpec((-1, -1), (0.5, 0.5), 0.4), "sigmaR", x)


def test_rotation_symmetry_of_positive_circuit():
    spec = CircuitSpec((1, 1, 1), (0.2, 0.5, 0.7), 0.5)
    assert np.allclose(circuit_symmetry(spec, "R", [0.1, 0.2, 0.3]), [0.3, 0.1, 0.2])


def test_sigma_r_orbit_correspondence(rng):
    for _ in range(20):
        a = float(rng.uniform(0.05, 0.95))
        t = rng.uniform(0.05, 0.95, 2)
        spec = CircuitSpec((1, -1), tuple(t), a)
        image = CircuitSpec((1, -1), tuple(circuit_symmetry(spec, "sigmaR", t)), a)
        x = rng.uniform(0, 1, 2)
        traj = iterate(spec.network(), x, 100)
        traj2 = iterate(image.network(), circuit_symmetry(spec, "sigmaR", x), 100)
        gaps = min(abs(p[j] - t[j]) for p in traj for j in range(2))
        if gaps < 1e-9:
            continue
        for p, q in zip(traj, traj2):
            assert np.max(np.abs(circuit_symmetry(spec, "sigmaR", p) - q)) <= 1e-12


@pytest.mark.parametrize("bad", [1.2, -0.3])
def test_degenerate_threshold_unique_fixed_point(rng, bad):
    for n in (1, 2, 3):
        signs = list(rng.choice([-1, 1], n))
        thresholds = list(rng.uniform(0.1, 0.9, n))
        thresholds[int(rng.integers(0, n))] = bad
        net = circuit(signs, thresholds, 0.7)
        ends = [iterate(net, rng.uniform(-1, 2, n), 400)[-1] for _ in range(100)]
        for e in ends:
            assert np.max(np.abs(e - ends[0])) <= 1e-9


def test_fixed_points_of_positive_circuit():
    net = positive_2circuit(0.5, 0.5, 0.25)
    # edge 1 drives gene 0, edge 0 drives gene 1
    xbar, ok = fixed_point_of_code(net, (0, 1))
    assert ok and np.allclose(xbar, [1.0, 0.0])
    xbar, ok = fixed_point_of_code(net, (0, 0))
    assert not ok and np.allclose(xbar, [0.0, 0.0])


@pytest.mark.parametrize("theta, point", [((1,), 1.0), ((0,), 0.0)])
def test_self_activator_fixed_points(theta, point):
    for t in (0.1, 0.5, 0.9):
        xbar, ok = fixed_point_of_code(self_activator(t, 0.3), theta)
        assert ok and xbar[0] == point


def test_batch_step_matches_single(rng):
    net = random_network(rng, 3)
    xs = rng.uniform(0, 1, (25, 3))
    batch = net.step(xs)
    for x, y in zip(xs, batch):
        assert np.array_equal(step(net, x), y)
