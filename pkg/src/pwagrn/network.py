"""Regulatory networks and the piecewise-affine map they generate.

Every gene ``i`` evolves as::

    x_i <- a * x_i + (1 - a) * sum_j K_ij * H(s_ij * (x_j - T_ij))

with one ``Edge`` per interaction ``j -> i``.  Edge order is significant: a
symbol matrix is a tuple of bits laid out in that order.  Circuits list their
edges by source gene, so for the 2-circuits the word ``"10"`` reads
``(theta_1, theta_2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidNetworkError, SymmetryInapplicableError

WEIGHT_SUM_TOL = 1e-12

Word = tuple  # tuple[int, ...] of 0/1 bits, one per edge


class Heaviside(enum.Enum):
    """Value of the step function at the origin."""

    STANDARD = "standard"  # H(0) = 1
    GHOST = "ghost"  # H(0) = 0

    @classmethod
    def parse(cls, value) -> "Heaviside":
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass(frozen=True)
class Edge:
    target: int
    source: int
    sign: int
    weight: float
    threshold: float


def _validate_edges(n_genes: int, a: float, edges: Sequence[Edge]) -> None:
    if int(n_genes) != n_genes or n_genes < 1:
        raise InvalidNetworkError(f"gene count must be a positive integer, got {n_genes!r}")
    if not (0.0 <= a < 1.0):
        raise InvalidNetworkError(f"degradation rate must lie in [0, 1), got {a!r}")
    if not edges:
        raise InvalidNetworkError("network has no edges")
    for k, e in enumerate(edges):
        if not (0 <= e.target < n_genes) or not (0 <= e.source < n_genes):
            raise InvalidNetworkError(f"edge {k}: gene index out of range [0, {n_genes})")
        if e.sign not in (-1, 1):
            raise InvalidNetworkError(f"edge {k}: sign must be +1 or -1, got {e.sign!r}")
        if not (e.weight > 0 and math.isfinite(e.weight)):
            raise InvalidNetworkError(f"edge {k}: weight must be positive, got {e.weight!r}")
        if not math.isfinite(e.threshold):
            raise InvalidNetworkError(f"edge {k}: threshold must be finite")


def row_sums(n_genes: int, edges: Iterable[Edge]) -> list[float]:
    sums = [[] for _ in range(n_genes)]
    for e in edges:
        sums[e.target].append(e.weight)
    return [math.fsum(s) for s in sums]


@dataclass(frozen=True)
class RegulatoryNetwork:
    """Immutable network with unit weight row sums.

    Parameters
    ----------
    n_genes : int
    a : float
        Degradation rate in ``[0, 1)``, shared by all genes.
    edges : sequence of Edge
        Every gene must have at least one incoming edge and the incoming
        weights must sum to one within ``1e-12``.  Use :func:`normalize` for
        raw weights.
    """

    n_genes: int
    a: float
    edges: tuple

    _src: np.ndarray = field(init=False, repr=False, compare=False)
    _tgt: np.ndarray = field(init=False, repr=False, compare=False)
    _sgn: np.ndarray = field(init=False, repr=False, compare=False)
    _w: np.ndarray = field(init=False, repr=False, compare=False)
    _thr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = tuple(
            e if isinstance(e, Edge) else Edge(*e) for e in self.edges
        )
        edges = tuple(
            Edge(int(e.target), int(e.source), int(e.sign), float(e.weight), float(e.threshold))
            for e in edges
        )
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "a", float(self.a))
        _validate_edges(self.n_genes, self.a, edges)
        for i, s in enumerate(row_sums(self.n_genes, edges)):
            if abs(s - 1.0) > WEIGHT_SUM_TOL:
                raise InvalidNetworkError(
                    f"gene {i}: incoming weight row sum {s!r} != 1 (normalize first)"
                )
        object.__setattr__(self, "_src", np.array([e.source for e in edges], dtype=np.intp))
        object.__setattr__(self, "_tgt", np.array([e.target for e in edges], dtype=np.intp))
        object.__setattr__(self, "_sgn", np.array([e.sign for e in edges], dtype=float))
        object.__setattr__(self, "_w", np.array([e.weight for e in edges], dtype=float))
        object.__setattr__(self, "_thr", np.array([e.threshold for e in edges], dtype=float))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def sources(self) -> np.ndarray:
        return self._src

    @property
    def targets(self) -> np.ndarray:
        return self._tgt

    @property
    def signs(self) -> np.ndarray:
        return self._sgn

    @property
    def weights(self) -> np.ndarray:
        return self._w

    @property
    def thresholds(self) -> np.ndarray:
        return self._thr

    def with_thresholds(self, thresholds: Sequence[float]) -> "RegulatoryNetwork":
        if len(thresholds) != self.n_edges:
            raise InvalidNetworkError("threshold vector length does not match edge count")
        edges = tuple(
            Edge(e.target, e.source, e.sign, e.weight, float(t))
            for e, t in zip(self.edges, thresholds)
        )
        return RegulatoryNetwork(self.n_genes, self.a, edges)

    # -- evaluation ---------------------------------------------------------

    def symbols(self, x, conv: Heaviside = Heaviside.STANDARD) -> np.ndarray:
        """Edge symbols ``theta_e`` for a state (shape ``(N,)``) or a batch ``(M, N)``."""
        x = np.asarray(x, dtype=float)
        arg = self._sgn * (x[..., self._src] - self._thr)
        if Heaviside.parse(conv) is Heaviside.STANDARD:
            return (arg >= 0).astype(np.int8)
        return (arg > 0).astype(np.int8)

    def drive(self, theta) -> np.ndarray:
        """K-weighted input ``sum_j K_ij theta_ij`` per gene, accumulated in edge order."""
        theta = np.asarray(theta)
        out = np.zeros(theta.shape[:-1] + (self.n_genes,))
        for e in range(self.n_edges):
            out[..., self._tgt[e]] += self._w[e] * theta[..., e]
        return out

    def apply_symbols(self, x, theta) -> np.ndarray:
        """The affine branch selected by ``theta`` applied to ``x``."""
        x = np.asarray(x, dtype=float)
        return self.a * x + (1.0 - self.a) * self.drive(theta)

    def step(self, x, conv: Heaviside = Heaviside.STANDARD) -> np.ndarray:
        return self.apply_symbols(x, self.symbols(x, conv))

    # -- structure ----------------------------------------------------------

    def is_circuit(self) -> bool:
        n = self.n_genes
        if self.n_edges != n:
            return False
        return all(e.source == k and e.target == (k + 1) % n for k, e in enumerate(self.edges))

    def sign_product(self) -> int:
        return int(np.prod(self._sgn))


# -- module-level operations ------------------------------------------------


def step(net: RegulatoryNetwork, x, conv: Heaviside = Heaviside.STANDARD) -> np.ndarray:
    return net.step(x, conv)


def symbols_of(net: RegulatoryNetwork, x, conv: Heaviside = Heaviside.STANDARD) -> Word:
    return tuple(int(b) for b in net.symbols(x, conv))


def iterate(net: RegulatoryNetwork, x0, steps: int, conv: Heaviside = Heaviside.STANDARD) -> list:
    """Trajectory ``[x0, F(x0), ..., F^steps(x0)]``."""
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    x = np.asarray(x0, dtype=float).copy()
    out = [x]
    for _ in range(steps):
        x = net.step(x, conv)
        out.append(x)
    return out


def cube_distance(x) -> float:
    """Max-norm distance from ``x`` to the unit cube."""
    x = np.asarray(x, dtype=float)
    return float(np.max(np.maximum(0.0, np.maximum(-x, x - 1.0)), initial=0.0))


def fixed_point_of_code(net: RegulatoryNetwork, constant_symbols) -> tuple[np.ndarray, bool]:
    """Fixed point generated by a constant code and whether the code realises it.

    The verdict uses the same boundary bookkeeping as the periodic-code
    admissibility test, so the two always agree.
    """
    from .symbolic import admissibility_from_points  # local: symbolic imports this module

    theta = np.asarray(constant_symbols, dtype=np.int8)
    if theta.shape != (net.n_edges,):
        raise InvalidNetworkError("symbol vector does not match the network edge order")
    xbar = net.drive(theta)
    verdict = admissibility_from_points(net, [xbar], [tuple(int(b) for b in theta)])
    return xbar, verdict.is_admissible


def normalize(n_genes: int, a: float, edges: Sequence[Edge]) -> tuple[RegulatoryNetwork, np.ndarray]:
    """Rescale raw weights to unit row sums.

    With ``alpha_i = 1 / sum_j K_ij`` the states ``alpha_i x_i`` of the raw
    system form an orbit of the returned network, whose weights are
    ``alpha_i K_ij`` and thresholds ``alpha_j T_ij``.
    """
    edges = [e if isinstance(e, Edge) else Edge(*e) for e in edges]
    _validate_edges(n_genes, a, edges)
    sums = row_sums(n_genes, edges)
    for i, s in enumerate(sums):
        if not s > 0:
            raise InvalidNetworkError(f"gene {i}: nonpositive incoming weight sum {s!r}")
    alpha = np.array([1.0 / s for s in sums])
    scaled = []
    for e in edges:
        if sums[e.target] == 1.0:
            w = e.weight
        else:
            w = e.weight * alpha[e.target]
        t = e.threshold if sums[e.source] == 1.0 else e.threshold * alpha[e.source]
        scaled.append(Edge(e.target, e.source, e.sign, w, t))
    # weights of a row may still miss 1 by an ulp or two; fold the residue into the last edge
    last = {}
    for k, e in enumerate(scaled):
        last[e.target] = k
    for i, k in last.items():
        others = math.fsum(e.weight for j, e in enumerate(scaled) if e.target == i and j != k)
        if others > 0:
            e = scaled[k]
            scaled[k] = Edge(e.target, e.source, e.sign, 1.0 - others, e.threshold)
    return RegulatoryNetwork(n_genes, a, tuple(scaled)), alpha


def flip_node(net: RegulatoryNetwork, k: int) -> tuple[RegulatoryNetwork, Callable]:
    """Conjugate the network by ``x_k -> 1 - x_k``.

    Incoming and outgoing edge signs at ``k`` flip, except the self-loop;
    thresholds of edges sourced at ``k`` become ``1 - T``.  Returns the new
    network and the state transform (an involution).
    """
    if not (0 <= k < net.n_genes):
        raise InvalidNetworkError(f"gene index {k} out of range")
    edges = []
    for e in net.edges:
        sign, thr = e.sign, e.threshold
        if e.source == k:
            thr = 1.0 - thr
        if (e.source == k) != (e.target == k):
            sign = -sign
        edges.append(Edge(e.target, e.source, sign, e.weight, thr))
    flipped = RegulatoryNetwork(net.n_genes, net.a, tuple(edges))

    def transform(x):
        y = np.array(x, dtype=float, copy=True)
        y[..., k] = 1.0 - y[..., k]
        return y

    return flipped, transform


# -- circuits ---------------------------------------------------------------


@dataclass(frozen=True)
class CircuitSpec:
    """Feedback circuit ``i-1 -> i``; ``signs[i]`` and ``thresholds[i]`` belong to the edge leaving gene ``i``."""

    signs: tuple
    thresholds: tuple
    a: float

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        object.__setattr__(self, "thresholds", tuple(float(t) for t in self.thresholds))
        if len(self.signs) != len(self.thresholds) or not self.signs:
            raise InvalidNetworkError("circuit needs equally many (>= 1) signs and thresholds")

    @property
    def length(self) -> int:
        return len(self.signs)

    def network(self) -> RegulatoryNetwork:
        return circuit(self.signs, self.thresholds, self.a)


def circuit(signs: Sequence[int], thresholds: Sequence[float], a: float) -> RegulatoryNetwork:
    n = len(signs)
    if n != len(thresholds) or n == 0:
        raise InvalidNetworkError("circuit needs equally many (>= 1) signs and thresholds")
    edges = tuple(Edge((i + 1) % n, i, int(signs[i]), 1.0, float(thresholds[i])) for i in range(n))
    return RegulatoryNetwork(n, a, edges)


def self_activator(threshold: float, a: float) -> RegulatoryNetwork:
    return circuit([1], [threshold], a)


def self_inhibitor(threshold: float, a: float) -> RegulatoryNetwork:
    return circuit([-1], [threshold], a)


def positive_2circuit(t1: float, t2: float, a: float) -> RegulatoryNetwork:
    """Mutual inhibition (both signs negative)."""
    return circuit([-1, -1], [t1, t2], a)


def negative_2circuit(t1: float, t2: float, a: float) -> RegulatoryNetwork:
    """Gene 1 activates gene 2, gene 2 inhibits gene 1."""
    return circuit([1, -1], [t1, t2], a)


def circuit_symmetry(spec: CircuitSpec, which: str, x) -> np.ndarray:
    """Apply ``S``, ``R`` or ``sigmaR`` to a state (or a threshold vector).

    ``R`` (cyclic shift ``x_i -> x_{i-1}``) needs all signs positive;
    ``sigmaR`` needs every sign positive except the last one.
    """
    x = np.asarray(x, dtype=float)
    signs = spec.signs
    if which == "S":
        return 1.0 - x
    if which == "R":
        if any(s != 1 for s in signs):
            raise SymmetryInapplicableError("R applies to the all-positive circuit only")
        return np.roll(x, 1, axis=-1)
    if which == "sigmaR":
        if any(s != 1 for s in signs[:-1]) or signs[-1] != -1:
            raise SymmetryInapplicableError(
                "sigmaR applies to the circuit with all signs +1 except the last"
            )
        y = np.roll(x, 1, axis=-1)
        y[..., 0] = 1.0 - y[..., 0]
        return y
    raise ValueError(f"unknown symmetry {which!r}")
