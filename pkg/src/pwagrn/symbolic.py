"""Symbolic dynamics of a regulatory network.

A *word* is one symbol matrix: a tuple of bits in the network's edge order.
A :class:`Code` is a finite transient followed by a period repeated forever.

Periodic codes are turned back into orbits by summing the geometric series
of affine contributions, and the admissibility verdict compares that orbit
with the thresholds over one period.  Trajectories are coded by watching
the symbol stream for a repeating word and certifying the candidate with
the contraction estimate: once a state lies closer to the reconstructed
orbit than the orbit's threshold margin it can never leave the code.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import UndecidedError
from .network import Heaviside, RegulatoryNetwork

BOUNDARY_BAND = 1e-12


# -- words and codes -----------------------------------------------------------


def word_to_str(word: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in word)


def str_to_word(text: str, n_edges: int | None = None) -> tuple:
    if not text or any(c not in "01" for c in text):
        raise ValueError(f"symbol word must be a nonempty string of 0/1, got {text!r}")
    if n_edges is not None and len(text) != n_edges:
        raise ValueError(f"symbol word {text!r} has {len(text)} bits, network has {n_edges} edges")
    return tuple(int(c) for c in text)


def least_rotation(period: Sequence[tuple]) -> int:
    """Offset ``r`` such that ``period[r:] + period[:r]`` is lexicographically least."""
    p = list(period)
    n = len(p)
    return min(range(n), key=lambda r: p[r:] + p[:r])


def primitive_root(period: Sequence[tuple]) -> tuple:
    """Shortest word whose repetition gives ``period``."""
    p = tuple(period)
    n = len(p)
    for d in range(1, n + 1):
        if n % d == 0 and p == p[:d] * (n // d):
            return p[:d]
    return p  # pragma: no cover


@dataclass(frozen=True)
class Code:
    """Eventually periodic symbolic sequence in canonical form.

    The period is primitive and rotated to its least rotation; the phase
    shift this introduces is absorbed into the transient so the sequence
    itself is unchanged.  Use ``code.period`` to compare asymptotic behaviour.
    """

    transient: tuple
    period: tuple

    @classmethod
    def make(cls, period: Iterable, transient: Iterable = ()) -> "Code":
        period = primitive_root(tuple(tuple(int(b) for b in w) for w in period))
        if not period:
            raise ValueError("period must contain at least one word")
        transient = tuple(tuple(int(b) for b in w) for w in transient)
        widths = {len(w) for w in period + transient}
        if len(widths) != 1:
            raise ValueError("all words of a code must have the same number of bits")
        r = least_rotation(period)
        return cls(transient + period[:r], period[r:] + period[:r])

    @property
    def period_length(self) -> int:
        return len(self.period)

    def text(self) -> str:
        per = " ".join(word_to_str(w) for w in self.period)
        if self.transient:
            return "pre: " + " ".join(word_to_str(w) for w in self.transient) + " per: " + per
        return "per: " + per

    def __str__(self) -> str:
        return self.text()


def parse_code(text: str, n_edges: int | None = None) -> Code:
    """Parse ``"per: 10 00 01 11"`` or ``"pre: 00 01 per: 11 10"``."""
    tokens = text.replace(",", " ").split()
    pre, per, section = [], [], None
    for tok in tokens:
        low = tok.lower()
        if low in ("pre:", "transient:"):
            section = pre
        elif low in ("per:", "period:"):
            section = per
        elif section is None:
            raise ValueError("code text must start with 'pre:' or 'per:'")
        else:
            section.append(str_to_word(tok, n_edges))
    if not per:
        raise ValueError("code text has an empty period")
    return Code.make(per, pre)


def _as_period(code) -> tuple:
    if isinstance(code, Code):
        return code.period
    if isinstance(code, str):
        return parse_code(code).period
    return tuple(tuple(int(b) for b in w) for w in code)


# -- transition graph ----------------------------------------------------------


@dataclass(frozen=True)
class _Piece:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool

    def affine_image(self, a: float, c: float) -> "_Piece":
        if a == 0.0:
            return _Piece(c, c, True, True)
        return _Piece(a * self.lo + c, a * self.hi + c, self.lo_closed, self.hi_closed)

    def intersects(self, other: "_Piece") -> bool:
        if self.lo > other.lo:
            lo, lo_closed = self.lo, self.lo_closed
        elif other.lo > self.lo:
            lo, lo_closed = other.lo, other.lo_closed
        else:
            lo, lo_closed = self.lo, self.lo_closed and other.lo_closed
        if self.hi < other.hi:
            hi, hi_closed = self.hi, self.hi_closed
        elif other.hi < self.hi:
            hi, hi_closed = other.hi, other.hi_closed
        else:
            hi, hi_closed = self.hi, self.hi_closed and other.hi_closed
        if lo < hi:
            return True
        return lo == hi and lo_closed and hi_closed


@dataclass(frozen=True)
class SymbolicGraph:
    nodes: tuple
    edges: frozenset

    def successors(self, word) -> list:
        word = tuple(word)
        return sorted(b for (a, b) in self.edges if a == word)

    def has_edge(self, src, dst) -> bool:
        return (tuple(src), tuple(dst)) in self.edges

    def is_complete(self) -> bool:
        return len(self.edges) == len(self.nodes) ** 2


def _coordinate_pieces(net: RegulatoryNetwork, j: int, conv: Heaviside, bounded: bool):
    """Maximal intervals of coordinate ``j`` on which its outgoing symbols are constant."""
    out = [e for e, edge in enumerate(net.edges) if edge.source == j]
    lo_lim, hi_lim = (0.0, 1.0) if bounded else (-np.inf, np.inf)
    cuts = sorted({net.edges[e].threshold for e in out if lo_lim < net.edges[e].threshold < hi_lim})
    # elementary pieces: open gaps and threshold points, each with a sample point
    pts = [lo_lim] + cuts + [hi_lim]
    elem = [(_Piece(lo_lim, lo_lim, True, True), lo_lim)] if bounded else []
    for k in range(len(pts) - 1):
        lo, hi = pts[k], pts[k + 1]
        if np.isinf(lo):
            sample = hi - 1.0
        elif np.isinf(hi):
            sample = lo + 1.0
        else:
            sample = 0.5 * (lo + hi)
        if lo < hi:
            elem.append((_Piece(lo, hi, False, False), sample))
        if k < len(pts) - 2 or bounded:
            elem.append((_Piece(hi, hi, True, True), hi))

    x = np.zeros(net.n_genes)

    def pattern(v):
        x[j] = v
        th = net.symbols(x, conv)
        return tuple(int(th[e]) for e in out)

    merged = []
    for piece, sample in elem:
        pat = pattern(sample)
        if merged and merged[-1][1] == pat:
            prev = merged[-1][0]
            merged[-1] = (_Piece(prev.lo, piece.hi, prev.lo_closed, piece.hi_closed), pat)
        else:
            merged.append((piece, pat))
    return out, merged


def transition_graph(
    net: RegulatoryNetwork, conv: Heaviside = Heaviside.STANDARD, bounded: bool = False
) -> SymbolicGraph:
    """Exact one-step transitions between atoms.

    Each atom is a product of intervals, the map is affine on it with linear
    part ``a * Id``, so its image is again a box and the test for an edge is
    a box intersection with the boundary conventions tracked per endpoint.
    By default atoms extend over all of ``R^N``; ``bounded=True`` restricts
    them to the unit cube.
    """
    conv = Heaviside.parse(conv)
    per_coord = [_coordinate_pieces(net, j, conv, bounded) for j in range(net.n_genes)]
    atoms = []
    for combo in itertools.product(*[pieces for _, pieces in per_coord]):
        word = [0] * net.n_edges
        for (out, _), (_, pat) in zip(per_coord, combo):
            for e, bit in zip(out, pat):
                word[e] = bit
        atoms.append((tuple(word), tuple(piece for piece, _ in combo)))
    edges = set()
    for word, box in atoms:
        drive = net.drive(np.array(word))
        image = [box[i].affine_image(net.a, (1.0 - net.a) * drive[i]) for i in range(net.n_genes)]
        for word2, box2 in atoms:
            if all(image[i].intersects(box2[i]) for i in range(net.n_genes)):
                edges.add((word, word2))
    nodes = tuple(sorted(w for w, _ in atoms))
    return SymbolicGraph(nodes, frozenset(edges))


# -- periodic orbits and admissibility -------------------------------------------


def periodic_orbit_from_code(net: RegulatoryNetwork, code) -> list:
    """Points ``x^0 .. x^{P-1}`` of the periodic orbit generated by a period word.

    ``x^0`` comes from the summed geometric series; the remaining points are
    produced by the affine branches themselves so that
    ``x^{t+1} = a x^t + (1 - a) d(theta^t)`` holds exactly.
    """
    period = _as_period(code)
    theta = np.array(period, dtype=np.int8)
    if theta.ndim != 2 or theta.shape[1] != net.n_edges:
        raise ValueError("code words do not match the network edge count")
    P = theta.shape[0]
    a = net.a
    d = net.drive(theta)  # (P, N)
    # x^0 = (1-a)/(1-a^P) * sum_k a^k d^{(-k-1) mod P}
    powers = np.array([a**k for k in range(P)])
    idx = [(-k - 1) % P for k in range(P)]
    x = (1.0 - a) / (1.0 - a**P) * (powers[:, None] * d[idx]).sum(axis=0)
    points = [x]
    for t in range(P - 1):
        x = a * x + (1.0 - a) * d[t]
        points.append(x)
    return points


class Verdict(enum.Enum):
    ADMISSIBLE = "Admissible"
    GHOST = "Ghost"
    INADMISSIBLE = "Inadmissible"


@dataclass(frozen=True)
class AdmissibilityVerdict:
    """Outcome of the admissibility test over one period.

    ``standard_ok``/``ghost_ok`` record whether the orbit realises the code
    with ``H(0)=1`` and with ``H(0)=0``; they only differ when some point
    touches a threshold (within ``BOUNDARY_BAND``).
    """

    kind: Verdict
    orbit: tuple
    margin: float
    standard_ok: bool
    ghost_ok: bool

    @property
    def is_admissible(self) -> bool:
        return self.kind is Verdict.ADMISSIBLE

    @property
    def period(self) -> int:
        return len(self.orbit)

    def summary(self) -> str:
        return f"{self.kind.value}, period {self.period}, margin={self.margin:.6g}"


def admissibility_from_points(
    net: RegulatoryNetwork, points, words, conv: Heaviside = Heaviside.STANDARD
) -> AdmissibilityVerdict:
    X = np.asarray(points, dtype=float).reshape(len(points), net.n_genes)
    theta = np.asarray(words, dtype=np.int8).reshape(len(points), net.n_edges)
    gap = X[:, net.sources] - net.thresholds  # x_j^t - T_ij
    touch = np.abs(gap) < BOUNDARY_BAND
    above = (net.signs * gap) > 0
    clear_ok = np.all((theta == above.astype(np.int8)) | touch)
    standard_ok = bool(clear_ok and np.all(theta[touch] == 1))
    ghost_ok = bool(clear_ok and np.all(theta[touch] == 0))
    if Heaviside.parse(conv) is Heaviside.GHOST:
        own, other = ghost_ok, standard_ok
    else:
        own, other = standard_ok, ghost_ok
    if own:
        kind = Verdict.ADMISSIBLE
    elif other:
        kind = Verdict.GHOST
    else:
        kind = Verdict.INADMISSIBLE
    margin = float(np.min(np.abs(gap)))
    return AdmissibilityVerdict(kind, tuple(X), margin, standard_ok, ghost_ok)


def is_admissible(net: RegulatoryNetwork, code, conv: Heaviside = Heaviside.STANDARD) -> AdmissibilityVerdict:
    """Decide whether the periodic part of ``code`` is realised by an orbit.

    Points closer than ``1e-12`` to a threshold are treated as touching it.
    When the code is realised only with the opposite boundary convention the
    verdict is ``Ghost``.
    """
    period = _as_period(code)
    points = periodic_orbit_from_code(net, period)
    return admissibility_from_points(net, points, period, conv)


# -- cycle detection -------------------------------------------------------------


@dataclass(frozen=True)
class CycleHit:
    """A certified periodic regime found along a trajectory.

    ``words`` is the period aligned with ``orbit`` (``orbit[0]`` is where the
    trajectory was at step ``step``); ``start`` is the first step from which
    the symbol stream is periodic.
    """

    words: tuple
    orbit: tuple
    verdict: AdmissibilityVerdict
    step: int
    start: int


def _packing_dtype(n_edges: int):
    for dt in (np.uint8, np.uint16, np.uint32, np.uint64):
        if n_edges <= np.iinfo(dt).bits:
            return dt
    raise ValueError("too many edges to pack symbol words")


def _unpack(values, n_edges: int) -> tuple:
    return tuple(tuple((int(v) >> e) & 1 for e in range(n_edges)) for v in values)


def _certify(net, words, x, conv):
    orbit = periodic_orbit_from_code(net, words)
    verdict = admissibility_from_points(net, orbit, words, conv)
    if not verdict.is_admissible:
        return None
    dist = float(np.max(np.abs(x - orbit[0])))
    if dist < verdict.margin or dist <= BOUNDARY_BAND:
        return orbit, verdict
    return None


def trace_cycles(
    net: RegulatoryNetwork,
    x0,
    max_steps: int,
    conv: Heaviside = Heaviside.STANDARD,
    check_every: int = 32,
    max_attempts: int = 6,
    keep_history: bool = False,
):
    """Iterate a batch of initial states until each one is certified periodic.

    Parameters
    ----------
    x0 : array_like, shape (M, N)
    max_steps : int
        Step budget.  Candidate periods are capped at ``max_steps // 4`` and
        a candidate needs two full repetitions in the symbol stream.

    Returns
    -------
    hits : list of CycleHit or None
        ``None`` marks trajectories left undecided.
    history : ndarray or None
        Packed symbol stream per trajectory (only with ``keep_history``).
    """
    if max_steps < 1:
        raise ValueError("max_steps must be positive")
    conv = Heaviside.parse(conv)
    X = np.array(x0, dtype=float, copy=True).reshape(-1, net.n_genes)
    M, E = X.shape[0], net.n_edges
    dtype = _packing_dtype(E)
    bitw = (np.ones(E, dtype=np.uint64) << np.arange(E, dtype=np.uint64)).astype(dtype)
    H = np.zeros((M, max_steps), dtype=dtype)
    idx = np.arange(M)
    hits = [None] * M
    pcap = max(1, max_steps // 4)
    full = H if keep_history else None
    for n in range(1, max_steps + 1):
        theta = net.symbols(X, conv)
        H[:, n - 1] = (theta.astype(dtype) * bitw).sum(axis=1, dtype=dtype)
        X = net.apply_symbols(X, theta)
        if n % check_every and n != max_steps:
            continue
        pmax = min(n // 2, pcap)
        if pmax < 1:
            continue
        Ps = np.arange(1, pmax + 1)
        cand = np.ones((X.shape[0], pmax), dtype=bool)
        for j in range(min(8, pmax)):
            eq = H[:, n - 1 - j][:, None] == H[:, np.maximum(n - 1 - j - Ps, 0)]
            cand &= eq | (j >= Ps)[None, :]
        done = []
        for r in np.flatnonzero(cand.any(axis=1)):
            if hits[idx[r]] is not None:
                continue
            row = H[r]
            attempts = 0
            for P in Ps[cand[r]]:
                P = int(P)
                if not np.array_equal(row[n - P : n], row[n - 2 * P : n - P]):
                    continue
                words = _unpack(row[n - P : n], E)
                cert = _certify(net, words, X[r], conv)
                if cert is not None:
                    start = n - 2 * P
                    while start > 0 and row[start - 1] == row[start - 1 + P]:
                        start -= 1
                    hits[idx[r]] = CycleHit(words, tuple(cert[0]), cert[1], n, start)
                    done.append(r)
                    break
                attempts += 1
                if attempts >= max_attempts:
                    break
        if done and not keep_history:
            keep = np.ones(X.shape[0], dtype=bool)
            keep[done] = False
            X, H, idx = X[keep], H[keep], idx[keep]
        if all(h is not None for h in hits):
            break
    return hits, full


def code_of_trajectory(
    net: RegulatoryNetwork,
    x0,
    transient_cap: int = 10_000,
    horizon: int = 20_000,
    conv: Heaviside = Heaviside.STANDARD,
) -> Code:
    """Code of the orbit of ``x0``, with its transient.

    Raises
    ------
    UndecidedError
        If no certified period shows up within ``horizon`` steps or the
        transient is longer than ``transient_cap``.
    """
    if transient_cap < 0 or horizon < 1:
        raise ValueError("caps must be positive")
    hits, history = trace_cycles(net, np.atleast_2d(x0), horizon, conv, check_every=8, keep_history=True)
    hit = hits[0]

    def stream(n):
        return [word_to_str(w) for w in _unpack(history[0][:n], net.n_edges)]

    if hit is None:
        raise UndecidedError(f"no certified period within {horizon} steps", stream(horizon))
    P = len(hit.words)
    row = history[0]
    transient = _unpack(row[: hit.start], net.n_edges)
    period = _unpack(row[hit.start : hit.start + P], net.n_edges)
    if len(transient) > transient_cap:
        raise UndecidedError(
            f"transient of length {len(transient)} exceeds the cap {transient_cap}", stream(hit.step)
        )
    return Code.make(period, transient)
