"""Brute-force exploration: cycle detection, basin maps and threshold-plane domain maps.

Rasters are evaluated at cell centres.  Work is split into contiguous
chunks of cells which may run in worker processes; results are merged in
cell order and labels are numbered by first appearance, so the output does
not depend on the number of workers.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .errors import UndecidedError
from .farey import stern_brocot_search
from .negcircuit import Interval, nu_upper, reduc1_bounds
from .network import Heaviside, RegulatoryNetwork
from .rotation import plateau_interval
from .symbolic import AdmissibilityVerdict, Code, trace_cycles, word_to_str

UNDECIDED = 0
DEFAULT_MAX_STEPS = 20_000
CHUNK = 512


@dataclass(frozen=True)
class PeriodicOrbit:
    points: tuple
    code: Code
    margin: float
    verdict: AdmissibilityVerdict
    steps: int

    @property
    def period(self) -> int:
        return len(self.points)

    @property
    def basin_cube_radius(self) -> float:
        """Half-width of a max-norm cube around each point that stays in the basin."""
        return self.margin


def _orbit_from_hit(hit) -> PeriodicOrbit:
    return PeriodicOrbit(hit.orbit, Code.make(hit.words), hit.verdict.margin, hit.verdict, hit.step)


def detect_cycle(
    net: RegulatoryNetwork,
    x0,
    max_steps: int = DEFAULT_MAX_STEPS,
    conv: Heaviside = Heaviside.STANDARD,
) -> PeriodicOrbit:
    """Periodic orbit attracting ``x0``.

    ``points[0]`` is the orbit point the trajectory was shadowing when the
    period was certified.

    Raises
    ------
    UndecidedError
        If no period is certified within ``max_steps``.
    """
    hits, history = trace_cycles(net, np.atleast_2d(x0), max_steps, conv, check_every=16, keep_history=True)
    if hits[0] is None:
        stream = [word_to_str(tuple((int(v) >> e) & 1 for e in range(net.n_edges))) for v in history[0]]
        raise UndecidedError(f"no certified period within {max_steps} steps", stream)
    return _orbit_from_hit(hits[0])


# -- rasters --------------------------------------------------------------------------


@dataclass(frozen=True)
class LegendEntry:
    label: int
    description: str
    period: int
    code: str


@dataclass(frozen=True)
class RasterGrid:
    """Integer labels on a cell grid.

    ``labels[j, i]`` belongs to the cell centred at
    ``(x0 + (i + 1/2) dx, y0 + (j + 1/2) dy)``; row 0 is the bottom row.
    Label 0 marks cells without an attractor/domain found.
    """

    region: tuple
    resolution: tuple
    labels: np.ndarray
    legend: tuple

    def centers(self):
        return cell_centers(self.region, self.resolution)

    def entry(self, label: int) -> Optional[LegendEntry]:
        for e in self.legend:
            if e.label == label:
                return e
        return None


def cell_centers(region, resolution):
    x0, x1, y0, y1 = region
    nx, ny = resolution
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    return xs, ys


def _check_grid(region, resolution):
    x0, x1, y0, y1 = region
    nx, ny = resolution
    if not (x1 > x0 and y1 > y0):
        raise ValueError("region must satisfy x0 < x1 and y0 < y1")
    if nx < 1 or ny < 1:
        raise ValueError("resolution must be positive")


def _resolve_workers(workers: Optional[int]) -> int:
    if workers is None:
        workers = int(os.environ.get("PWAGRN_WORKERS", "1") or 1)
    return max(1, int(workers))


def _map_chunks(func, chunks, workers):
    if workers <= 1 or len(chunks) <= 1:
        return [func(c) for c in chunks]
    with ProcessPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
        return list(pool.map(func, chunks))


@dataclass(frozen=True)
class _BasinJob:
    net: RegulatoryNetwork
    points: np.ndarray
    max_steps: int
    conv: Heaviside


def _run_basin_job(job: _BasinJob):
    hits, _ = trace_cycles(job.net, job.points, job.max_steps, job.conv)
    return [None if h is None else Code.make(h.words).period for h in hits]


def _assign_labels(keys, shape):
    labels = np.zeros(len(keys), dtype=np.int32)
    seen = {}
    for k, key in enumerate(keys):
        if key is None:
            continue
        if key not in seen:
            seen[key] = len(seen) + 1
        labels[k] = seen[key]
    return labels.reshape(shape), seen


def basin_raster(
    net: RegulatoryNetwork,
    region: Sequence[float],
    resolution: Sequence[int],
    max_steps: int = DEFAULT_MAX_STEPS,
    conv: Heaviside = Heaviside.STANDARD,
    workers: Optional[int] = None,
) -> RasterGrid:
    """Label every cell centre of a 2-D phase-space region by the code of its attractor."""
    if net.n_genes != 2:
        raise ValueError("basin rasters need a 2-gene network")
    _check_grid(region, resolution)
    xs, ys = cell_centers(region, resolution)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    jobs = [
        _BasinJob(net, pts[s : s + CHUNK], max_steps, Heaviside.parse(conv))
        for s in range(0, len(pts), CHUNK)
    ]
    keys = [k for part in _map_chunks(_run_basin_job, jobs, _resolve_workers(workers)) for k in part]
    labels, seen = _assign_labels(keys, (len(ys), len(xs)))
    legend = []
    for period, lab in seen.items():
        code = Code(tuple(), period)
        legend.append(LegendEntry(lab, f"period {len(period)} orbit", len(period), code.text()))
    return RasterGrid(tuple(map(float, region)), tuple(map(int, resolution)), labels, tuple(legend))


def balanced_period_word(p: int) -> tuple:
    """Canonical period of the balanced orbit with ``p`` steps in each atom."""
    word = ((0, 0),) * p + ((0, 1),) * p + ((1, 1),) * p + ((1, 0),) * p
    return Code.make(word).period


# -- positive 2-circuit ---------------------------------------------------------------


def farey_rationals(q_max: int) -> list:
    """Fractions ``p/q`` in ``(0, 1)`` with ``q <= q_max``, increasing."""
    out = set()
    for q in range(2, q_max + 1):
        for p in range(1, q):
            if math.gcd(p, q) == 1:
                out.add(Fraction(p, q))
    return sorted(out)


def positive2_diagonal_domains(a: float, q_max: int = 12) -> list:
    """Threshold squares ``[Tbar(a, nu), Tbar(a, nu - 0)]^2`` hosting diagonal orbits.

    Sorted by decreasing ``nu``, hence by increasing thresholds.
    """
    return [(nu, plateau_interval(a, nu)) for nu in reversed(farey_rationals(q_max))]


# -- threshold-plane domains of the negative 2-circuit ---------------------------------


def sigma_r_thresholds(t1: float, t2: float, k: int = 1) -> tuple:
    """Apply the rotation symmetry ``k`` times (``k`` may be negative) to a threshold pair."""
    for _ in range(k % 4):
        t1, t2 = 1.0 - t2, t1
    return t1, t2


def _interval(lo, hi) -> Interval:
    return Interval(lo.value, hi.value, lo.strict, hi.strict)


@lru_cache(maxsize=None)
def _family_hit(a: float, family: tuple, t2: float, q_max: int):
    """Rotation number of the family whose second interval holds ``t2``, with its intervals."""
    n_a, n_b, n_c = family
    n_d = -(n_a + n_b + n_c)

    def i2(m):
        return _interval(*reduc1_bounds(a, n_b, n_c, n_d, m, -1))

    def classify(m: Fraction) -> int:
        iv = i2(m)
        if iv.empty:
            # no threshold works at m; follow the monotone trend of the interval centre
            return -1 if t2 > 0.5 * (iv.lo + iv.hi) else 1
        if iv.contains(t2):
            return 0
        # the second interval moves down as nu grows
        return -1 if t2 >= iv.hi else 1

    top = nu_upper(n_a, n_b, n_c)
    # the search only visits fractions strictly inside its bounds, so try rho = 1 first
    found = ("hit", top) if classify(top) == 0 else stern_brocot_search(classify, q_max, Fraction(0, 1), top)
    if found[0] != "hit":
        return None
    nu = found[1]
    i1 = _interval(*reduc1_bounds(a, n_a, n_b, n_c, nu, 0))
    if i1.empty:
        return None
    return nu, i1, i2(nu)


def domain_lookup(a: float, t1: float, t2: float, families, q_max: int = 256, images: bool = True):
    """First ``(family, k, nu)`` whose rectangle, mapped ``k`` times by the rotation symmetry, holds ``(t1, t2)``."""
    ks = range(4) if images else (0,)
    for family in families:
        family = tuple(int(n) for n in family)
        for k in ks:
            s1, s2 = sigma_r_thresholds(t1, t2, -k)
            hit = _family_hit(float(a), family, float(s2), int(q_max))
            if hit is not None and hit[1].contains(s1):
                return family, k, hit[0]
    return None


@dataclass(frozen=True)
class _DomainJob:
    a: float
    points: np.ndarray
    families: tuple
    q_max: int
    images: bool


def _run_domain_job(job: _DomainJob):
    return [domain_lookup(job.a, float(p[0]), float(p[1]), job.families, job.q_max, job.images) for p in job.points]


def domain_raster(
    a: float,
    region: Sequence[float],
    resolution: Sequence[int],
    families: Sequence[tuple],
    q_max: int = 256,
    images: bool = True,
    workers: Optional[int] = None,
) -> RasterGrid:
    """Label threshold-plane cells by the regular orbit family (and rotation number) that exists there."""
    if not (0.0 < a < 1.0):
        raise ValueError("domain rasters need a in (0, 1)")
    _check_grid(region, resolution)
    xs, ys = cell_centers(region, resolution)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    fams = tuple(tuple(int(n) for n in f) for f in families)
    jobs = [_DomainJob(float(a), pts[s : s + CHUNK], fams, int(q_max), images) for s in range(0, len(pts), CHUNK)]
    keys = [k for part in _map_chunks(_run_domain_job, jobs, _resolve_workers(workers)) for k in part]
    labels, seen = _assign_labels(keys, (len(ys), len(xs)))
    legend = []
    for (family, k, nu), lab in seen.items():
        rho = 1 / nu - sum(family)
        n_a, n_b, n_c = family
        code = Code(tuple(), Code.make(_rotated_regular_words(n_a, n_b, n_c, nu, k)).period)
        legend.append(
            LegendEntry(
                lab,
                f"n=({n_a},{n_b},{n_c}) nu={nu} rho={rho} image={k}",
                len(code.period),
                code.text(),
            )
        )
    return RasterGrid(tuple(map(float, region)), tuple(map(int, resolution)), labels, tuple(legend))


def sigma_r_word(word: tuple) -> tuple:
    """Atom label of the image of an atom under the rotation symmetry.

    The symmetry advances the atom cycle ``10 -> 00 -> 01 -> 11 -> 10`` by one.
    """
    cycle = [(1, 0), (0, 0), (0, 1), (1, 1)]
    return cycle[(cycle.index(tuple(word)) + 1) % 4]


def _rotated_regular_words(n_a, n_b, n_c, nu, k):
    from .negcircuit import regular_code_words

    words = regular_code_words(n_a, n_b, n_c, nu)
    for _ in range(k % 4):
        words = tuple(sigma_r_word(w) for w in words)
    return words
