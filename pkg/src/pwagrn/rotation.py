"""Rotation numbers of the self-inhibitor.

For ``a > 0`` the self-inhibitor is conjugate to a contracting rotation of
the circle.  Its rotation number ``nu(a, T)`` is a nonincreasing Devil's
staircase in ``T``: every rational ``p/q`` owns a plateau
``[Tbar(a, p/q), Tbar(a, p/q - 0)]`` with::

    Tbar(a, nu) = 1 - (1 - a)^2 / a * sum_{k >= 0} a^k floor(nu (k + 1))

and the left limit obtained by replacing ``floor(y)`` with ``ceil(y) - 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import AnalyticDomainError
from .farey import stern_brocot_search

DEFAULT_QMAX = 4096
DEFAULT_EPS = 1e-12
MAX_TERMS = 1_000_000

RIGHT = "right"
LEFT_LIMIT = "left_limit"


def as_fraction(nu) -> Fraction:
    """Exact rational from an int, Fraction, ``"p/q"`` string or float."""
    if isinstance(nu, Fraction):
        return nu
    if isinstance(nu, str):
        return Fraction(nu.strip())
    return Fraction(nu)


def _check_a(a: float) -> None:
    if not (0.0 < a < 1.0):
        raise AnalyticDomainError(f"formula requires a in (0, 1), got {a!r}")


def _floor_terms(nu: Fraction, m: np.ndarray, left: bool) -> np.ndarray:
    """``floor(nu m)`` (or ``ceil(nu m) - 1``) in exact integer arithmetic."""
    p, q = nu.numerator, nu.denominator
    prod = p * m
    if left:
        return -((-prod) // q) - 1
    return prod // q


def periodic_series(a: float, nu: Fraction, left: bool, eps: float = DEFAULT_EPS) -> float:
    """``sum_{m >= 1} a^(m-1) f(m)`` with ``f(m) = floor(nu m)`` or its left-limit variant.

    Since ``f(m + q) = f(m) + p`` the series is summed exactly over one period
    when ``q`` is moderate; otherwise it is truncated once ``a^K < eps``.
    """
    p, q = nu.numerator, nu.denominator
    K = max(1, math.ceil(math.log(eps) / math.log(a)))
    if q <= max(K, 100_000):
        m = np.arange(1, q + 1, dtype=np.int64)
        f = _floor_terms(nu, m, left).astype(float)
        aq = a**q
        head = float(np.dot(a ** (m - 1.0), f))
        return head / (1.0 - aq) + p * aq / ((1.0 - a) * (1.0 - aq))
    if K > MAX_TERMS:
        raise AnalyticDomainError(f"a={a!r} too close to 1 for series truncation")
    m = np.arange(1, K + 1, dtype=object)
    f = np.array([int(v) for v in _floor_terms(nu, m, left)], dtype=float)
    return float(np.dot(a ** (np.arange(K, dtype=float)), f))


def tbar(a: float, nu, side: str = RIGHT, eps: float = DEFAULT_EPS) -> float:
    """Threshold boundary ``Tbar(a, nu)`` or its left limit ``Tbar(a, nu - 0)``.

    Examples
    --------
    >>> round(tbar(0.5, Fraction(1, 2)), 12)
    0.333333333333
    """
    _check_a(a)
    nu = as_fraction(nu)
    if not (0 < nu < 1):
        raise AnalyticDomainError(f"nu must lie in (0, 1), got {nu}")
    if side not in (RIGHT, LEFT_LIMIT):
        raise ValueError(f"unknown side {side!r}")
    s = periodic_series(a, nu, side == LEFT_LIMIT, eps)
    return 1.0 - (1.0 - a) ** 2 / a * s


def plateau_interval(a: float, nu) -> tuple[float, float]:
    """Closed threshold interval on which the rotation number equals ``nu``."""
    return tbar(a, nu, RIGHT), tbar(a, nu, LEFT_LIMIT)


@dataclass(frozen=True)
class RotationResult:
    """Rotation number: an exact rational with its plateau, or a bracket.

    ``boundary`` flags thresholds at the right end of a plateau, where the
    periodic orbit exists only as a ghost.
    """

    kind: str  # "rational" or "bracket"
    nu: Optional[Fraction] = None
    plateau: Optional[tuple] = None
    boundary: bool = False
    bracket: Optional[tuple] = None

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    @property
    def value(self) -> float:
        if self.is_rational:
            return float(self.nu)
        lo, hi = self.bracket
        return 0.5 * (float(lo) + float(hi))

    @property
    def lower(self) -> Fraction:
        return self.nu if self.is_rational else self.bracket[0]

    @property
    def upper(self) -> Fraction:
        return self.nu if self.is_rational else self.bracket[1]

    def label(self) -> str:
        if self.is_rational:
            return "boundary" if self.boundary else "rational"
        return "bracket"


def rotation_number(
    a: float, T: float, q_max: int = DEFAULT_QMAX, eps: float = DEFAULT_EPS
) -> RotationResult:
    if not (0.0 <= a < 1.0):
        raise ValueError(f"a must lie in [0, 1), got {a!r}")
    if not (0.0 < T < 1.0):
        raise ValueError(f"T must lie in (0, 1), got {T!r}")
    if a == 0.0:
        return RotationResult("rational", Fraction(1, 2), (0.0, 1.0), False)

    def classify(m: Fraction) -> int:
        # Tbar decreases with nu: a threshold below the plateau means a larger nu
        if T < tbar(a, m, RIGHT, eps):
            return 1
        if T > tbar(a, m, LEFT_LIMIT, eps):
            return -1
        return 0

    found = stern_brocot_search(classify, q_max)
    if found[0] == "hit":
        nu = found[1]
        lo, hi = plateau_interval(a, nu)
        return RotationResult("rational", nu, (lo, hi), abs(T - hi) <= eps)
    return RotationResult("bracket", bracket=(found[1], found[2]))


def empirical_rotation(a: float, T: float, steps: int, transient: int = 2000) -> float:
    """Fraction of iterations in the upper atom ``x > T`` after a transient."""
    if steps < 1:
        raise ValueError("steps must be positive")
    b = 1.0 - a
    x = T + b / 2.0
    for _ in range(transient):
        x = a * x + (b if x <= T else 0.0)
    count = 0
    for _ in range(steps):
        if x > T:
            count += 1
            x = a * x
        else:
            x = a * x + b
    return count / steps


def staircase(
    a: float,
    t_lo: float,
    t_hi: float,
    samples: int,
    q_max: int = DEFAULT_QMAX,
    eps: float = DEFAULT_EPS,
) -> list:
    """Rotation numbers on a uniform threshold grid from ``t_lo`` to ``t_hi``."""
    if not (0.0 < t_lo < t_hi < 1.0):
        raise ValueError("need 0 < t_lo < t_hi < 1")
    if samples < 2:
        raise ValueError("need at least two samples")
    grid = np.linspace(t_lo, t_hi, samples)
    return [(float(t), rotation_number(a, float(t), q_max, eps)) for t in grid]
