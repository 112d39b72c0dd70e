"""Regular orbits of the negative 2-circuit.

A regular code is generated by the rotation ``z -> z + nu (mod 1)`` on a
circle cut into four arcs, one per atom, visited in the order
``10, 00, 01, 11``.  The arcs have lengths ``A = n_A nu``, ``B = n_B nu``,
``C = n_C nu`` and ``D = 1 - (n_A + n_B + n_C) nu``, so the orbit spends
exactly ``n_A``, ``n_B``, ``n_C`` steps per winding in the first three atoms
and ``rho = 1/nu - (n_A + n_B + n_C)`` steps on average in the last one.

All rotation numbers are exact fractions.  Floors in the series below are
evaluated in integer arithmetic and the series are summed exactly over one
period of their integer parts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import AnalyticDomainError, AssumptionViolatedError
from .rotation import as_fraction
from .symbolic import Code

VALUE = "value"
LEFT_LIMIT = "left_limit"
RIGHT_LIMIT = "right_limit"


def _check_a(a: float) -> None:
    if not (0.0 < a < 1.0):
        raise AnalyticDomainError(f"formula requires a in (0, 1), got {a!r}")


def _floor(x: Fraction, left: bool) -> int:
    """``floor(x)``, or ``floor(x - 0) = ceil(x) - 1`` for left limits."""
    return math.ceil(x) - 1 if left else math.floor(x)


def _tail_sum(a: float, z: Fraction, nu: Fraction, j0: int, left: bool) -> float:
    """``sum_{j >= j0} a^floor((z + j) / nu)`` (floors shifted for left limits).

    Shifting ``j`` by the numerator ``p`` of ``nu`` raises the exponent by
    the denominator ``q``, so one block of ``p`` terms determines the sum.
    """
    p, q = nu.numerator, nu.denominator
    block = [_floor((z + j) / nu, left) for j in range(j0, j0 + p)]
    base = min(block)
    s = math.fsum(a ** (e - base) for e in block)
    return a**base * s / (1.0 - a**q)


def psi(a: float, nu, side: str = VALUE) -> float:
    """``psi(nu) = sum_{j >= 1} a^floor(j / nu)``; ``side="right_limit"`` gives ``psi(nu + 0)``.

    ``psi(0)`` is taken as the limit ``psi(0 + 0) = 0``.
    """
    _check_a(a)
    nu = as_fraction(nu)
    if nu < 0:
        raise AnalyticDomainError("nu must be nonnegative")
    if nu == 0:
        return 0.0
    if side not in (VALUE, RIGHT_LIMIT):
        raise ValueError(f"unknown side {side!r}")
    return _tail_sum(a, Fraction(0), nu, 1, side == RIGHT_LIMIT)


def phi(a: float, z, n: int, nu, side: str = VALUE) -> float:
    """Orbit profile ``phi(z, n, nu)`` of a regular code, for ``n > 0`` and ``n nu`` in ``(0, 1]``.

    ``z`` is a phase in ``[0, 1)`` (the function is 1-periodic);
    ``side="left_limit"`` returns ``phi(z - 0, n, nu)``.

    Examples
    --------
    >>> round(phi(0.5, 0, 2, Fraction(1, 4)), 12)
    0.8
    """
    _check_a(a)
    nu, z = as_fraction(nu), as_fraction(z)
    if n <= 0 or not (0 < n * nu <= 1):
        raise AnalyticDomainError(f"phi needs n > 0 and n*nu in (0, 1], got n={n}, nu={nu}")
    if side not in (VALUE, LEFT_LIMIT):
        raise ValueError(f"unknown side {side!r}")
    left = side == LEFT_LIMIT
    z = z - math.floor(z)
    if left and z == 0:
        z = Fraction(1)
    coef = a ** (-n) - 1.0
    if z <= n * nu:
        return a ** _floor(z / nu, left) - coef * _tail_sum(a, z, nu, 1, left)
    return 1.0 - coef * _tail_sum(a, z, nu, 0, left)


@dataclass(frozen=True)
class Bound:
    value: float
    strict: bool


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_strict: bool = True
    hi_strict: bool = False

    @property
    def empty(self) -> bool:
        if self.lo < self.hi:
            return False
        return not (self.lo == self.hi and not self.lo_strict and not self.hi_strict)

    def contains(self, t: float) -> bool:
        above = t > self.lo or (t == self.lo and not self.lo_strict)
        below = t < self.hi or (t == self.hi and not self.hi_strict)
        return above and below

    def distance_to_boundary(self, t: float) -> float:
        return min(abs(t - self.lo), abs(t - self.hi))

    def width(self) -> float:
        return self.hi - self.lo


def reduc1_bounds(a: float, n_alpha: int, n_beta: int, n_gamma: int, nu, floor_ngamma: int):
    """Threshold interval on which one component of a regular orbit realises its symbols.

    Returns ``(lower, upper)`` bounds.  The lower bound is the larger of two
    left limits, reached by the orbit for rational ``nu``, hence strict.  Of
    the upper candidates, ``phi((n_alpha - 1) nu)`` is the value of a point
    that must lie strictly above the threshold and the phase
    ``frac(n_alpha_beta_gamma nu)`` value may touch it.
    """
    _check_a(a)
    nu = as_fraction(nu)
    if nu <= 0:
        raise AssumptionViolatedError("nu must be positive")
    if math.floor(n_alpha * nu) != 0 or math.floor(n_beta * nu) != 0:
        raise AssumptionViolatedError("floor(n_alpha nu) and floor(n_beta nu) must vanish")
    if n_alpha < 1 or n_beta < 1:
        raise AssumptionViolatedError("n_alpha and n_beta must be positive")
    if math.floor(n_gamma * nu) != floor_ngamma:
        raise AssumptionViolatedError(
            f"floor(n_gamma nu) = {math.floor(n_gamma * nu)}, expected {floor_ngamma}"
        )
    n_ab = n_alpha + n_beta
    if not (n_ab * nu < 1):
        raise AssumptionViolatedError("n_alpha + n_beta steps must fit in one winding")
    n_abg = n_ab + n_gamma
    z_g = n_abg * nu - math.floor(n_abg * nu)
    lower = max(
        phi(a, (n_alpha + 1) * nu, n_ab, nu, LEFT_LIMIT),
        phi(a, z_g, n_ab, nu, LEFT_LIMIT),
    )
    up_step = phi(a, (n_alpha - 1) * nu, n_ab, nu)
    up_phase = phi(a, z_g, n_ab, nu)
    if up_step < up_phase:
        upper = Bound(up_step, True)
    elif up_phase < up_step:
        upper = Bound(up_phase, False)
    else:
        upper = Bound(up_step, True)
    return Bound(lower, True), upper


@dataclass(frozen=True)
class RegularCodeSpec:
    n_a: int
    n_b: int
    n_c: int
    nu: Fraction

    def __post_init__(self):
        object.__setattr__(self, "nu", as_fraction(self.nu))
        validate_spec(self.n_a, self.n_b, self.n_c, self.nu)

    @property
    def n_d(self) -> int:
        return -(self.n_a + self.n_b + self.n_c)

    @property
    def n_abc(self) -> int:
        return self.n_a + self.n_b + self.n_c

    @property
    def arcs(self) -> tuple:
        nu = self.nu
        return (self.n_a * nu, self.n_b * nu, self.n_c * nu, 1 - self.n_abc * nu)

    @property
    def rho(self) -> Fraction:
        return 1 / self.nu - self.n_abc


def nu_upper(n_a: int, n_b: int, n_c: int) -> Fraction:
    """Largest rotation number of the family: ``1 / (n_A + n_B + n_C + 1)``."""
    return Fraction(1, n_a + n_b + n_c + 1)


def validate_spec(n_a: int, n_b: int, n_c: int, nu) -> Fraction:
    nu = as_fraction(nu)
    if min(n_a, n_b, n_c) < 1:
        raise AssumptionViolatedError("n_A, n_B, n_C must be positive integers")
    if not (0 < nu <= nu_upper(n_a, n_b, n_c)):
        raise AssumptionViolatedError(
            f"nu={nu} outside (0, {nu_upper(n_a, n_b, n_c)}] for ({n_a},{n_b},{n_c})"
        )
    return nu


@dataclass(frozen=True)
class DomainRect:
    """Product ``I1 x I2`` of threshold intervals on which a regular code is admissible."""

    i1: Interval
    i2: Interval
    spec: tuple  # (n_A, n_B, n_C, nu)

    def contains(self, t1: float, t2: float) -> bool:
        return self.i1.contains(t1) and self.i2.contains(t2)

    def boundary_distance(self, t1: float, t2: float) -> float:
        return min(self.i1.distance_to_boundary(t1), self.i2.distance_to_boundary(t2))


def admissibility_rect(a: float, n_a: int, n_b: int, n_c: int, nu) -> Optional[DomainRect]:
    """Existence rectangle of the regular code ``(n_A, n_B, n_C, nu)``, or ``None`` when empty."""
    nu = validate_spec(n_a, n_b, n_c, nu)
    lo1, hi1 = reduc1_bounds(a, n_a, n_b, n_c, nu, 0)
    lo2, hi2 = reduc1_bounds(a, n_b, n_c, -(n_a + n_b + n_c), nu, -1)
    i1 = Interval(lo1.value, hi1.value, lo1.strict, hi1.strict)
    i2 = Interval(lo2.value, hi2.value, lo2.strict, hi2.strict)
    if i1.empty or i2.empty:
        return None
    return DomainRect(i1, i2, (n_a, n_b, n_c, nu))


def regular_code_words(n_a: int, n_b: int, n_c: int, nu) -> tuple:
    """Period word for ``t = 0 .. q-1`` (starting in atom 10), not rotated."""
    nu = validate_spec(n_a, n_b, n_c, nu)
    A = n_a * nu
    AB = (n_a + n_b) * nu
    ABC = (n_a + n_b + n_c) * nu
    words = []
    for t in range(nu.denominator):
        s = nu * t
        th1 = 1 + math.floor(s - ABC) - math.floor(s - A)
        th2 = 1 + math.floor(s - AB) - math.floor(s)
        words.append((th1, th2))
    return tuple(words)


def regular_code(n_a: int, n_b: int, n_c: int, nu) -> Code:
    return Code.make(regular_code_words(n_a, n_b, n_c, nu))


def rho_nu_convert(n_a: int, n_b: int, n_c: int, value, direction: str = "nu_to_rho") -> Fraction:
    """Convert between ``nu`` and ``rho = 1/nu - (n_A + n_B + n_C)``."""
    value = as_fraction(value)
    n = n_a + n_b + n_c
    if direction == "nu_to_rho":
        validate_spec(n_a, n_b, n_c, value)
        return 1 / value - n
    if direction == "rho_to_nu":
        if value < 1:
            raise AssumptionViolatedError(f"rho must be at least 1, got {value}")
        return 1 / (value + n)
    raise ValueError(f"unknown direction {direction!r}")


def family_conditions(a: float, n_a: int, n_b: int, n_c: int, nu1, nu2) -> tuple:
    """The five existence conditions for the family ``nu in (nu1, nu2]``."""
    _check_a(a)
    nu1, nu2 = as_fraction(nu1), as_fraction(nu2)
    if not (0 <= nu1 < nu2 <= nu_upper(n_a, n_b, n_c)):
        raise AnalyticDomainError(
            f"need 0 <= nu1 < nu2 <= {nu_upper(n_a, n_b, n_c)}, got ({nu1}, {nu2}]"
        )
    n_ab, n_bc, n_abc = n_a + n_b, n_b + n_c, n_a + n_b + n_c
    p2 = psi(a, nu2)
    p1 = psi(a, nu1, RIGHT_LIMIT)
    c1 = (a**-n_ab - 1) * (1 + a) * p2 <= 1 and (a**-n_bc - 1) * (1 + a) * p2 <= 1
    c2 = 0 <= 1 - a**n_a - a**n_c * (1 - a**n_ab) + a**n_c * (1 - a**n_ab) * (a ** (-n_bc + 1) - 1) * p1
    c3 = a**-n_abc * (1 - a**n_bc) * (1 - a ** (n_ab + 1)) * p2 <= 1 - a**n_b
    c4 = (a**-n_ab - 1) * (1 - a ** (n_bc + 1)) * p2 <= 1 - a ** (-n_a + 1) + a**n_bc * (a**-n_ab - 1)
    c5 = 0 <= 1 - a ** (-n_b + 1) + (a**-n_bc - 1) * (a ** (-n_ab + 1) - 1) * p1
    return (bool(c1), bool(c2), bool(c3), bool(c4), bool(c5))


def statereg_closed_form(a: float, p: int) -> bool:
    """Closed condition for the ``(1, 1, p)`` family over ``(0, 1/(p+3)]``."""
    ap = a**p
    return (a**3 + a**2 + a - 1) / (a**4 + a**2) <= ap <= 1 / (1 + a)


# -- critical degradation rates ---------------------------------------------------


def _bisect(f, lo: float, hi: float, tol: float = 1e-15, max_iter: int = 200) -> float:
    flo = f(lo)
    if flo == 0:
        return lo
    if (flo > 0) == (f(hi) > 0):
        raise ValueError("bisection bracket does not change sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def critical_ac() -> float:
    """Real root of ``a^3 + a^2 + a - 1`` (about 0.5437)."""
    return _bisect(lambda a: a**3 + a**2 + a - 1.0, 0.0, 1.0)


def balanced_condition(a: float, p: int) -> bool:
    return a ** (p - 1) / (1 + a ** (2 * p)) > 0.5


def balanced_critical(p: int) -> float:
    """Degradation rate ``a_p`` above which the balanced ``4p``-periodic orbit exists."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    if p == 1:
        return 0.0

    def g(a):
        return 2.0 * a ** (p - 1) - 1.0 - a ** (2 * p)

    # g(1) = 0 and g'(1) = -2, so g is positive just below 1
    hi = 1.0 - 1e-3
    while g(hi) <= 0:
        hi = 1.0 - (1.0 - hi) / 4
    return _bisect(g, 0.5, hi)


def balanced_domain(a: float, p: int) -> Optional[DomainRect]:
    """Existence square of the balanced orbit with ``p`` steps per atom, or ``None``."""
    if p < 1:
        raise ValueError("p must be a positive integer")
    if a == 0.0:
        if p == 1:
            full = Interval(0.0, 1.0, True, True)
            return DomainRect(full, full, (1, 1, 1, Fraction(1, 4)))
        return None
    _check_a(a)
    if not balanced_condition(a, p):
        return None
    return admissibility_rect(a, p, p, p, Fraction(1, 4 * p))


def statereg2_conditions(a: float, n_a: int, n_c: int) -> bool:
    den = 1 - a ** (n_a + 1)
    return (a - a**n_a) / den <= a**n_c <= (1 - a**n_a) / den


def statereg2_a_bounds(n_a: int, n_c: int, grid: int = 4000, tol: float = 1e-10):
    """Interval ``[a_lower, a_upper]`` of degradation rates for the ``(n_A, 1, n_C)`` families.

    Found by a grid scan followed by bisection of each endpoint.  Returns
    ``None`` when no rate in ``(0, 1)`` qualifies.
    """
    if n_a < 1 or n_c < 1:
        raise ValueError("n_A and n_C must be positive")
    xs = np.linspace(0.0, 1.0, grid + 1)[1:-1]
    ok = np.array([statereg2_conditions(float(x), n_a, n_c) for x in xs])
    if not ok.any():
        return None
    first, last = int(np.argmax(ok)), int(len(ok) - 1 - np.argmax(ok[::-1]))

    def refine(bad, good):
        while abs(good - bad) > tol:
            mid = 0.5 * (bad + good)
            if statereg2_conditions(mid, n_a, n_c):
                good = mid
            else:
                bad = mid
        return good

    if n_a == 1 or n_c == 1:
        lower = 0.0
    else:
        lower = refine(float(xs[first - 1]) if first > 0 else 0.0, float(xs[first]))
    upper = refine(float(xs[last + 1]) if last + 1 < len(xs) else 1.0, float(xs[last]))
    return lower, upper
