"""Analytic core of the negative 2-circuit against direct sums and simulation."""
from fractions import Fraction
import math

import numpy as np
import pytest

from pwagrn.errors import AnalyticDomainError, AssumptionViolatedError
from pwagrn.explorer import sigma_r_thresholds, sigma_r_word
from pwagrn.negcircuit import (
    LEFT_LIMIT,
    RIGHT_LIMIT,
    admissibility_rect,
    balanced_condition,
    balanced_critical,
    balanced_domain,
    critical_ac,
    family_conditions,
    nu_upper,
    phi,
    psi,
    reduc1_bounds,
    regular_code,
    regular_code_words,
    rho_nu_convert,
    statereg2_a_bounds,
    statereg_closed_form,
)
from pwagrn.network import negative_2circuit
from pwagrn.symbolic import Verdict, is_admissible


def psi_direct(a, nu, right=False, terms=3000):
    total = 0.0
    for j in range(1, terms):
        y = Fraction(j) / nu
        e = math.ceil(y) - 1 if right else math.floor(y)
        # psi(nu + 0) uses floor(j/(nu+0)) = ceil(j/nu) - 1
        total += a**e
    return total


def phi_direct(a, z, n, nu, left=False, terms=3000):
    def fl(y):
        return math.ceil(y) - 1 if left else math.floor(y)

    z = Fraction(z)
    if left and z == 0:
        z = Fraction(1)
    coef = a ** (-n) - 1
    if z <= n * nu:
        return a ** fl(z / nu) - coef * sum(a ** fl((z + j) / nu) for j in range(1, terms))
    return 1 - coef * sum(a ** fl((z + j) / nu) for j in range(0, terms))


# -- psi and phi ----------------------------------------------------------------------


def test_psi_examples():
    assert psi(0.5, Fraction(1, 4)) == pytest.approx(1 / 15, abs=1e-14)
    assert psi(0.5, Fraction(1, 4), RIGHT_LIMIT) == pytest.approx(2 / 15, abs=1e-14)
    for n in range(1, 6):
        a = 0.63
        assert psi(a, Fraction(1, n + 2)) == pytest.approx(a ** (n + 2) / (1 - a ** (n + 2)), abs=1e-13)


def test_phi_examples():
    nu = Fraction(1, 4)
    assert phi(0.5, 0, 2, nu) == pytest.approx(0.8, abs=1e-14)
    assert phi(0.5, Fraction(3, 4), 2, nu) == pytest.approx(0.6, abs=1e-14)
    assert phi(0.5, Fraction(1, 2), 2, nu, LEFT_LIMIT) == pytest.approx(0.4, abs=1e-14)


def test_psi_phi_match_direct_sums(rng):
    for _ in range(60):
        a = float(rng.uniform(0.2, 0.9))
        q = int(rng.integers(3, 30))
        p = int(rng.integers(1, q))
        nu = Fraction(p, q)
        assert psi(a, nu) == pytest.approx(psi_direct(a, nu), rel=1e-11, abs=1e-12)
        assert psi(a, nu, RIGHT_LIMIT) == pytest.approx(psi_direct(a, nu, True), rel=1e-11, abs=1e-12)
        n = int(rng.integers(1, max(2, q // p + 1)))
        if n * nu > 1:
            continue
        z = Fraction(int(rng.integers(0, q)), q)
        for left in (False, True):
            side = LEFT_LIMIT if left else "value"
            assert phi(a, z, n, nu, side) == pytest.approx(phi_direct(a, z, n, nu, left), abs=1e-10)


def test_psi_monotone_and_jumps():
    from pwagrn.explorer import farey_rationals

    rats = [r for r in farey_rationals(14)][:60]
    assert len(rats) >= 50
    for a in (0.3, 0.75):
        vals = [psi(a, r) for r in rats]
        assert all(u < v for u, v in zip(vals, vals[1:]))
        for r in rats:
            assert psi(a, r) < psi(a, r, RIGHT_LIMIT)
        # right limits stay below the next value
        for r, s in zip(rats, rats[1:]):
            assert psi(a, r, RIGHT_LIMIT) <= psi(a, s) + 1e-15


@pytest.mark.parametrize("n_ab", [2, 3, 5])
def test_phi_descends_along_first_branch(n_ab):
    for a in (0.3, 0.6, 0.9):
        for q in range(n_ab + 2, n_ab + 12):
            nu = Fraction(1, q)
            for n_alpha in range(1, n_ab):
                for p in range(n_alpha):
                    assert phi(a, (p + 1) * nu, n_ab, nu) < phi(a, p * nu, n_ab, nu)


def test_domain_errors():
    with pytest.raises(AnalyticDomainError):
        psi(0.0, Fraction(1, 3))
    with pytest.raises(AnalyticDomainError):
        phi(0.5, 0, 5, Fraction(1, 3))
    with pytest.raises(AssumptionViolatedError):
        admissibility_rect(0.5, 1, 1, 1, Fraction(1, 3))
    with pytest.raises(AssumptionViolatedError):
        reduc1_bounds(0.5, 3, 1, 1, Fraction(1, 2), 0)


# -- regular codes ------------------------------------------------------------------------


def test_regular_code_visits_all_atoms_in_order():
    order = [(1, 0), (0, 0), (0, 1), (1, 1)]
    for fam in [(1, 1, 1), (2, 1, 3), (1, 2, 2)]:
        for q in range(sum(fam) + 1, sum(fam) + 6):
            nu = Fraction(1, q)
            w = regular_code_words(*fam, nu)
            assert set(w) == set(order)
            runs = [w[0]] + [b for a_, b in zip(w, w[1:]) if a_ != b]
            for u, v in zip(runs, runs[1:]):
                assert order.index(v) == (order.index(u) + 1) % 4
            counts = [w.count(x) for x in order]
            assert counts[:3] == list(fam)
            assert counts[3] == q - sum(fam)


@pytest.mark.parametrize("fam, nu, rho", [((1, 1, 1), Fraction(1, 4), 1), ((1, 1, 4), Fraction(1, 7), 1), ((1, 1, 2), Fraction(2, 11), Fraction(3, 2))])
def test_rho_nu(fam, nu, rho):
    assert rho_nu_convert(*fam, nu) == rho
    assert rho_nu_convert(*fam, rho, "rho_to_nu") == nu


# -- rectangles ------------------------------------------------------------------------


def test_balanced_rect_example():
    r = admissibility_rect(0.5, 1, 1, 1, Fraction(1, 4))
    assert r.i1.lo == pytest.approx(0.4) and r.i1.hi == pytest.approx(0.6)
    assert r.i2.lo == pytest.approx(0.4) and r.i2.hi == pytest.approx(0.6)
    assert r.i1.lo_strict and not r.i1.hi_strict
    assert admissibility_rect(0.5, 2, 2, 2, Fraction(1, 8)) is None


def test_xi_closed_form(rng):
    """Where the five family conditions hold, I2 is (xi(nu + 0), xi(nu)]."""
    checked = 0
    while checked < 100:
        a = float(rng.uniform(0.3, 0.97))
        fam = tuple(int(v) for v in rng.integers(1, 4, 3))
        n_a, n_b, n_c = fam
        q = int(rng.integers(sum(fam) + 1, sum(fam) + 25))
        nu = Fraction(int(rng.integers(1, 4)), q)
        if not 0 < nu < nu_upper(*fam):
            continue
        if not all(family_conditions(a, *fam, 0, nu_upper(*fam))):
            continue
        lo, hi = reduc1_bounds(a, n_b, n_c, -sum(fam), nu, -1)
        scale = a ** (-n_a) * (a ** -(n_b + n_c) - 1)
        assert hi.value == pytest.approx(1 - scale * psi(a, nu), abs=1e-10)
        assert lo.value == pytest.approx(1 - scale * psi(a, nu, RIGHT_LIMIT), abs=1e-10)
        assert lo.strict and not hi.strict
        checked += 1


def test_i2_ordering(rng):
    for fam in [(1, 1, 1), (1, 1, 3), (2, 1, 2)]:
        for a in (0.6, 0.8, 0.9):
            rats = sorted({Fraction(p, q) for q in range(2, 40) for p in range(1, q)
                           if Fraction(p, q) < nu_upper(*fam)})
            ivs = []
            for nu in rats:
                lo, hi = reduc1_bounds(a, fam[1], fam[2], -sum(fam), nu, -1)
                if lo.value < hi.value:
                    ivs.append((nu, lo.value, hi.value))
            for (nu, lo, hi), (nu2, lo2, hi2) in zip(ivs, ivs[1:]):
                assert nu < nu2 and hi2 <= lo + 1e-12


def _samples(rng, iv, k):
    return [iv.lo + iv.width() * float(u) for u in rng.uniform(0.05, 0.95, k)]


def test_rect_matches_admissibility(rng):
    checked = 0
    while checked < 100:
        fam = tuple(int(v) for v in rng.integers(1, 4, 3))
        q = int(rng.integers(sum(fam) + 1, sum(fam) + 12))
        nu = Fraction(int(rng.integers(1, 3)), q)
        if not 0 < nu <= nu_upper(*fam):
            continue
        a = float(rng.uniform(0.5, 0.97))
        rect = admissibility_rect(a, *fam, nu)
        code = regular_code(*fam, nu)
        if rect is None or min(rect.i1.width(), rect.i2.width()) < 1e-9:
            continue
        for t1, t2 in zip(_samples(rng, rect.i1, 3), _samples(rng, rect.i2, 3)):
            if rect.boundary_distance(t1, t2) < 1e-9:
                continue
            assert is_admissible(negative_2circuit(t1, t2, a), code.period).is_admissible
        # just outside in one coordinate
        for t1, t2 in [(rect.i1.lo - 1e-3, rect.i2.lo + rect.i2.width() / 2),
                       (rect.i1.hi + 1e-3, rect.i2.lo + rect.i2.width() / 2),
                       (rect.i1.lo + rect.i1.width() / 2, rect.i2.hi + 1e-3)]:
            v = is_admissible(negative_2circuit(t1, t2, a), code.period)
            assert v.kind is Verdict.INADMISSIBLE
        checked += 1


def test_rect_symmetry(rng):
    for _ in range(40):
        fam = tuple(int(v) for v in rng.integers(1, 3, 3))
        nu = Fraction(1, sum(fam) + int(rng.integers(1, 4)))
        a = float(rng.uniform(0.6, 0.95))
        rect = admissibility_rect(a, *fam, nu)
        if rect is None or min(rect.i1.width(), rect.i2.width()) < 1e-6:
            continue
        t1 = rect.i1.lo + 0.5 * rect.i1.width()
        t2 = rect.i2.lo + 0.5 * rect.i2.width()
        words = regular_code_words(*fam, nu)
        for k in range(1, 4):
            s1, s2 = sigma_r_thresholds(t1, t2, k)
            words = tuple(sigma_r_word(w) for w in words)
            assert is_admissible(negative_2circuit(s1, s2, a), words).is_admissible


# -- balanced orbits and critical rates ---------------------------------------------------


def test_critical_ac():
    r = critical_ac()
    assert abs(r**3 + r**2 + r - 1) < 1e-11
    assert r == pytest.approx(0.5436890127, abs=1e-10)


def test_balanced_criticals():
    assert balanced_critical(2) == pytest.approx(critical_ac(), abs=1e-9)
    crit = [balanced_critical(p) for p in range(2, 15)]
    assert all(u < v for u, v in zip(crit, crit[1:]))
    assert crit[-1] < 0.99
    for p, ap in zip(range(2, 15), crit):
        assert not balanced_condition(ap - 1e-6, p)
        assert balanced_condition(ap + 1e-6, p)


def test_balanced_domain():
    full = balanced_domain(0.0, 1)
    assert full.contains(0.3, 0.9)
    assert balanced_domain(0.0, 2) is None
    assert balanced_domain(0.5, 2) is None
    sq = balanced_domain(0.7, 2)
    assert sq is not None
    assert sq.i1.lo == pytest.approx(sq.i2.lo, abs=1e-12)
    assert sq.i1.lo + sq.i1.hi == pytest.approx(1.0, abs=1e-12)


def test_family_conditions_closed_form():
    for p in range(1, 7):
        for a in np.linspace(0.02, 0.98, 50):
            full = all(family_conditions(float(a), 1, 1, p, 0, Fraction(1, p + 3)))
            assert full == statereg_closed_form(float(a), p)


def test_nA_1_nC_feasibility_at_0842():
    def feasible(n_a, n_c):
        b = statereg2_a_bounds(n_a, n_c)
        return b is not None and b[0] <= 0.842 <= b[1]

    assert [c for c in range(1, 12) if feasible(1, c)] == list(range(4, 12))
    assert [c for c in range(2, 12) if feasible(2, c)] == [2, 3, 4, 5, 6]
    assert [c for c in range(3, 12) if feasible(3, c)] == [3, 4]
