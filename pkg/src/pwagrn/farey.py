"""Stern-Brocot search for a rational located by a monotone oracle."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Union

Hit = tuple  # ("hit", Fraction)
Bracket = tuple  # ("bracket", Fraction, Fraction)


def stern_brocot_search(
    classify: Callable[[Fraction], int],
    q_max: int,
    lo: Fraction = Fraction(0, 1),
    hi: Fraction = Fraction(1, 1),
) -> Union[Hit, Bracket]:
    """Locate the target rational between the Farey neighbours ``lo < hi``.

    ``classify(m)`` returns ``+1`` when the target lies above ``m``, ``-1``
    when it lies below and ``0`` when ``m`` is the target.  Runs of moves in
    one direction are handled by galloping, so a descent to denominator
    ``q_max`` costs ``O(log q_max)`` oracle calls per change of direction.

    Returns ``("hit", m)`` or ``("bracket", lo, hi)`` where ``lo`` and ``hi``
    are Farey neighbours and every fraction strictly between them has a
    denominator above ``q_max``.
    """
    if q_max < 1:
        raise ValueError("q_max must be at least 1")
    ln, ld = lo.numerator, lo.denominator
    hn, hd = hi.numerator, hi.denominator
    if hn * ld - ln * hd != 1:
        raise ValueError("search bounds must be Farey neighbours")

    while ld + hd <= q_max:
        c = classify(Fraction(ln + hn, ld + hd))
        if c == 0:
            return ("hit", Fraction(ln + hn, ld + hd))
        if c > 0:
            # candidates (ln + k hn)/(ld + k hd) increase with k toward hi
            kmax = (q_max - ld) // hd

            def point(k):
                return Fraction(ln + k * hn, ld + k * hd)
        else:
            kmax = (q_max - hd) // ld

            def point(k):
                return Fraction(k * ln + hn, k * ld + hd)

        # c(point(1)) == c; find the last k with the same verdict
        good, bad = 1, None
        step = 2
        while bad is None:
            k = min(good + step, kmax)
            if k == good:
                break
            ck = classify(point(k))
            if ck == c:
                good = k
                step *= 2
            else:
                bad = k
        if bad is not None:
            while bad - good > 1:
                mid = (good + bad) // 2
                if classify(point(mid)) == c:
                    good = mid
                else:
                    bad = mid
            if classify(point(bad)) == 0:
                return ("hit", point(bad))
        g = point(good)
        b = point(bad) if bad is not None else None
        if c > 0:
            ln, ld = g.numerator, g.denominator
            if b is not None:
                hn, hd = b.numerator, b.denominator
        else:
            hn, hd = g.numerator, g.denominator
            if b is not None:
                ln, ld = b.numerator, b.denominator
    return ("bracket", Fraction(ln, ld), Fraction(hn, hd))
