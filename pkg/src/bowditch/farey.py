"""Farey graph navigation and traces of simple closed curves.

Convention: X is the slope 1/0, Y is 0/1 and XY is 1/1, so the base Farey
triangle (1/0, 0/1, 1/1) carries the traces (x, y, z) of a
:class:`~bowditch.algebra.CharacterTriple`.  Crossing an edge of a triangle
replaces the opposite trace w by (product of the edge traces) - w.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import SATURATION, CharacterTriple, matrix_lift
from .errors import InvalidSlope, MagnitudeOverflow

SLOPE_LIMIT = 2**60


@dataclass(frozen=True, order=True)
class Slope:
    """Reduced fraction p/q with q >= 0; infinity is 1/0."""

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        if not isinstance(p, (int, np.integer)) or not isinstance(q, (int, np.integer)):
            raise InvalidSlope(f"slope entries must be integers, got {p!r}/{q!r}")
        if q < 0 or (q == 0 and p != 1) or math.gcd(p, q) != 1:
            raise InvalidSlope(f"{p}/{q} is not a reduced slope with q >= 0")
        object.__setattr__(self, "p", int(p))
        object.__setattr__(self, "q", int(q))

    @classmethod
    def of(cls, p: int, q: int) -> "Slope":
        """Slope of the (unreduced, signed) integer vector (p, q)."""
        g = math.gcd(p, q)
        if g == 0:
            raise InvalidSlope("0/0 is not a slope")
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> "Slope":
        try:
            p, q = text.split("/")
            return cls(int(p), int(q))
        except ValueError as exc:
            if isinstance(exc, InvalidSlope):
                raise
            raise InvalidSlope(f"cannot parse slope {text!r}") from None

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    def vector(self) -> tuple[int, int]:
        return (self.p, self.q)


INFINITY = Slope(1, 0)
ZERO = Slope(0, 1)
ONE = Slope(1, 1)


def are_neighbors(a: Slope, b: Slope) -> bool:
    return abs(a.p * b.q - b.p * a.q) == 1


@dataclass(frozen=True)
class FareyTriangle:
    s1: Slope
    s2: Slope
    s3: Slope

    def __post_init__(self):
        s = self.slopes
        if not (are_neighbors(s[0], s[1]) and are_neighbors(s[1], s[2]) and are_neighbors(s[0], s[2])):
            raise InvalidSlope(f"{', '.join(map(str, s))} are not mutual neighbors")

    @property
    def slopes(self) -> tuple[Slope, Slope, Slope]:
        return (self.s1, self.s2, self.s3)

    def key(self) -> tuple[Slope, ...]:
        return tuple(sorted(self.slopes))

    def flip(self, i: int) -> "FareyTriangle":
        """Triangle across the edge opposite slope ``i``."""
        s = list(self.slopes)
        s[i] = reflect(s[(i + 1) % 3], s[(i + 2) % 3], s[i])
        return FareyTriangle(*s)


BASE_TRIANGLE = FareyTriangle(INFINITY, ZERO, ONE)


def reflect(a: Slope, b: Slope, c: Slope) -> Slope:
    """The common neighbor of a and b other than c."""
    (ap, aq), (bp, bq) = a.vector(), b.vector()
    plus = Slope.of(ap + bp, aq + bq)
    return plus if plus != c else Slope.of(ap - bp, aq - bq)


def adjacent_triangles(t: FareyTriangle) -> tuple[FareyTriangle, FareyTriangle, FareyTriangle]:
    return (t.flip(0), t.flip(1), t.flip(2))


def _check_magnitude(value: complex) -> complex:
    if not abs(value) <= SATURATION:
        raise MagnitudeOverflow(f"trace magnitude exceeds {SATURATION:g}")
    return value


def walk_flips(base: CharacterTriple, flips) -> tuple[FareyTriangle, tuple[complex, complex, complex]]:
    """Follow a sequence of edge flips from the base triangle, carrying traces."""
    tri = BASE_TRIANGLE
    t = list(base.as_tuple())
    for i in flips:
        j, k = (i + 1) % 3, (i + 2) % 3
        t[i] = _check_magnitude(t[j] * t[k] - t[i])
        tri = tri.flip(i)
    return tri, (t[0], t[1], t[2])


def _run(t_fixed: complex, t_far: complex, t_mid: complex, steps: int) -> tuple[complex, complex]:
    """Advance the neighbor recurrence around a fixed vertex ``steps`` times.

    The state (t_far, t_mid) maps to (t_mid, t_fixed * t_mid - t_far).
    Long runs use repeated squaring of the 2x2 transfer matrix.
    """
    if steps <= 64:
        for _ in range(steps):
            t_far, t_mid = t_mid, _check_magnitude(t_fixed * t_mid - t_far)
        return t_far, t_mid
    # [[0, 1], [-1, t]]^steps applied to (t_far, t_mid)
    a, b, c, d = 1.0 + 0j, 0j, 0j, 1.0 + 0j
    ma, mb, mc, md = 0j, 1.0 + 0j, -1.0 + 0j, t_fixed
    n = steps
    while n:
        if n & 1:
            a, b, c, d = a * ma + b * mc, a * mb + b * md, c * ma + d * mc, c * mb + d * md
        ma, mb, mc, md = ma * ma + mb * mc, ma * mb + mb * md, mc * ma + md * mc, mc * mb + md * md
        if abs(ma) + abs(mb) + abs(mc) + abs(md) > SATURATION:
            raise MagnitudeOverflow(f"trace magnitude exceeds {SATURATION:g}")
        n >>= 1
    return (_check_magnitude(a * t_far + b * t_mid), _check_magnitude(c * t_far + d * t_mid))


def _cmp(p1: int, q1: int, p2: int, q2: int) -> int:
    """Sign of p1/q1 - p2/q2 for q1, q2 >= 0 (1/0 and -1/0 are +-infinity)."""
    d = p1 * q2 - p2 * q1
    return (d > 0) - (d < 0)


def trace_at_slope(base: CharacterTriple, s: Slope) -> complex:
    """Trace of the simple closed curve of slope ``s``.

    Descends the Stern-Brocot tree from the base triangle; positive slopes lie
    between 0/1 and 1/0, negative slopes between -1/0 and 0/1 after flipping
    across the edge (1/0, 0/1).  Consecutive moves to the same side are fans
    around a fixed vertex and are advanced as one run.
    """
    if not isinstance(s, Slope):
        raise InvalidSlope(f"not a slope: {s!r}")
    if abs(s.p) > SLOPE_LIMIT or s.q > SLOPE_LIMIT:
        raise InvalidSlope(f"{s} exceeds the navigation limit 2^60")
    x, y, z = base.as_tuple()
    if s == INFINITY:
        return x
    if s == ZERO:
        return y
    if s.p > 0:
        lp, lq, tl = 0, 1, y
        rp, rq, tr = 1, 0, x
        tm = z
    else:
        lp, lq, tl = -1, 0, x
        rp, rq, tr = 0, 1, y
        tm = _check_magnitude(x * y - z)
    sp, sq = s.p, s.q
    while True:
        mp, mq = lp + rp, lq + rq
        c = _cmp(sp, sq, mp, mq)
        if c == 0:
            return tm
        if c < 0:
            # left end fixed; after k moves the mediant is (k+1)L + R and
            # s < (k+1)L + R  <=>  (k+1) a + b < 0
            a = sp * lq - lp * sq
            b = sp * rq - rp * sq
            k = (-b - 1) // a
            tr, tm = _run(tl, tr, tm, k)
            rp, rq = rp + k * lp, rq + k * lq
        else:
            a = rp * sq - sp * rq
            b = lp * sq - sp * lq
            k = (-b - 1) // a
            tl, tm = _run(tr, tl, tm, k)
            lp, lq = lp + k * rp, lq + k * rq


def matrix_word_trace_oracle(base: CharacterTriple, s: Slope) -> complex:
    """Trace of the Stern-Brocot matrix word for ``s``; a test oracle.

    M(1/0) = mX, M(0/1) = mY, M(-1/0) = mX^-1 and M(u + v) = M(u) M(v) for a
    mediant with u left of v.  Walks one mediant at a time using explicit
    matrices from :func:`~bowditch.algebra.matrix_lift`.
    """
    pair = matrix_lift(base)
    mX, mY = pair.mX, pair.mY
    if s == INFINITY:
        return complex(np.trace(mX))
    if s == ZERO:
        return complex(np.trace(mY))
    if s.p > 0:
        (lp, lq), ml = (0, 1), mY
        (rp, rq), mr = (1, 0), mX
    else:
        (lp, lq), ml = (-1, 0), np.linalg.inv(mX)
        (rp, rq), mr = (0, 1), mY
    while True:
        mp, mq = lp + rp, lq + rq
        mm = ml @ mr
        c = _cmp(s.p, s.q, mp, mq)
        if c == 0:
            return complex(np.trace(mm))
        if c < 0:
            (rp, rq), mr = (mp, mq), mm
        else:
            (lp, lq), ml = (mp, mq), mm
