"""Semi-decision procedure for the BQ-conditions.

A character satisfies the BQ-conditions when no simple closed curve has trace
in [-2, 2] and only finitely many have trace of modulus <= 2.  The classifier
explores Farey triangles outward from the base triangle and stops exploring
past two kinds of certified boundary:

* an *escaping edge*: crossing into (a, b, w) with |a|, |b|, |w| > 2 and
  |w| >= max(|a|, |b|).  Every later new trace satisfies
  |b w - a| >= |w| (|b| - 1) > |w|, so everything beyond grows and stays > 2;
* a *truncated fan*: around a vertex v with |v| <= 2 (and r > 1) the neighbor
  traces obey y_n = A lam^n + D lam^-n, so |y_n| >= |A| r^n - |D| r^-n.  Past
  the index where this envelope exceeds 2 and the growth certificate holds,
  every fan trace is > 2 and non-decreasing and every flip off the fan is an
  escaping edge.

A trace numerically in [-2, 2] violates the first condition; a non-real trace
of modulus below 0.5 puts the character in the interior of the complement.
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass, field

from .algebra import (
    EPS_REAL,
    CharacterTriple,
    fan_coefficients,
    format_complex,
    principal_eigenvalue,
)
from .errors import EllipticVertex, ZeroCoefficient
from .farey import Slope
from .reduction import DEFAULT_FLOOR, DEFAULT_MAX_STEPS, ReductionStatus, reduce_trace

MAX_THRESHOLD = 0.5
DEFAULT_BUDGET = 10_000


class Verdict(str, enum.Enum):
    BQ = "BQ"
    NOT_BQ = "NotBQ"
    UNKNOWN = "Unknown"


class WitnessKind(str, enum.Enum):
    REAL_TRACE = "RealTrace"
    SMALL_TRACE = "SmallTrace"


@dataclass(frozen=True)
class Witness:
    kind: WitnessKind
    slope: Slope
    trace: complex
    #: realness is decided numerically (|Im| <= EPS_REAL), never exactly
    approximate: bool = False

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "slope": str(self.slope),
            "trace": format_complex(self.trace),
            "approximate": self.approximate,
        }


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    witness: Witness | None
    triangles_visited: int
    low_trace_vertices: list[tuple[Slope, complex]] = field(default_factory=list)
    budget_spent: int = 0

    @property
    def low_trace_count(self) -> int:
        return len(self.low_trace_vertices)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "witness": self.witness.to_dict() if self.witness else None,
            "triangles_visited": self.triangles_visited,
            "budget_spent": self.budget_spent,
            "low_trace_count": self.low_trace_count,
            "low_trace_vertices": [
                {"slope": str(s), "trace": format_complex(v)} for s, v in self.low_trace_vertices
            ],
        }


def escaping_edge(a: complex, b: complex, w: complex) -> bool:
    """True when crossing into the triangle (a, b, w), w new, is certified escaping."""
    ma, mb, mw = abs(a), abs(b), abs(w)
    return ma > 2.0 and mb > 2.0 and mw > 2.0 and mw >= ma and mw >= mb


def fan_escape_index(v: complex, y0: complex, y1: complex, direction: int = 1) -> int:
    """Least index past which the fan of ``v`` is certified to stay > 2 and grow.

    The fan is numbered so that y0, y1 are the neighbor traces at indices 0 and
    1; ``direction`` is +1 (towards y1 and beyond) or -1.  The returned n0
    satisfies, for every m beyond n0 in that direction,
    |A| r^m - |D| r^-m > 2 and |A| r^m (r - 1) >= |D| r^-m (1 + 1/r) (mirrored
    for -1); the second inequality gives |y_{m+1}| >= |y_m|.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    eig = principal_eigenvalue(v)
    if eig.unit_modulus or eig.r <= 1.0:
        raise EllipticVertex(f"trace {v} lies in [-2, 2]; the fan does not grow")
    fc = fan_coefficients(v, y0, y1)
    a, d = abs(fc.A), abs(fc.D)
    if direction < 0:
        a, d = d, a
    if fc.zero_coefficient and a <= d:
        raise ZeroCoefficient(f"fan of {v} does not grow in direction {direction:+d}")
    return direction * _escape_start(a, d, eig.r)


def _escape_start(a: float, d: float, r: float) -> int:
    logr = math.log(r)

    def ok(m: int) -> bool:
        up, down = a * r**m, d * r ** (-m)
        return up - down > 2.0 and up * (r - 1.0) >= down * (1.0 + 1.0 / r)

    # r^m > (1 + sqrt(1 + a d)) / a  <=>  a r^m - d r^-m > 2
    m = math.floor(math.log((1.0 + math.sqrt(1.0 + a * d)) / a) / logr)
    if d > 0:
        m = max(m, math.ceil(math.log(d * (1.0 + 1.0 / r) / (a * (r - 1.0))) / (2.0 * logr)))
    while ok(m - 1):
        m -= 1
    while not ok(m):
        m += 1
    return m


def _normal(p: int, q: int) -> tuple[int, int]:
    if q < 0 or (q == 0 and p < 0):
        return -p, -q
    return p, q


def _reflect(a: tuple[int, int], b: tuple[int, int], c: tuple[int, int]) -> tuple[int, int]:
    s = _normal(a[0] + b[0], a[1] + b[1])
    return s if s != c else _normal(a[0] - b[0], a[1] - b[1])


def _fan_truncated(v: complex, u: complex, w: complex) -> bool:
    """Crossing into (v, u, w) along the fan of v (|v| <= 2), away from u, is prunable."""
    if abs(u) <= 2.0 or abs(w) <= 2.0:
        return False
    try:
        return fan_escape_index(v, u, w, 1) <= 1
    except (EllipticVertex, ZeroCoefficient):
        return False


def _prunable(a: complex, b: complex, w: complex) -> bool:
    if escaping_edge(a, b, w):
        return True
    if abs(a) <= 2.0 and _fan_truncated(a, b, w):
        return True
    if abs(b) <= 2.0 and _fan_truncated(b, a, w):
        return True
    return False


def _check_threshold(threshold: float) -> None:
    if not 0.0 < threshold <= MAX_THRESHOLD:
        raise ValueError(f"threshold must lie in (0, {MAX_THRESHOLD}], got {threshold}")


def bq_classify(
    t: CharacterTriple, threshold: float = MAX_THRESHOLD, budget: int = DEFAULT_BUDGET
) -> Classification:
    """Decide the BQ-conditions for ``t`` or give up after ``budget`` triangles.

    Triangles are explored best-first (smallest newly produced trace first);
    a triangle is only entered if the crossing is not certified prunable.
    Every newly produced trace is examined when it is produced.
    """
    _check_threshold(threshold)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not isinstance(t, CharacterTriple):
        t = CharacterTriple(*t)
    low: dict[tuple[int, int], complex] = {}

    def examine(slope, value):
        m = abs(value)
        if m > 2.0 + EPS_REAL:
            return None
        im = abs(value.imag)
        if im <= EPS_REAL and abs(value.real) <= 2.0 + EPS_REAL:
            return Witness(WitnessKind.REAL_TRACE, Slope(*slope), value, approximate=True)
        if m < threshold:
            return Witness(WitnessKind.SMALL_TRACE, Slope(*slope), value)
        if m <= 2.0:
            low[slope] = value
        return None

    def result(verdict, witness, visited):
        vertices = [(Slope(*s), v) for s, v in low.items()]
        return Classification(verdict, witness, visited, vertices, visited)

    traces = t.as_tuple()
    slopes = ((1, 0), (0, 1), (1, 1))
    for i in sorted(range(3), key=lambda i: abs(traces[i])):
        found = examine(slopes[i], traces[i])
        if found:
            return result(Verdict.NOT_BQ, found, 1)

    visited = 1
    seen = {frozenset(slopes)}
    heap: list = []
    counter = 0
    pending = [(traces, slopes, (0, 1, 2))]
    while True:
        for tr, sl, sides in pending:
            for i in sides:
                j, k = (i + 1) % 3, (i + 2) % 3
                a, b = tr[j], tr[k]
                w = a * b - tr[i]
                if _prunable(a, b, w):
                    continue
                s_new = _reflect(sl[j], sl[k], sl[i])
                key = frozenset((sl[j], sl[k], s_new))
                if key in seen:
                    continue
                if visited >= budget:
                    return result(Verdict.UNKNOWN, None, visited)
                visited += 1
                seen.add(key)
                found = examine(s_new, w)
                if found:
                    return result(Verdict.NOT_BQ, found, visited)
                counter += 1
                # new vertex sits at index 2; only the sides (a, w), (b, w) lead onward
                heapq.heappush(heap, (abs(w), counter, (a, b, w), (sl[j], sl[k], s_new)))
        if not heap:
            return result(Verdict.BQ, None, visited)
        _, _, tr, sl = heapq.heappop(heap)
        pending = [(tr, sl, (0, 1))]


def classify_with_reduction(
    t: CharacterTriple,
    threshold: float = MAX_THRESHOLD,
    budget: int = DEFAULT_BUDGET,
    max_steps: int = DEFAULT_MAX_STEPS,
) -> Classification:
    """Run the trace reduction first and fall back to :func:`bq_classify`."""
    _check_threshold(threshold)
    if not isinstance(t, CharacterTriple):
        t = CharacterTriple(*t)
    outcome = reduce_trace(t, threshold=threshold, floor=DEFAULT_FLOOR, max_steps=max_steps)
    if outcome.status is ReductionStatus.REACHED_REAL_INTERVAL:
        kind, approx = WitnessKind.REAL_TRACE, True
    elif outcome.status is ReductionStatus.REACHED_FLOOR:
        real = abs(outcome.final_trace.imag) <= EPS_REAL
        kind = WitnessKind.REAL_TRACE if real else WitnessKind.SMALL_TRACE
        approx = real
    else:
        return bq_classify(t, threshold, budget)
    witness = Witness(kind, outcome.final_vertex, outcome.final_trace, approx)
    n = len(outcome.steps) + 1
    return Classification(Verdict.NOT_BQ, witness, n, [], n)
