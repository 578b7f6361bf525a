"""Trace reduction: walking to neighbors of strictly smaller trace.

Around a vertex X with trace x = lam + 1/lam, |lam| > 1, the neighbor traces
are y_n = A lam^n + D lam^-n.  When |x| < 0.5 and x is not real some neighbor
has strictly smaller trace; iterating gives a sequence of vertices with
decreasing trace modulus that either reaches the real segment [-2, 2] or
keeps shrinking.
"""
from __future__ import annotations

import cmath
import enum
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    SATURATION,
    CharacterTriple,
    FanCoefficients,
    fan_coefficients,
    format_complex,
    is_numerically_real_interval,
    neighbor_trace,
    principal_eigenvalue,
    solve_third_trace,
)
from .errors import EllipticVertex
from .farey import INFINITY, ONE, ZERO, Slope
from .sampling import min_coordinate, stream, triple_from, uniform_box, uniform_disk

SQRT_375 = math.sqrt(3.75)
DEFAULT_THRESHOLD = 0.5
DEFAULT_FLOOR = 1e-12
DEFAULT_MAX_STEPS = 1000
DEFAULT_WINDOW = 8
MAX_EXTENSION = 4096


def _envelopes(fc: FanCoefficients):
    """Lower bounds of |y_n| in the + and - directions (as functions of n)."""
    a, d, logr = abs(fc.A), abs(fc.D), math.log(fc.r)

    def plus(n: int) -> float:
        return a * math.exp(n * logr) - d * math.exp(-n * logr)

    def minus(n: int) -> float:
        return d * math.exp(-n * logr) - a * math.exp(n * logr)

    return plus, minus


def fan_values(fc: FanCoefficients, ns: np.ndarray) -> np.ndarray:
    """Vectorised A lam^n + D lam^-n; entries past the saturation bound become inf."""
    ns = np.asarray(ns, dtype=float)
    log_lam = cmath.log(fc.lam)
    with np.errstate(over="ignore", invalid="ignore"):
        y = fc.A * np.exp(ns * log_lam) + fc.D * np.exp(-ns * log_lam)
    y[~(np.abs(y) <= SATURATION)] = complex("inf")
    return y


def min_neighbor_search(
    fc: FanCoefficients, window: int = DEFAULT_WINDOW, max_extension: int = MAX_EXTENSION
) -> tuple[int, complex]:
    """Index and trace of the neighbor of smallest trace modulus.

    Scans ``window`` indices either side of the valley n0 where
    |A| r^n = |D| r^-n, then keeps extending each side while the lower
    envelope |A| r^n - |D| r^-n (resp. its mirror) is still below the best
    value found.  When the extension stops on the envelope, no smaller
    neighbor exists anywhere in the fan.  For r very close to 1 the profile
    is nearly flat over ~1/log(r) indices, so each side is capped at
    ``max_extension`` extra indices.  Ties within a relative 1e-12 go to the
    index of smallest |n|.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    if fc.r <= 1.0 or principal_eigenvalue(fc.x).unit_modulus:
        raise EllipticVertex(f"trace {fc.x} lies in [-2, 2]; neighbor traces do not grow")
    n0 = 0 if fc.zero_coefficient else valley_index(fc)
    ns = [np.arange(n0 - window, n0 + window + 1)]
    best = float(np.min(np.abs(fan_values(fc, ns[0]))))
    if not fc.zero_coefficient:
        plus, minus = _envelopes(fc)
        for side, envelope in ((1, plus), (-1, minus)):
            start, size = n0 + side * (window + 1), window + 1
            limit = n0 + side * (window + max_extension)
            while envelope(start) < best and side * (limit - start) >= 0:
                stop = start + side * size
                if side * (stop - limit) > 0:
                    stop = limit + side
                block = np.arange(start, stop, side)
                ns.append(block)
                best = min(best, float(np.min(np.abs(fan_values(fc, block)))))
                start, size = stop, 2 * size
    ns = np.concatenate(ns)
    mods = np.abs(fan_values(fc, ns))
    tied = ns[mods <= mods.min() * (1.0 + 1e-12)]
    n_star = int(min(tied, key=lambda n: (abs(n), -n)))
    return n_star, neighbor_trace(fc, n_star)


def valley_index(fc: FanCoefficients) -> int:
    """Integer nearest the index where |A| r^n = |D| r^-n."""
    return round(math.log(abs(fc.D) / abs(fc.A)) / (2.0 * math.log(fc.r)))


class ReductionStatus(str, enum.Enum):
    REACHED_REAL_INTERVAL = "ReachedRealInterval"
    REACHED_FLOOR = "ReachedFloor"
    NO_DECREASE = "NoDecrease"
    STEP_LIMIT = "StepLimit"


@dataclass(frozen=True)
class ReductionStep:
    vertex: Slope
    trace: complex
    triple: CharacterTriple
    slopes: tuple[Slope, Slope, Slope]
    chosen_n: int

    def to_dict(self) -> dict:
        return {
            "vertex": str(self.vertex),
            "trace": format_complex(self.trace),
            "triple": [format_complex(v) for v in self.triple.as_tuple()],
            "slopes": [str(s) for s in self.slopes],
            "chosen_n": self.chosen_n,
        }


@dataclass(frozen=True)
class ReductionOutcome:
    start: CharacterTriple
    steps: list[ReductionStep]
    status: ReductionStatus
    final_vertex: Slope
    final_trace: complex
    threshold: float
    numerically_real: bool = False

    @property
    def moduli(self) -> list[float]:
        """Minimal trace modulus before the first step and after each step."""
        start = min(abs(v) for v in self.start.as_tuple())
        return [start] + [abs(s.trace) for s in self.steps]

    def first_below(self, bound: float) -> int | None:
        """Number of steps taken before a trace of modulus < ``bound`` appears."""
        for k, m in enumerate(self.moduli):
            if m < bound:
                return k
        return None

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "start": [format_complex(v) for v in self.start.as_tuple()],
            "threshold": self.threshold,
            "final_vertex": str(self.final_vertex),
            "final_trace": format_complex(self.final_trace),
            "numerically_real": self.numerically_real,
            "steps": [s.to_dict() for s in self.steps],
        }


def _fan_slope(u: Slope, v: Slope, w: Slope):
    """Slope of neighbor n around u, given consecutive neighbors v (n=0), w (n=1)."""
    e = 1 if Slope.of(v.p + u.p, v.q + u.q) == w else -1
    return lambda n: Slope.of(v.p + n * e * u.p, v.q + n * e * u.q)


def descend(
    t: CharacterTriple,
    floor: float = DEFAULT_FLOOR,
    max_steps: int = DEFAULT_MAX_STEPS,
    window: int = DEFAULT_WINDOW,
):
    """Generator of :class:`ReductionStep` records; returns (status, vertex, trace).

    At each step the smallest trace of the current triangle is the vertex X;
    its fan is searched for the global minimum neighbor Y_n.  If that is
    strictly smaller, the triangle moves to (X, Y_n, Y_{n+-1}) choosing the
    side whose third trace is smaller.
    """
    slopes = [INFINITY, ZERO, ONE]
    traces = list(t.as_tuple())
    taken = 0
    while True:
        j = min(range(3), key=lambda i: abs(traces[i]))
        x, sx = traces[j], slopes[j]
        if is_numerically_real_interval(x):
            return ReductionStatus.REACHED_REAL_INTERVAL, sx, x
        if abs(x) < floor:
            return ReductionStatus.REACHED_FLOOR, sx, x
        if taken >= max_steps:
            return ReductionStatus.STEP_LIMIT, sx, x
        a, b = (j + 1) % 3, (j + 2) % 3
        fc = fan_coefficients(x, traces[a], traces[b])
        n, yn = min_neighbor_search(fc, window)
        if not abs(yn) < abs(x):
            return ReductionStatus.NO_DECREASE, sx, x
        y_prev, y_next = neighbor_trace(fc, n - 1), neighbor_trace(fc, n + 1)
        m, third = (n + 1, y_next) if abs(y_next) <= abs(y_prev) else (n - 1, y_prev)
        # re-solve the third trace so rounding in earlier steps cannot pull
        # the triangle off the variety as the traces shrink
        roots = solve_third_trace(x, yn)
        third = min(roots, key=lambda w: abs(w - third))
        slope_of = _fan_slope(sx, slopes[a], slopes[b])
        slopes = [sx, slope_of(n), slope_of(m)]
        traces = [x, yn, third]
        taken += 1
        yield ReductionStep(slopes[1], yn, CharacterTriple(*traces), tuple(slopes), n)


def reduce_trace(
    t: CharacterTriple,
    threshold: float = DEFAULT_THRESHOLD,
    floor: float = DEFAULT_FLOOR,
    max_steps: int = DEFAULT_MAX_STEPS,
    window: int = DEFAULT_WINDOW,
) -> ReductionOutcome:
    """Run :func:`descend` to completion.

    ``threshold`` is recorded for the caller; it does not change the walk.
    """
    if not isinstance(t, CharacterTriple):
        t = CharacterTriple(*t)
    walk = descend(t, floor, max_steps, window)
    steps: list[ReductionStep] = []
    while True:
        try:
            steps.append(next(walk))
        except StopIteration as done:
            status, vertex, trace = done.value
            break
    return ReductionOutcome(
        start=t,
        steps=steps,
        status=status,
        final_vertex=vertex,
        final_trace=trace,
        threshold=threshold,
        numerically_real=status is ReductionStatus.REACHED_REAL_INTERVAL,
    )


@dataclass(frozen=True)
class LemmaBoundReport:
    """Quantities bounding the neighbor search around the smallest trace."""

    x: complex
    r: float
    cos_theta: float
    abs_A: float
    bound_A: float
    dichotomy_first: float
    dichotomy_second: float
    min_y01_over_x: float
    ratio_DA: float

    @property
    def applicable(self) -> bool:
        return abs(self.x) < 0.5 and abs(self.x.imag) > 0.0

    def violations(self) -> list[str]:
        """Names of the bounds that fail; empty unless |x| < 0.5 and x is non-real."""
        if not self.applicable:
            return []
        checks = {
            "r": 1.0 < self.r < 1.2808,
            "cos_theta": -0.25 < self.cos_theta < 0.25,
            "abs_A": self.abs_A < self.bound_A,
            "dichotomy": self.dichotomy_first < SQRT_375 or self.dichotomy_second < SQRT_375,
            "min_y01_over_x": self.min_y01_over_x < 1.0,
            "normalized": 1.0 <= self.ratio_DA <= self.r * (1.0 + 1e-12),
        }
        return [name for name, ok in checks.items() if not ok]


def lemma_bound_report(t: CharacterTriple) -> LemmaBoundReport:
    j = min_coordinate(t)
    traces = t.as_tuple()
    x = traces[j]
    fc = fan_coefficients(x, traces[(j + 1) % 3], traces[(j + 2) % 3], normalize=True)
    eig = principal_eigenvalue(x)
    ratio = fc.D / fc.A
    return LemmaBoundReport(
        x=x,
        r=eig.r,
        cos_theta=eig.cos_theta,
        abs_A=abs(fc.A),
        bound_A=abs(x) / SQRT_375,
        dichotomy_first=abs(1.0 + ratio),
        dichotomy_second=abs(fc.lam + ratio / fc.lam),
        min_y01_over_x=min(abs(fc.y0), abs(fc.y1)) / abs(x),
        ratio_DA=abs(ratio),
    )


def jorgensen_flag(trace: complex) -> bool:
    """0 < |trace| < 1 forces a non-discrete representation."""
    return 0.0 < abs(trace) < 1.0


# ---------------------------------------------------------------------------
# experiment: starting from some trace of modulus < 1, does reduction reach < 0.5?


def experiment_triple(seed: int, index: int, y_half_width: float = 3.0) -> CharacterTriple:
    """Triple whose smallest trace is non-real with modulus < 1."""
    rng = stream(seed, index)
    while True:
        x = uniform_disk(rng, 1.0)
        if abs(x.imag) <= 1e-6:
            continue
        t = triple_from(x, uniform_box(rng, y_half_width), rng)
        m = t.as_tuple()[min_coordinate(t)]
        if abs(m.imag) > 1e-6 and abs(m) < 1.0:
            return t


def _experiment_one(args) -> tuple[int | None, dict | None]:
    seed, index, max_steps = args
    t = experiment_triple(seed, index)
    if min(abs(v) for v in t.as_tuple()) < DEFAULT_THRESHOLD:
        return 0, None
    # only the first trace below the threshold matters, so stop there
    walk = descend(t, max_steps=max_steps)
    k = 0
    while True:
        try:
            step = next(walk)
        except StopIteration as done:
            status, _, trace = done.value
            break
        k += 1
        if abs(step.trace) < DEFAULT_THRESHOLD:
            return k, None
    return None, {
        "index": index,
        "triple": [format_complex(v) for v in t.as_tuple()],
        "status": status.value,
        "min_trace": format_complex(trace),
        "steps": k,
    }


@dataclass
class ExperimentReport:
    samples: int
    seed: int
    fraction_reduced: float
    histogram: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "fraction_reduced": self.fraction_reduced,
            "histogram": self.histogram,
            "failures": self.failures,
        }


def reduction_experiment(
    samples: int, seed: int, workers: int = 1, max_steps: int = DEFAULT_MAX_STEPS
) -> ExperimentReport:
    """Sample characters with a non-real trace of modulus < 1 and run the reduction.

    Reports the fraction whose reduction reaches a trace of modulus < 0.5, a
    histogram of how many steps that took, and the samples where it did not.
    Each sample draws from its own seeded stream, so the report does not depend
    on ``workers``.
    """
    if samples < 0:
        raise ValueError("samples must be >= 0")
    jobs = [(seed, i, max_steps) for i in range(samples)]
    if workers > 1 and samples > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_experiment_one, jobs, chunksize=max(1, samples // (8 * workers))))
    else:
        results = [_experiment_one(j) for j in jobs]
    counts = Counter(k for k, _ in results if k is not None)
    failures = [f for _, f in results if f is not None]
    reduced = samples - len(failures)
    return ExperimentReport(
        samples=samples,
        seed=seed,
        fraction_reduced=reduced / samples if samples else 0.0,
        histogram={str(k): counts[k] for k in sorted(counts)},
        failures=failures,
    )
