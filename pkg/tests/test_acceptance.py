"""Acceptance criteria, run at their stated sample counts and tolerances.

Each test prints one ``CRITERION n: PASS|FAIL`` line; the lines are also
collected into the pytest terminal summary.  Run directly with
``python tests/test_acceptance.py`` for just the summary lines.
"""
import math
import time
from pathlib import Path

import pytest

from bowditch.algebra import (
    CharacterTriple,
    fan_coefficients,
    neighbor_recurrence,
    neighbor_trace,
    vieta_move,
)
from bowditch.bq import Verdict, WitnessKind, bq_classify, classify_with_reduction, escaping_edge, fan_escape_index
from bowditch.farey import Slope, matrix_word_trace_oracle, trace_at_slope
from bowditch.reduction import lemma_bound_report, min_neighbor_search
from bowditch.sampling import generic_triple, hyperbolic_triple, min_coordinate, small_trace_triple, stream
from bowditch.scan import SliceSpec, render_ppm, scan_slice, write_csv

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

ROOT = Path(__file__).resolve().parents[1]
SEED = 20240601
N_LEMMA = 100_000
SATURATION = 1e150


def report(n: int, name: str, ok: bool, detail: str) -> None:
    line = f"CRITERION {n}: {'PASS' if ok else 'FAIL'}  {name}  ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="module")
def lemma_samples():
    return [small_trace_triple(stream(SEED, i)) for i in range(N_LEMMA)]


def _fan_at_min(t):
    j = min_coordinate(t)
    v = t.as_tuple()
    return v[j], fan_coefficients(v[j], v[(j + 1) % 3], v[(j + 2) % 3])


# 1 ------------------------------------------------------------------------
def test_c1_lemma_neighbor_search(lemma_samples):
    start = time.perf_counter()
    failures = 0
    for t in lemma_samples:
        x, fc = _fan_at_min(t)
        _, y = min_neighbor_search(fc)
        if not abs(y) < abs(x):
            failures += 1
    elapsed = time.perf_counter() - start
    ok = failures == 0 and elapsed <= 60.0
    report(1, "smaller neighbor exists", ok, f"{N_LEMMA} samples, {failures} failures, {elapsed:.1f}s <= 60s")
    assert ok


# 2, 3 -----------------------------------------------------------------------
@pytest.fixture(scope="module")
def lemma_reports(lemma_samples):
    return [lemma_bound_report(t) for t in lemma_samples]


def test_c2_lemma_constants(lemma_reports):
    bad = {"r": 0, "cos_theta": 0, "abs_A": 0}
    for rep in lemma_reports:
        if not rep.r < 1.2808:
            bad["r"] += 1
        if not -0.25 < rep.cos_theta < 0.25:
            bad["cos_theta"] += 1
        if not rep.abs_A < rep.bound_A:
            bad["abs_A"] += 1
    ok = sum(bad.values()) == 0
    report(2, "r, cos(theta), |A| bounds", ok, f"{len(lemma_reports)} samples, violations {bad}")
    assert ok


def test_c3_dichotomy(lemma_reports):
    limit = math.sqrt(3.75)
    bad = sum(1 for r in lemma_reports if not (r.dichotomy_first < limit or r.dichotomy_second < limit))
    report(3, "dichotomy", bad == 0, f"{len(lemma_reports)} samples, {bad} violations")
    assert bad == 0


# 4 ------------------------------------------------------------------------
def test_c4_small_trace_classifies_not_bq(lemma_samples):
    bad = 0
    for t in lemma_samples:
        c = bq_classify(t, 0.5)
        if c.verdict is not Verdict.NOT_BQ or c.witness.kind is not WitnessKind.SMALL_TRACE:
            bad += 1
    report(4, "small trace => NotBQ/SmallTrace", bad == 0, f"{len(lemma_samples)} samples, {bad} mismatches")
    assert bad == 0


# 5 ------------------------------------------------------------------------
def test_c5_quaternionic():
    t = CharacterTriple(0, 0, 0)
    c = bq_classify(t)
    verdict_ok = c.verdict is Verdict.NOT_BQ and c.witness.kind is WitnessKind.REAL_TRACE
    worst = 0.0
    count = 0
    for q in range(0, 11):
        for p in range(-10, 11):
            if math.gcd(p, q) != 1 or (q == 0 and p != 1):
                continue
            worst = max(worst, abs(trace_at_slope(t, Slope(p, q))))
            count += 1
    ok = verdict_ok and worst <= 2.0
    report(5, "quaternionic character", ok, f"verdict {c.verdict.value}/{c.witness.kind.value}, max |tr| {worst:g} over {count} slopes")
    assert ok


# 6 ------------------------------------------------------------------------
def _expand(tr, sides, depth, visit):
    """Brute-force outward expansion; calls visit(parent traces, new trace)."""
    if depth == 0:
        return
    for i in sides:
        j, k = (i + 1) % 3, (i + 2) % 3
        a, b = tr[j], tr[k]
        w = a * b - tr[i]
        visit(tr, w)
        if abs(w) > SATURATION:
            continue
        _expand((a, b, w), (0, 1), depth - 1, visit)


def test_c6_fuchsian():
    t = CharacterTriple(3, 3, 3)
    c = bq_classify(t)
    bad = []

    def visit(parent, w):
        if not (abs(w) >= 3.0 and abs(w) > max(abs(v) for v in parent)):
            bad.append((parent, w))

    _expand(t.as_tuple(), (0, 1, 2), 10, visit)
    ok = c.verdict is Verdict.BQ and c.triangles_visited == 1 and not bad
    report(6, "(3,3,3) is BQ", ok, f"verdict {c.verdict.value}, visited {c.triangles_visited}, depth-10 violations {len(bad)}")
    assert ok


# 7 ------------------------------------------------------------------------
def test_c7_oracle_equivalence():
    slopes = [Slope(1, 0)] + [
        Slope(p, q) for q in range(1, 31) for p in range(-30, 31) if math.gcd(p, q) == 1
    ]
    start = time.perf_counter()
    worst = 0.0
    for i in range(100):
        t = hyperbolic_triple(stream(SEED + 7, i), half_width=3.0, margin=0.05)
        for s in slopes:
            a = trace_at_slope(t, s)
            b = matrix_word_trace_oracle(t, s)
            worst = max(worst, abs(a - b) / max(abs(b), 1.0))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed <= 120.0
    report(7, "slope navigation vs matrix words", ok, f"100 bases x {len(slopes)} slopes, max rel dev {worst:.2e}, {elapsed:.1f}s")
    assert ok


# 8 ------------------------------------------------------------------------
def test_c8_closed_form_vs_recurrence():
    worst = 0.0
    for i in range(10_000):
        t = hyperbolic_triple(stream(SEED + 8, i), half_width=3.0, margin=0.05)
        fc = fan_coefficients(t.x, t.y, t.z)
        for n in range(-30, 31):
            a = neighbor_trace(fc, n)
            b = neighbor_recurrence(t.x, t.y, t.z, n)
            worst = max(worst, abs(a - b) / max(abs(b), 1.0))
    ok = worst <= 1e-8
    report(8, "closed form vs recurrence", ok, f"10000 fans, |n|<=30, max rel dev {worst:.2e}")
    assert ok


# 9 ------------------------------------------------------------------------
def _escaping_edges(count):
    edges = []
    i = 0
    while len(edges) < count:
        rng = stream(SEED + 9, i)
        i += 1
        tr = list(generic_triple(rng, 3.0).as_tuple())
        for _ in range(int(rng.integers(0, 6))):
            k = int(rng.integers(0, 3))
            tr[k] = tr[(k + 1) % 3] * tr[(k + 2) % 3] - tr[k]
        for k in range(3):
            a, b = tr[(k + 1) % 3], tr[(k + 2) % 3]
            w = a * b - tr[k]
            if escaping_edge(a, b, w) and len(edges) < count:
                edges.append((a, b, w))
    return edges


def _fan_samples(count):
    fans = []
    i = 0
    while len(fans) < count:
        rng = stream(SEED + 90, i)
        i += 1
        t = generic_triple(rng, 3.0)
        v, y0, y1 = t.as_tuple()
        if abs(v) <= 2.0 and abs(v.imag) > 1e-3 and abs(y0) > 2.0 and abs(y1) > 2.0:
            fans.append((v, y0, y1))
    return fans


def test_c9_pruning_soundness():
    bad = 0
    for a, b, w in _escaping_edges(1000):
        def visit(parent, new):
            nonlocal bad
            if not (abs(new) > 2.0 and abs(new) > max(abs(u) for u in parent)):
                bad += 1
        _expand((a, b, w), (0, 1), 12, visit)
    fan_bad = 0
    for v, y0, y1 in _fan_samples(1000):
        fc = fan_coefficients(v, y0, y1)
        for direction in (1, -1):
            n0 = fan_escape_index(v, y0, y1, direction)
            prev = None
            for m in range(0, 65):
                n = n0 + direction * m
                cur, nxt = neighbor_trace(fc, n), neighbor_trace(fc, n + direction)
                if not (abs(cur) > 2.0 and abs(nxt) >= abs(cur)):
                    fan_bad += 1
                if prev is not None and not abs(cur) > abs(prev):
                    fan_bad += 1
                # the flip off the fan is an escaping edge
                if not escaping_edge(cur, nxt, cur * nxt - v):
                    fan_bad += 1
                prev = cur
    ok = bad == 0 and fan_bad == 0
    report(9, "pruning soundness", ok, f"1000 edges depth 12: {bad} violations; 1000 fans x 2 directions x 65 indices: {fan_bad} violations")
    assert ok


# 10 -----------------------------------------------------------------------
def _symmetries(t):
    x, y, z = t.as_tuple()
    perms = [(x, y, z), (y, z, x), (z, x, y), (y, x, z), (x, z, y), (z, y, x)]
    signs = [(1, 1, 1), (-1, -1, 1), (-1, 1, -1), (1, -1, -1)]
    for p in perms:
        for s in signs:
            yield CharacterTriple(p[0] * s[0], p[1] * s[1], p[2] * s[2])
    for c in ("X", "Y", "Z"):
        yield vieta_move(t, c)


def test_c10_symmetry_invariance():
    budget = 10_000
    bad = 0
    tally = {}
    for i in range(1000):
        t = generic_triple(stream(SEED + 10, i), 3.0)
        base = bq_classify(t, 0.5, budget).verdict
        tally[base.value] = tally.get(base.value, 0) + 1
        for u in _symmetries(t):
            if bq_classify(u, 0.5, budget).verdict is not base:
                bad += 1
    report(10, "symmetry and base invariance", bad == 0, f"1000 samples x 27 images, verdicts {tally}, {bad} mismatches")
    assert bad == 0


# 11 -----------------------------------------------------------------------
def test_c11_scanner_determinism_and_throughput():
    spec = SliceSpec.from_json((ROOT / "specs" / "demo_slice.json").read_text())
    expected = SliceSpec("X", 0.05 + 1.9j, "Y", 0j, 6.0, 6.0, 128, 128, "Both", 0.5, 10_000)
    r4 = scan_slice(spec, workers=4)
    r1 = scan_slice(spec, workers=1)
    r4b = scan_slice(spec, workers=4)
    outputs = [
        ([render_ppm(r, k) for k in range(len(r.layers))], write_csv(r)) for r in (r4, r1, r4b)
    ]
    identical = outputs[0] == outputs[1] == outputs[2]
    ok = spec == expected and identical and r4.wall_seconds <= 120.0
    report(11, "demo slice determinism and throughput", ok, f"identical={identical}, 4 workers {r4.wall_seconds:.1f}s <= 120s, 1 worker {r1.wall_seconds:.1f}s")
    assert ok


# 12 -----------------------------------------------------------------------
def test_c12_reduction_consistency():
    bad = 0
    decided = 0
    for i in range(1000):
        rng = stream(SEED + 12, i)
        t = small_trace_triple(rng, radius=1.0) if i % 2 else generic_triple(rng, 3.0)
        a = bq_classify(t).verdict
        b = classify_with_reduction(t).verdict
        if Verdict.UNKNOWN in (a, b):
            continue
        decided += 1
        if a is not b:
            bad += 1
    report(12, "reduction vs search consistency", bad == 0, f"1000 samples, {decided} decided by both, {bad} contradictions")
    assert bad == 0


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
