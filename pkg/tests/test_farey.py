import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bowditch.algebra import CharacterTriple
from bowditch.errors import InvalidSlope, MagnitudeOverflow
from bowditch.farey import (
    BASE_TRIANGLE,
    FareyTriangle,
    Slope,
    are_neighbors,
    matrix_word_trace_oracle,
    trace_at_slope,
    walk_flips,
)

from strategies import hyperbolic_triples, triples

S = Slope.parse


def test_slope_validation():
    assert S("1/0") == Slope(1, 0)
    assert Slope.of(-2, -4) == S("1/2")
    assert Slope.of(-3, 0) == S("1/0")
    assert str(Slope.of(2, -3)) == "-2/3"
    for bad in [(2, 4), (1, -2), (-1, 0), (0, 0)]:
        with pytest.raises(InvalidSlope):
            Slope(*bad)
    with pytest.raises(InvalidSlope):
        S("one/two")


@pytest.mark.parametrize("a, b, expected", [("0/1", "1/0", True), ("1/2", "1/3", True), ("1/2", "3/4", False)])
def test_are_neighbors(a, b, expected):
    assert are_neighbors(S(a), S(b)) is expected


def test_flip_examples():
    assert BASE_TRIANGLE.flip(2).slopes == (S("1/0"), S("0/1"), S("-1/1"))
    new = BASE_TRIANGLE.flip(0).s1
    # brute-force: the common neighbor of 0/1 and 1/1 other than 1/0
    found = [
        Slope(p, q)
        for q in range(0, 6)
        for p in range(-6, 7)
        if math.gcd(p, q) == 1 and (q or p == 1)
        and are_neighbors(Slope(p, q), S("0/1")) and are_neighbors(Slope(p, q), S("1/1"))
        and Slope(p, q) != S("1/0")
    ]
    assert found == [new] == [S("1/2")]


def test_non_triangle_rejected():
    with pytest.raises(InvalidSlope):
        FareyTriangle(S("1/0"), S("0/1"), S("1/2"))


@given(st.lists(st.integers(0, 2), max_size=12), st.integers(0, 2))
def test_double_flip_is_identity(flips, i):
    tri, _ = walk_flips(CharacterTriple(3, 3, 3), flips)
    assert tri.flip(i).flip(i) == tri


def test_trace_at_base_slopes():
    t = CharacterTriple(3, 3, 6)
    assert trace_at_slope(t, S("1/0")) == 3
    assert trace_at_slope(t, S("0/1")) == 3
    assert trace_at_slope(t, S("1/1")) == 6
    assert trace_at_slope(t, S("-1/1")) == 3 * 3 - 6


def test_trace_at_slope_fuchsian_values():
    t = CharacterTriple(3, 3, 3)
    # tr X^2 Y = x z - y and tr X^3 Y = x tr(X^2 Y) - z
    assert trace_at_slope(t, S("2/1")) == 6
    assert trace_at_slope(t, S("3/1")) == 15
    assert trace_at_slope(t, S("3/2")) == 15
    assert trace_at_slope(t, S("1/2")) == 6
    for s in ("2/1", "1/2", "3/1", "3/2", "-2/1", "-1/3"):
        assert matrix_word_trace_oracle(t, S(s)) == pytest.approx(trace_at_slope(t, S(s)))


@given(triples(), st.lists(st.integers(0, 2), max_size=10))
def test_path_independence(t, flips):
    tri, traces = walk_flips(t, flips)
    scale = max(1.0, *(abs(v) for v in traces))
    for s, v in zip(tri.slopes, traces):
        assert abs(trace_at_slope(t, s) - v) <= 1e-9 * scale * (1 + len(flips))


@given(hyperbolic_triples(), st.integers(-12, 12), st.integers(1, 12))
def test_oracle_equivalence(t, p, q):
    if math.gcd(p, q) != 1:
        return
    s = Slope(p, q)
    a, b = trace_at_slope(t, s), matrix_word_trace_oracle(t, s)
    assert abs(a - b) <= 1e-8 * max(1.0, abs(b))


def test_long_run_matches_stepping():
    t = CharacterTriple.from_pair(0.3 + 1.1j, 0.7 - 0.4j)
    # slope n/1 lies in the fan of 1/0: y_{n+1} = x y_n - y_{n-1}
    prev, cur = t.y, t.z
    for n in range(2, 301):
        prev, cur = cur, t.x * cur - prev
        if n in (65, 130, 300):
            assert trace_at_slope(t, Slope(n, 1)) == pytest.approx(cur, rel=1e-9)


def test_slope_limit_and_overflow():
    t = CharacterTriple(3, 3, 3)
    with pytest.raises(InvalidSlope):
        trace_at_slope(t, Slope(2**61 + 1, 2))
    with pytest.raises(MagnitudeOverflow):
        trace_at_slope(t, Slope(1, 1000))
