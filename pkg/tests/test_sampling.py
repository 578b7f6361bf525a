import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from bowditch.sampling import generic_triple, hyperbolic_triple, min_coordinate, small_trace_triple, stream


def test_streams_are_reproducible_and_independent():
    a, b = stream(1, 0).random(4), stream(1, 0).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, stream(1, 1).random(4))


@given(st.integers(0, 10**6))
def test_small_trace_triple(i):
    t = small_trace_triple(stream(2, i))
    m = t.as_tuple()[min_coordinate(t)]
    assert abs(m) < 0.5 and abs(m.imag) > 1e-6


@given(st.integers(0, 10**6))
def test_box_samplers(i):
    t = generic_triple(stream(3, i), 2.0)
    assert abs(t.x.real) <= 2 and abs(t.y.imag) <= 2
    h = hyperbolic_triple(stream(4, i), 3.0, 0.1)
    assert abs(h.x.imag) > 0.1 or abs(h.x.real) > 2.1
