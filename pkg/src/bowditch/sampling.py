"""Seeded random points on the variety, used by experiments and tests."""
from __future__ import annotations

import numpy as np

from .algebra import CharacterTriple, solve_third_trace


def stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of a run seeded by ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def uniform_disk(rng: np.random.Generator, radius: float) -> complex:
    rho = radius * np.sqrt(rng.random())
    phi = 2.0 * np.pi * rng.random()
    return complex(rho * np.cos(phi), rho * np.sin(phi))


def uniform_box(rng: np.random.Generator, half_width: float) -> complex:
    re, im = rng.uniform(-half_width, half_width, size=2)
    return complex(re, im)


def triple_from(x: complex, y: complex, rng: np.random.Generator) -> CharacterTriple:
    plus, minus = solve_third_trace(x, y)
    return CharacterTriple(x, y, plus if rng.random() < 0.5 else minus)


def min_coordinate(t: CharacterTriple) -> int:
    values = t.as_tuple()
    return min(range(3), key=lambda i: abs(values[i]))


def small_trace_triple(
    rng: np.random.Generator, radius: float = 0.5, y_half_width: float = 5.0, min_imag: float = 1e-6
) -> CharacterTriple:
    """On-variety triple whose smallest trace is non-real with modulus < ``radius``.

    x is uniform in the disk of the given radius, y uniform in a square box and
    z a random root; draws are repeated until the smallest trace qualifies.
    """
    while True:
        x = uniform_disk(rng, radius)
        if abs(x.imag) <= min_imag:
            continue
        t = triple_from(x, uniform_box(rng, y_half_width), rng)
        m = t.as_tuple()[min_coordinate(t)]
        if abs(m.imag) > min_imag and abs(m) < radius:
            return t


def generic_triple(rng: np.random.Generator, half_width: float = 3.0) -> CharacterTriple:
    """x, y uniform in a square box, z a random root."""
    return triple_from(uniform_box(rng, half_width), uniform_box(rng, half_width), rng)


def hyperbolic_triple(rng: np.random.Generator, half_width: float = 3.0, margin: float = 1e-3) -> CharacterTriple:
    """Generic triple whose x keeps a distance ``margin`` from the segment [-2, 2]."""
    while True:
        x = uniform_box(rng, half_width)
        if abs(x.imag) > margin or abs(x.real) > 2.0 + margin:
            return triple_from(x, uniform_box(rng, half_width), rng)
