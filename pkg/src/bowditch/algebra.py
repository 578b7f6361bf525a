"""Floating-point algebra on the cubic x^2 + y^2 + z^2 = xyz.

A type-preserving character of the punctured torus is recorded by the traces
(x, y, z) of X, Y and XY.  Everything here is a pure function of its inputs.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .errors import (
    DegenerateEigenvalue,
    EllipticVertex,
    InvalidTriple,
    MagnitudeOverflow,
    ZeroCoefficient,
)

#: relative tolerance for the variety residual and for +-2 degeneracy
EPS_VARIETY = 1e-9
#: |Im t| below this counts as "numerically real"
EPS_REAL = 1e-9
#: traces above this magnitude are never materialised
SATURATION = 1e150
LOG_SATURATION = math.log(SATURATION)

Coordinate = Literal["X", "Y", "Z"]
COORDINATES: tuple[Coordinate, ...] = ("X", "Y", "Z")


def format_complex(z: complex) -> str:
    """Render ``z`` as ``"RE,IM"`` with round-trip precision."""
    z = complex(z)
    return f"{z.real!r},{z.imag!r}"


def parse_complex(text: str) -> complex:
    """Inverse of :func:`format_complex`; a bare real ``"RE"`` is also accepted."""
    parts = text.strip().split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"expected 'RE,IM', got {text!r}")


def is_numerically_real_interval(t: complex, eps: float = EPS_REAL) -> bool:
    """True when ``t`` is within ``eps`` of the real segment [-2, 2]."""
    return abs(t.imag) <= eps and -2.0 - eps <= t.real <= 2.0 + eps


def variety_residual(x: complex, y: complex, z: complex) -> float:
    return abs(x * x + y * y + z * z - x * y * z)


def residual_bound(x: complex, y: complex, z: complex, eps: float = EPS_VARIETY) -> float:
    return eps * (1.0 + abs(x) ** 2 + abs(y) ** 2 + abs(z) ** 2)


@dataclass(frozen=True)
class CharacterTriple:
    """Traces (x, y, z) = (tr X, tr Y, tr XY) of a point on the variety.

    Construction validates the variety residual and raises :class:`InvalidTriple`
    when it exceeds ``EPS_VARIETY * (1 + |x|^2 + |y|^2 + |z|^2)``.
    """

    x: complex
    y: complex
    z: complex

    def __post_init__(self):
        x, y, z = complex(self.x), complex(self.y), complex(self.z)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)
        res = variety_residual(x, y, z)
        bound = residual_bound(x, y, z)
        if not res <= bound:
            raise InvalidTriple((x, y, z), res, bound)

    @classmethod
    def from_pair(cls, x: complex, y: complex, branch: str = "plus") -> "CharacterTriple":
        plus, minus = solve_third_trace(x, y)
        if branch == "plus":
            return cls(x, y, plus)
        if branch == "minus":
            return cls(x, y, minus)
        raise ValueError(f"branch must be 'plus' or 'minus', not {branch!r}")

    def as_tuple(self) -> tuple[complex, complex, complex]:
        return (self.x, self.y, self.z)

    def residual(self) -> float:
        return variety_residual(self.x, self.y, self.z)

    def __getitem__(self, coordinate: Coordinate) -> complex:
        return self.as_tuple()[_coord_index(coordinate)]


def _coord_index(coordinate) -> int:
    if isinstance(coordinate, int):
        return coordinate
    try:
        return COORDINATES.index(coordinate.upper())
    except (ValueError, AttributeError):
        raise ValueError(f"coordinate must be one of X, Y, Z, not {coordinate!r}") from None


def solve_third_trace(x: complex, y: complex) -> tuple[complex, complex]:
    """Roots (z+, z-) of z^2 - xy z + (x^2 + y^2) = 0.

    z+ uses the principal square root of the discriminant.  The root of larger
    modulus is formed directly and the other from the product of the roots,
    which avoids cancellation.
    """
    x, y = complex(x), complex(y)
    s = x * y
    p = x * x + y * y
    sq = cmath.sqrt(s * s - 4.0 * p)
    plus, minus = (s + sq) / 2.0, (s - sq) / 2.0
    if abs(plus) >= abs(minus):
        if plus != 0:
            minus = p / plus
    else:
        plus = p / minus
    return plus, minus


def vieta_move(t: CharacterTriple, coordinate: Coordinate) -> CharacterTriple:
    """Replace one trace w by (product of the other two) - w.

    This is the same character read off the adjacent Farey triangle.
    """
    x, y, z = t.as_tuple()
    i = _coord_index(coordinate)
    if i == 0:
        return CharacterTriple(y * z - x, y, z)
    if i == 1:
        return CharacterTriple(x, x * z - y, z)
    return CharacterTriple(x, y, x * y - z)


@dataclass(frozen=True)
class EigenvalueData:
    lam: complex
    r: float
    theta: float
    unit_modulus: bool

    @property
    def cos_theta(self) -> float:
        return math.cos(self.theta)


def principal_eigenvalue(x: complex) -> EigenvalueData:
    """Root lambda of s^2 - x s + 1 with |lambda| >= 1.

    For real x in [-2, 2] both roots lie on the unit circle; the root with
    non-negative imaginary part is returned and ``unit_modulus`` is set.
    """
    x = complex(x)
    sq = cmath.sqrt(x * x - 4.0)
    a, b = (x + sq) / 2.0, (x - sq) / 2.0
    unit = abs(x.imag) <= EPS_REAL and abs(x.real) <= 2.0
    if unit:
        lam = a if a.imag >= b.imag else b
    else:
        lam = a if abs(a) >= abs(b) else b
    return EigenvalueData(lam, abs(lam), cmath.phase(lam), unit)


def _check_not_parabolic(x: complex) -> None:
    if abs(x - 2.0) < EPS_VARIETY or abs(x + 2.0) < EPS_VARIETY:
        raise DegenerateEigenvalue(f"trace {x} is parabolic (+-2); eigenvalues coincide")


@dataclass(frozen=True)
class MatrixPair:
    """SL(2, C) lift with mX diagonal."""

    mX: np.ndarray
    mY: np.ndarray

    def residuals(self, t: CharacterTriple) -> dict[str, float]:
        mX, mY = self.mX, self.mY
        comm = mX @ mY @ np.linalg.inv(mX) @ np.linalg.inv(mY)
        return {
            "det_X": abs(np.linalg.det(mX) - 1.0),
            "det_Y": abs(np.linalg.det(mY) - 1.0),
            "trace_X": abs(np.trace(mX) - t.x),
            "trace_Y": abs(np.trace(mY) - t.y),
            "trace_XY": abs(np.trace(mX @ mY) - t.z),
            "commutator": abs(np.trace(comm) + 2.0),
        }


def matrix_lift(t: CharacterTriple) -> MatrixPair:
    """Conjugate so that X is diag(lambda, 1/lambda); Y is [[A, 1], [AD - 1, D]]."""
    _check_not_parabolic(t.x)
    lam = principal_eigenvalue(t.x).lam
    inv = 1.0 / lam
    gap = lam - inv
    A = (t.z - inv * t.y) / gap
    D = (lam * t.y - t.z) / gap
    mX = np.array([[lam, 0.0], [0.0, inv]], dtype=complex)
    mY = np.array([[A, 1.0], [A * D - 1.0, D]], dtype=complex)
    return MatrixPair(mX, mY)


@dataclass(frozen=True)
class FanCoefficients:
    """Neighbor traces of a vertex X: y_n = A lam^n + D lam^-n.

    ``y0``/``y1`` are the traces at indices 0 and 1 in this (possibly
    re-indexed) numbering.  Index m here is index ``offset + sign * m`` of the
    numbering the coefficients were computed in.
    """

    x: complex
    lam: complex
    A: complex
    D: complex
    y0: complex
    y1: complex
    normalized: bool = False
    offset: int = 0
    sign: int = 1

    @property
    def r(self) -> float:
        return abs(self.lam)

    @property
    def zero_coefficient(self) -> bool:
        scale = abs(self.y0) + abs(self.y1)
        tiny = 1e-14 * scale if scale > 0 else 0.0
        return abs(self.A) <= tiny or abs(self.D) <= tiny

    def original_index(self, m: int) -> int:
        return self.offset + self.sign * m


def fan_coefficients(x: complex, y0: complex, y1: complex, normalize: bool = False) -> FanCoefficients:
    """Solve A + D = y0, A lam + D / lam = y1.

    With ``normalize`` the fan is shifted (and reversed if needed) so that
    1 <= |D/A| <= |lam|.  Normalising requires |lam| > 1 and A, D != 0.
    """
    x, y0, y1 = complex(x), complex(y0), complex(y1)
    _check_not_parabolic(x)
    eig = principal_eigenvalue(x)
    lam = eig.lam
    inv = 1.0 / lam
    gap = lam - inv
    A = (y1 - inv * y0) / gap
    D = (lam * y0 - y1) / gap
    fc = FanCoefficients(x, lam, A, D, y0, y1)
    if not normalize:
        return fc
    if fc.zero_coefficient:
        raise ZeroCoefficient(f"fan of {x} has A={A}, D={D}; cannot normalise")
    if eig.r <= 1.0:
        raise EllipticVertex(f"trace {x} is elliptic; |lambda| = 1")
    return _normalize(fc)


def _normalize(fc: FanCoefficients) -> FanCoefficients:
    lam, r = fc.lam, fc.r
    A, D = fc.A, fc.D
    k = round(math.log(abs(D) / abs(A)) / (2.0 * math.log(r)))
    A, D = A * lam**k, D * lam**-k
    offset, sign = k, 1
    for _ in range(8):
        ratio = abs(D) / abs(A)
        if ratio < 1.0:
            # reverse the direction of the fan: y'_m = y_{-m}
            A, D = D, A
            offset, sign = offset, -sign
        elif ratio > r:
            A, D = A * lam, D / lam
            offset += sign
        else:
            break
    y0 = A + D
    y1 = A * lam + D / lam
    return FanCoefficients(fc.x, lam, A, D, y0, y1, True, offset, sign)


def neighbor_trace(fc: FanCoefficients, n: int) -> complex:
    """A lam^n + D lam^-n; indices 0 and 1 return the stored traces exactly."""
    if n == 0:
        return fc.y0
    if n == 1:
        return fc.y1
    logr = math.log(fc.r) if fc.r > 0 else 0.0
    mags = []
    if fc.A != 0:
        mags.append(math.log(abs(fc.A)) + n * logr)
    if fc.D != 0:
        mags.append(math.log(abs(fc.D)) - n * logr)
    if mags and max(mags) > LOG_SATURATION:
        raise MagnitudeOverflow(
            f"|y_{n}| exceeds {SATURATION:g}", max(mags) / math.log(10.0)
        )
    lam = fc.lam
    return fc.A * lam**n + fc.D * lam ** (-n)


def neighbor_recurrence(x: complex, y0: complex, y1: complex, n: int) -> complex:
    """y_n from the three-term recurrence y_{k+1} = x y_k - y_{k-1}."""
    if n >= 0:
        prev, cur = y0, y1
        if n == 0:
            return y0
        for _ in range(n - 1):
            prev, cur = cur, x * cur - prev
        return cur
    prev, cur = y1, y0
    for _ in range(-n):
        prev, cur = cur, x * cur - prev
    return cur
