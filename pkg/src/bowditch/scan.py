"""Rasterize 2D slices of the variety into per-cell classifications.

A slice fixes one trace coordinate, varies a second over a rectangle of the
complex plane (sampled at cell centers) and solves the third from the cubic.
The cubic is quadratic in the third coordinate, so each cell has two sheets;
``branch`` selects one or both of them as layers.
"""
from __future__ import annotations

import csv
import io
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from ._version import __version__
from .algebra import COORDINATES, CharacterTriple, format_complex, parse_complex, solve_third_trace
from .bq import MAX_THRESHOLD, bq_classify
from .errors import LayerOutOfRange, SpecInvalid

MAX_CELLS = 10**8
BRANCHES = ("Plus", "Minus", "Both")
CSV_HEADER = "re,im,branch,verdict,witness_kind,low_trace_count,budget_spent"
ERROR_VERDICT = "Error"

DEFAULT_PALETTE: dict[str, tuple[int, int, int]] = {
    "BQ": (255, 255, 255),
    "SmallTrace": (0, 0, 0),
    "RealTrace": (96, 96, 96),
    "Unknown": (200, 32, 32),
    ERROR_VERDICT: (200, 32, 32),
}


@dataclass(frozen=True)
class SliceSpec:
    fixed_coordinate: str
    fixed_value: complex
    varied_coordinate: str
    center: complex
    width: float
    height: float
    nx: int
    ny: int
    branch: str = "Both"
    threshold: float = MAX_THRESHOLD
    budget: int = 10_000

    def __post_init__(self):
        fixed = str(self.fixed_coordinate).upper()
        varied = str(self.varied_coordinate).upper()
        if fixed not in COORDINATES or varied not in COORDINATES:
            raise SpecInvalid("coordinates must be X, Y or Z")
        if fixed == varied:
            raise SpecInvalid("varied_coordinate must differ from fixed_coordinate")
        branch = str(self.branch).capitalize()
        if branch not in BRANCHES:
            raise SpecInvalid(f"branch must be one of {', '.join(BRANCHES)}")
        for name in ("nx", "ny", "budget"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise SpecInvalid(f"{name} must be a positive integer, got {v!r}")
        if self.nx * self.ny > MAX_CELLS:
            raise SpecInvalid(f"grid has {self.nx * self.ny} cells; the limit is {MAX_CELLS}")
        try:
            width, height, threshold = float(self.width), float(self.height), float(self.threshold)
            fixed_value, center = complex(self.fixed_value), complex(self.center)
        except (TypeError, ValueError) as exc:
            raise SpecInvalid(str(exc)) from None
        if not (width > 0 and height > 0):
            raise SpecInvalid("width and height must be positive")
        if not 0.0 < threshold <= MAX_THRESHOLD:
            raise SpecInvalid(f"threshold must lie in (0, {MAX_THRESHOLD}]")
        for name, value in (
            ("fixed_coordinate", fixed),
            ("varied_coordinate", varied),
            ("branch", branch),
            ("width", width),
            ("height", height),
            ("threshold", threshold),
            ("fixed_value", fixed_value),
            ("center", center),
        ):
            object.__setattr__(self, name, value)

    @property
    def layers(self) -> tuple[str, ...]:
        return ("plus", "minus") if self.branch == "Both" else (self.branch.lower(),)

    def to_dict(self) -> dict:
        return {
            "fixed_coordinate": self.fixed_coordinate,
            "fixed_value": format_complex(self.fixed_value),
            "varied_coordinate": self.varied_coordinate,
            "center": format_complex(self.center),
            "width": self.width,
            "height": self.height,
            "nx": self.nx,
            "ny": self.ny,
            "branch": self.branch,
            "threshold": self.threshold,
            "budget": self.budget,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SliceSpec":
        known = set(cls.__dataclass_fields__)
        extra = set(data) - known
        if extra:
            raise SpecInvalid(f"unknown spec fields: {', '.join(sorted(extra))}")
        kwargs = dict(data)
        try:
            for key in ("fixed_value", "center"):
                if key in kwargs and isinstance(kwargs[key], str):
                    kwargs[key] = parse_complex(kwargs[key])
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SpecInvalid):
                raise
            raise SpecInvalid(str(exc)) from None

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SliceSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecInvalid(f"spec is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise SpecInvalid("spec must be a JSON object")
        return cls.from_dict(data)


def grid_points(spec: SliceSpec) -> list[complex]:
    """Cell centers in row-major order; row 0 has the largest imaginary part."""
    x0 = spec.center.real - spec.width / 2.0
    y1 = spec.center.imag + spec.height / 2.0
    dx, dy = spec.width / spec.nx, spec.height / spec.ny
    return [
        complex(x0 + (i + 0.5) * dx, y1 - (j + 0.5) * dy)
        for j in range(spec.ny)
        for i in range(spec.nx)
    ]


def cell_triple(spec: SliceSpec, value: complex, layer: str) -> CharacterTriple:
    fixed = COORDINATES.index(spec.fixed_coordinate)
    varied = COORDINATES.index(spec.varied_coordinate)
    plus, minus = solve_third_trace(spec.fixed_value, value)
    traces = [0j, 0j, 0j]
    traces[fixed] = spec.fixed_value
    traces[varied] = value
    traces[3 - fixed - varied] = plus if layer == "plus" else minus
    return CharacterTriple(*traces)


@dataclass(frozen=True)
class Cell:
    verdict: str
    witness_kind: str | None = None
    low_trace_count: int = 0
    budget_spent: int = 0
    error: str | None = None

    @property
    def color_key(self) -> str:
        if self.verdict == "NotBQ" and self.witness_kind:
            return self.witness_kind
        return self.verdict

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness_kind": self.witness_kind,
            "low_trace_count": self.low_trace_count,
            "budget_spent": self.budget_spent,
            "error": self.error,
        }


def default_classifier(t: CharacterTriple, threshold: float, budget: int):
    return bq_classify(t, threshold, budget)


def _evaluate(args) -> Cell:
    spec, value, layer, classifier = args
    try:
        c = classifier(cell_triple(spec, value, layer), spec.threshold, spec.budget)
    except Exception as exc:  # recorded per cell, never fatal
        return Cell(ERROR_VERDICT, error=f"{type(exc).__name__}: {exc}")
    kind = c.witness.kind.value if c.witness else None
    return Cell(c.verdict.value, kind, c.low_trace_count, c.budget_spent)


@dataclass(frozen=True)
class ScanResult:
    spec: SliceSpec
    layers: tuple[tuple[Cell, ...], ...]
    layer_names: tuple[str, ...]
    wall_seconds: float = field(default=0.0, compare=False)
    workers: int = field(default=1, compare=False)

    def to_dict(self) -> dict:
        """Deterministic content; timing lives in :func:`scan_metadata`."""
        return {
            "spec": self.spec.to_dict(),
            "layers": {
                name: [c.to_dict() for c in cells] for name, cells in zip(self.layer_names, self.layers)
            },
        }

    def to_bytes(self) -> bytes:
        return json.dumps(self.to_dict(), sort_keys=True).encode()


def default_workers() -> int:
    env = os.environ.get("BOWDITCH_WORKERS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise SpecInvalid(f"BOWDITCH_WORKERS must be an integer, got {env!r}") from None
        if n < 1:
            raise SpecInvalid("BOWDITCH_WORKERS must be >= 1")
        return n
    return os.cpu_count() or 1


def scan_slice(
    spec: SliceSpec,
    workers: int | None = None,
    classifier: Callable = default_classifier,
) -> ScanResult:
    """Classify every cell of every requested layer.

    Results are assembled by cell index, so the output does not depend on the
    worker count.  ``classifier`` must be picklable when ``workers > 1``.
    """
    if not isinstance(spec, SliceSpec):
        raise SpecInvalid("scan_slice expects a SliceSpec")
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise SpecInvalid("workers must be >= 1")
    start = time.perf_counter()
    points = grid_points(spec)
    jobs = [(spec, v, layer, classifier) for layer in spec.layers for v in points]
    if workers == 1 or len(jobs) < 2:
        cells = [_evaluate(j) for j in jobs]
    else:
        chunk = max(1, len(jobs) // (workers * 16))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_evaluate, jobs, chunksize=chunk))
    n = len(points)
    layers = tuple(tuple(cells[k * n : (k + 1) * n]) for k in range(len(spec.layers)))
    return ScanResult(spec, layers, spec.layers, time.perf_counter() - start, workers)


def render_ppm(result: ScanResult, layer: int = 0, palette: Mapping | None = None) -> bytes:
    if not 0 <= layer < len(result.layers):
        raise LayerOutOfRange(f"layer {layer} not in range [0, {len(result.layers)})")
    colors = dict(DEFAULT_PALETTE)
    if palette:
        colors.update(palette)
    spec = result.spec
    body = bytearray()
    for cell in result.layers[layer]:
        body.extend(bytes(colors[cell.color_key]))
    return f"P6\n{spec.nx} {spec.ny}\n255\n".encode("ascii") + bytes(body)


def write_csv(result: ScanResult) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    points = grid_points(result.spec) if result.layers else []
    for name, cells in zip(result.layer_names, result.layers):
        for v, c in zip(points, cells):
            writer.writerow(
                [repr(v.real), repr(v.imag), name, c.verdict, c.witness_kind or "", c.low_trace_count, c.budget_spent]
            )
    return buf.getvalue().encode("utf-8")


def scan_metadata(result: ScanResult, argv: Sequence[str] | None = None) -> dict:
    meta = {
        "spec": result.spec.to_dict(),
        "version": __version__,
        "wall_seconds": result.wall_seconds,
        "workers": result.workers,
        "layers": list(result.layer_names),
    }
    if argv is not None:
        meta["argv"] = list(argv)
    return meta
