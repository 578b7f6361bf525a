"""Command-line interface.

Every command prints one JSON document on stdout with a ``config`` echo of the
effective settings (including ``argv``) and a ``result``; diagnostics go to
stderr.  Complex values are written ``RE,IM``; pass negative ones as
``--x=-1,0`` so they are not mistaken for options.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .algebra import CharacterTriple, format_complex, matrix_lift, parse_complex, solve_third_trace
from .bq import DEFAULT_BUDGET, MAX_THRESHOLD, Verdict, bq_classify, classify_with_reduction
from .errors import DegenerateEigenvalue, InvalidTriple, LayerOutOfRange, SpecInvalid
from .reduction import DEFAULT_MAX_STEPS, ReductionStatus, reduce_trace, reduction_experiment
from .scan import SliceSpec, default_workers, render_ppm, scan_metadata, scan_slice, write_csv

EXIT_OK = 0
EXIT_NOT_BQ = 1
EXIT_UNKNOWN = 2
EXIT_NO_DECREASE = 3
EXIT_DEGENERATE = 3
EXIT_STEP_LIMIT = 4
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NO_INPUT = 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _complex_arg(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}") from None


def _triple_args(p: argparse.ArgumentParser, branch: bool = True) -> None:
    p.add_argument("--x", type=_complex_arg, required=True, metavar="RE,IM")
    p.add_argument("--y", type=_complex_arg, required=True, metavar="RE,IM")
    p.add_argument("--z", type=_complex_arg, metavar="RE,IM", help="omit to solve for z")
    if branch:
        p.add_argument("--branch", choices=("plus", "minus"), default="plus")


def _triple(args) -> CharacterTriple:
    if args.z is not None:
        return CharacterTriple(args.x, args.y, args.z)
    plus, minus = solve_third_trace(args.x, args.y)
    return CharacterTriple(args.x, args.y, plus if getattr(args, "branch", "plus") == "plus" else minus)


def _config(args, argv, **extra) -> dict:
    cfg = {"command": args.command, "version": __version__, "argv": list(argv)}
    for key, value in sorted(vars(args).items()):
        if key in ("command", "func"):
            continue
        if isinstance(value, complex):
            value = format_complex(value)
        elif isinstance(value, Path):
            value = str(value)
        cfg[key] = value
    cfg.update(extra)
    return cfg


def _emit(config: dict, result) -> None:
    json.dump({"config": config, "result": result}, sys.stdout, indent=2)
    sys.stdout.write("\n")


def _triple_dict(t: CharacterTriple) -> dict:
    return {"x": format_complex(t.x), "y": format_complex(t.y), "z": format_complex(t.z)}


def cmd_classify(args, argv) -> int:
    t = _triple(args)
    if args.with_reduction:
        c = classify_with_reduction(t, args.threshold, args.budget)
    else:
        c = bq_classify(t, args.threshold, args.budget)
    result = {"triple": _triple_dict(t), **c.to_dict()}
    _emit(_config(args, argv), result)
    return {Verdict.BQ: EXIT_OK, Verdict.NOT_BQ: EXIT_NOT_BQ, Verdict.UNKNOWN: EXIT_UNKNOWN}[c.verdict]


def cmd_reduce(args, argv) -> int:
    t = _triple(args)
    outcome = reduce_trace(t, threshold=args.threshold, max_steps=args.max_steps)
    _emit(_config(args, argv), outcome.to_dict())
    return {
        ReductionStatus.REACHED_REAL_INTERVAL: EXIT_OK,
        ReductionStatus.REACHED_FLOOR: EXIT_OK,
        ReductionStatus.NO_DECREASE: EXIT_NO_DECREASE,
        ReductionStatus.STEP_LIMIT: EXIT_STEP_LIMIT,
    }[outcome.status]


def _matrix(m: np.ndarray) -> list[list[str]]:
    return [[format_complex(v) for v in row] for row in m]


def cmd_lift(args, argv) -> int:
    t = _triple(args)
    pair = matrix_lift(t)
    result = {
        "triple": _triple_dict(t),
        "X": _matrix(pair.mX),
        "Y": _matrix(pair.mY),
        "commutator_trace": format_complex(
            np.trace(pair.mX @ pair.mY @ np.linalg.inv(pair.mX) @ np.linalg.inv(pair.mY))
        ),
        "residuals": {k: float(v) for k, v in pair.residuals(t).items()},
    }
    _emit(_config(args, argv), result)
    return EXIT_OK


def cmd_experiment(args, argv) -> int:
    if args.samples < 0:
        raise UsageError("--samples must be >= 0")
    workers = args.workers or default_workers()
    report = reduction_experiment(args.samples, args.seed, workers=workers, max_steps=args.max_steps)
    _emit(_config(args, argv, workers=workers), report.to_dict())
    return EXIT_OK


_INLINE = ("fixed", "fixed_value", "varied", "center", "width", "height", "nx", "ny")


def _load_spec(args) -> SliceSpec:
    if args.spec is not None:
        if any(getattr(args, k) is not None for k in _INLINE):
            raise UsageError("--spec cannot be combined with inline slice flags")
        try:
            text = Path(args.spec).read_text(encoding="utf-8")
        except OSError as exc:
            raise FileNotFoundError(f"cannot read spec {args.spec}: {exc.strerror}") from None
        data = SliceSpec.from_json(text).to_dict()
        # explicit overrides of the non-geometric fields
        for key in ("branch", "threshold", "budget"):
            if getattr(args, key) is not None:
                data[key] = getattr(args, key)
        return SliceSpec.from_dict(data)
    missing = [k for k in _INLINE if getattr(args, k) is None]
    if missing:
        raise UsageError("missing slice flags: " + ", ".join("--" + k.replace("_", "-") for k in missing))
    return SliceSpec(
        fixed_coordinate=args.fixed,
        fixed_value=args.fixed_value,
        varied_coordinate=args.varied,
        center=args.center,
        width=args.width,
        height=args.height,
        nx=args.nx,
        ny=args.ny,
        branch=args.branch or "Both",
        threshold=MAX_THRESHOLD if args.threshold is None else args.threshold,
        budget=DEFAULT_BUDGET if args.budget is None else args.budget,
    )


def _ppm_paths(path: Path, names, layer):
    if layer == "all":
        if len(names) == 1:
            return [(0, path)]
        return [(i, path.with_name(f"{path.stem}.{n}{path.suffix}")) for i, n in enumerate(names)]
    try:
        index = int(layer)
    except ValueError:
        raise UsageError(f"--layer must be an integer or 'all', got {layer!r}") from None
    return [(index, path)]


def cmd_scan(args, argv) -> int:
    spec = _load_spec(args)
    outputs = [p for p in (args.out_ppm, args.out_csv, args.out_meta) if p is not None]
    for p in outputs:
        if not Path(p).parent.is_dir():
            raise FileNotFoundError(f"output directory for {p} does not exist")
    workers = args.workers or default_workers()
    result = scan_slice(spec, workers=workers)
    try:
        if args.out_ppm is not None:
            for index, path in _ppm_paths(Path(args.out_ppm), result.layer_names, args.layer):
                path.write_bytes(render_ppm(result, index))
        if args.out_csv is not None:
            Path(args.out_csv).write_bytes(write_csv(result))
        meta = scan_metadata(result, argv)
        meta["config"] = _config(args, argv, workers=workers)
        if args.out_meta is not None:
            Path(args.out_meta).write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FileNotFoundError(f"cannot write output: {exc}") from None
    summary = {}
    for name, cells in zip(result.layer_names, result.layers):
        counts: dict[str, int] = {}
        for c in cells:
            counts[c.color_key] = counts.get(c.color_key, 0) + 1
        summary[name] = dict(sorted(counts.items()))
    _emit(meta["config"], {"metadata": {k: v for k, v in meta.items() if k != "config"}, "counts": summary})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bowditch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="decide the BQ-conditions for one character")
    _triple_args(p)
    p.add_argument("--threshold", type=float, default=MAX_THRESHOLD)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--with-reduction", action="store_true", help="run the trace reduction first")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("reduce", help="run the trace reduction sequence")
    _triple_args(p)
    p.add_argument("--threshold", type=float, default=MAX_THRESHOLD)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("lift", help="print an SL(2,C) lift with X diagonal")
    _triple_args(p)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("experiment", help="sampled reduction experiment")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--max-steps", type=int, default=DEFAULT_MAX_STEPS)
    p.add_argument("--workers", type=int, help="default: $BOWDITCH_WORKERS or CPU count")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("scan", help="classify a 2D slice and write PPM/CSV")
    p.add_argument("--spec", type=Path, help="SliceSpec JSON file")
    p.add_argument("--fixed", choices=("X", "Y", "Z"))
    p.add_argument("--fixed-value", type=_complex_arg, metavar="RE,IM")
    p.add_argument("--varied", choices=("X", "Y", "Z"))
    p.add_argument("--center", type=_complex_arg, metavar="RE,IM")
    p.add_argument("--width", type=float)
    p.add_argument("--height", type=float)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    p.add_argument("--branch", choices=("Plus", "Minus", "Both"))
    p.add_argument("--threshold", type=float)
    p.add_argument("--budget", type=int)
    p.add_argument("--out-ppm", type=Path)
    p.add_argument("--out-csv", type=Path)
    p.add_argument("--out-meta", type=Path, help="metadata JSON path")
    p.add_argument("--layer", default="all", help="layer index for the PPM, or 'all' (default)")
    p.add_argument("--workers", type=int, help="default: $BOWDITCH_WORKERS or CPU count")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args, argv)
    except InvalidTriple as exc:
        print(f"bowditch: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DegenerateEigenvalue as exc:
        print(f"bowditch: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except FileNotFoundError as exc:
        print(f"bowditch: {exc}", file=sys.stderr)
        return EXIT_NO_INPUT
    except (UsageError, SpecInvalid, LayerOutOfRange, ValueError) as exc:
        print(f"bowditch: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
