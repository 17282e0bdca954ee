"""Command line: ``storysets render | metrics | bench``.

Exit codes: 0 ok, 1 input error, 2 exact-solver capacity error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import io as sio
from .bench import BenchGrid, run_bench, write_csv
from .element_order import DEFAULT_ITERATIONS, Solver, Strategy, order_elements
from .layout import LayoutConfig, build_scene
from .metrics import compute_metrics
from .render import render_svg
from .tsp import DEFAULT_MAX_VERTICES, CapacityError

EXIT_INPUT = 1
EXIT_CAPACITY = 2

_GLYPHS = {"stacked": "stacked_width", "colored": "colored_uniform"}
_HEIGHTS = {"uniform": "uniform", "local": "local_count", "distribution": "given_distribution"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    if ":" in text:
        start, stop, *step = (int(v) for v in text.split(":"))
        return list(range(start, stop + 1, step[0] if step else 1))
    return [int(v) for v in text.split(",") if v.strip()]


def _add_ordering(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="CSV or JSON set system")
    p.add_argument("--layout", choices=["storyline", "star"], default="storyline")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default=Strategy.UPPER_BOUND.value)
    p.add_argument("--tsp", choices=[s.value for s in Solver], default=Solver.EXACT.value)
    p.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-cap", type=int, default=DEFAULT_MAX_VERTICES,
                   help="largest vertex count the exact TSP solver accepts")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--levels", type=_floats, help="CSV only: comma-separated uncertainty levels")
    group.add_argument("--boundaries", type=_floats, help="CSV only: comma-separated bin boundaries")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="storysets", description="Order and draw uncertain set systems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    render = sub.add_parser("render", help="write an SVG and print metrics as JSON")
    _add_ordering(render)
    render.add_argument("--glyph", choices=list(_GLYPHS), default="stacked")
    render.add_argument("--bin-heights", choices=list(_HEIGHTS), default="uniform")
    render.add_argument("--curves", choices=["polyline", "rounded"], default="polyline")
    render.add_argument("--compact", action="store_true")
    render.add_argument("--inner-radius", type=float, default=0.3)
    render.add_argument("--scale", type=float, default=20.0)
    render.add_argument("--no-legend", action="store_true")
    render.add_argument("--out", required=True)

    metrics = sub.add_parser("metrics", help="print metrics as JSON without rendering")
    _add_ordering(metrics)

    bench = sub.add_parser("bench", help="run the benchmark grid and write CSV")
    bench.add_argument("--out", required=True)
    bench.add_argument("--n-values", type=_ints, default=list(range(5, 101, 5)),
                       help="comma list or start:stop:step (inclusive)")
    bench.add_argument("--m-values", type=_ints, default=list(range(2, 31, 2)))
    bench.add_argument("--samples", type=int, default=5)
    bench.add_argument("--strategies", default=",".join(s.value for s in Strategy))
    bench.add_argument("--solvers", default=",".join(s.value for s in Solver))
    bench.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--exact-cap", type=int, default=DEFAULT_MAX_VERTICES)
    return parser


def _order(args, ds):
    mode = "cycle" if args.layout == "star" else "path"
    if args.layout == "star" and len(ds.element_names) < 2:
        raise sio.InputError("the star layout needs at least two elements")
    start = time.perf_counter()
    res = order_elements(ds.bins, args.strategy, args.tsp, args.iterations, mode, args.seed, args.exact_cap)
    return res, (time.perf_counter() - start) * 1000.0


def _load(args):
    return sio.load(args.input, levels=args.levels, boundaries=args.boundaries)


def cmd_render(args) -> int:
    ds = _load(args)
    if args.compact and args.layout == "star":
        raise sio.InputError("--compact applies to the storyline layout only")
    if args.bin_heights == "distribution" and ds.distribution is None:
        raise sio.InputError(f"{args.input}: --bin-heights distribution needs a 'distribution' entry (JSON input)")
    res, runtime = _order(args, ds)
    try:
        config = LayoutConfig(
            layout=args.layout,
            glyph_style=_GLYPHS[args.glyph],
            bin_heights=_HEIGHTS[args.bin_heights],
            curve_style=args.curves,
            compact=args.compact,
            inner_radius=args.inner_radius,
            color_seed=args.seed,
        )
    except ValueError as exc:
        raise sio.InputError(str(exc)) from None
    scene = build_scene(ds.bins, res.layout, config, ds.element_names, ds.set_names, ds.distribution)
    render_svg(scene, args.scale, show_legend=not args.no_legend).write(args.out)
    print(json.dumps(compute_metrics(res.layout, runtime, res.iterations_used).record()))
    return 0


def cmd_metrics(args) -> int:
    ds = _load(args)
    res, runtime = _order(args, ds)
    print(json.dumps(compute_metrics(res.layout, runtime, res.iterations_used).record()))
    return 0


def cmd_bench(args) -> int:
    try:
        grid = BenchGrid(
            n_values=tuple(args.n_values),
            m_values=tuple(args.m_values),
            samples_per_cell=args.samples,
            strategies=tuple(s for s in args.strategies.split(",") if s),
            solvers=tuple(s for s in args.solvers.split(",") if s),
            seed=args.seed,
            iterations=args.iterations,
            exact_cap=args.exact_cap,
        )
    except ValueError as exc:
        raise sio.InputError(str(exc)) from None
    rows = run_bench(grid, jobs=args.jobs)
    write_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"render": cmd_render, "metrics": cmd_metrics, "bench": cmd_bench}[args.command]
    try:
        return handler(args)
    except sio.InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityError as exc:
        print(f"error: {exc} (try --tsp heuristic)", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
