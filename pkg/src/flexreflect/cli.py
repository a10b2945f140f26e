"""Command-line driver: ``flexreflect <subcommand> --scenario FILE [--out FILE]``.

Every subcommand writes CSV: one ``#`` metadata line, a header row with
units, then data rows. Output depends only on the scenario bytes and flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from typing import Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .coverage import (
    BenchmarkScheme,
    benchmark_poses,
    empirical_cdf,
    evaluate_field,
    median_power,
    min_power,
    to_display_dbm,
)
from .errors import GeometryError, PlannerError
from .fr import (
    default_search_interval,
    fr_single_target,
    multi_fr_single_target,
    sequential_fr_area,
    single_fr_area,
)
from .geometry import Point, ReflectorPose, TargetArea
from .link_budget import path_gain, receive_power
from .mr import (
    multi_mr_single_target,
    sequential_mr_area_placement,
    single_mr_area_placement,
    small_reflector_placement,
    specular_placement,
)
from .scenario import ScenarioError, ScenarioFile, parse_scenario

SUBCOMMANDS = (
    "sweep-mr", "sweep-fr", "single-target", "area-mr", "area-fr", "plan-mr",
    "plan-fr", "gain-map", "cdf", "region-sweep", "benchmarks",
)

POSE_COLUMNS = ["index", "x_m", "omega_rad", "omega_deg",
                "lobe_left_x_m", "lobe_left_y_m", "lobe_right_x_m", "lobe_right_y_m"]

EXIT_USAGE = 2
EXIT_SCENARIO = 3

DEFAULT_SWEEP_STEP = 0.5
DEFAULT_OMEGA_STEP_DEG = 1.0


class Table:
    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        self.rows: List[List[str]] = []

    def add(self, *values) -> None:
        self.rows.append([_fmt(v) for v in values])


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _deg(rad: float) -> str:
    return f"{math.degrees(rad):.2f}"


class Context:
    def __init__(self, sc: ScenarioFile, args: argparse.Namespace):
        self.sc = sc
        self.args = args
        self.grid_step = args.grid_step or sc.options.grid_step_m
        self.search_step = args.search_step or sc.options.search_step_m
        self.threads = args.threads

    @property
    def tx(self) -> Point:
        return self.sc.tx

    def point(self) -> Point:
        if self.sc.is_area:
            raise ScenarioError("this subcommand needs a point target", "target")
        return self.sc.target

    def area(self) -> TargetArea:
        if not self.sc.is_area:
            raise ScenarioError("this subcommand needs an area target", "target")
        return self.sc.target

    def dbm(self, watts: float) -> float:
        return to_display_dbm(watts)


def _pose_rows(table: Table, poses, lobes) -> None:
    for i, p in enumerate(poses, start=1):
        left, right = lobes[i - 1] if lobes else (None, None)
        table.add(i, p.x, p.omega, _deg(p.omega),
                  left.x if left else None, left.y if left else None,
                  right.x if right else None, right.y if right else None)


def cmd_sweep_mr(ctx: Context) -> Table:
    r = ctx.point()
    lo, hi = default_search_interval(ctx.tx, r.x, r.x)
    step = ctx.args.search_step or DEFAULT_SWEEP_STEP
    t = Table(["x_m", "power_w", "power_dbm"])
    for x in np.arange(lo, hi + step / 2, step):
        p = receive_power(ctx.sc.link, [ReflectorPose(float(x), 0.0)], r)
        t.add(float(x), p, ctx.dbm(p))
    return t


def cmd_sweep_fr(ctx: Context) -> Table:
    r = ctx.point()
    lo, hi = default_search_interval(ctx.tx, r.x, r.x)
    step = ctx.args.search_step or DEFAULT_SWEEP_STEP
    w_step = math.radians(ctx.args.omega_step_deg)
    omegas = np.arange(-math.pi / 2 + w_step, math.pi / 2, w_step)
    t = Table(["x_m", "omega_rad", "omega_deg", "power_w", "power_dbm"])
    for x in np.arange(lo, hi + step / 2, step):
        for w in omegas:
            p = receive_power(ctx.sc.link, [ReflectorPose(float(x), float(w))], r)
            t.add(float(x), float(w), _deg(w), p, ctx.dbm(p))
    return t


def cmd_single_target(ctx: Context) -> Table:
    r = ctx.point()
    dims, link = ctx.sc.dims, ctx.sc.link
    m = ctx.sc.options.max_reflectors
    designs = [
        ("mr_specular", [ReflectorPose(specular_placement(ctx.tx, r), 0.0)]),
        ("mr_small_plate", [ReflectorPose(small_reflector_placement(ctx.tx, r), 0.0)]),
        ("fr_single", [fr_single_target(ctx.tx, r, search_step=ctx.search_step)]),
        ("mr_multi", multi_mr_single_target(ctx.tx, r, dims, m).poses),
        ("fr_multi", multi_fr_single_target(ctx.tx, r, dims, m, search_step=ctx.search_step).poses),
    ]
    t = Table(["scheme", "index", "x_m", "omega_rad", "omega_deg", "power_w", "power_dbm",
               "scheme_power_w", "scheme_power_dbm"])
    for name, poses in designs:
        total = receive_power(link, poses, r)
        for i, p in enumerate(poses, start=1):
            pw = link.power_scale * path_gain(ctx.tx, p, r, dims)
            t.add(name, i, p.x, p.omega, _deg(p.omega), pw, ctx.dbm(pw), total, ctx.dbm(total))
    return t


def _area_summary_table() -> Table:
    return Table(["scheme", "index", "x_m", "omega_rad", "omega_deg", "worst_case_array_factor",
                  "min_power_w", "min_power_dbm"])


def cmd_area_mr(ctx: Context) -> Table:
    area = ctx.area()
    sol = single_mr_area_placement(ctx.tx, area, ctx.sc.dims, ctx.search_step)
    field = evaluate_field(ctx.sc.link, sol.poses, area, ctx.grid_step, ctx.threads)
    t = _area_summary_table()
    p = sol.poses[0]
    mp = min_power(field).power
    t.add("mr_area", 1, p.x, p.omega, _deg(p.omega), sol.worst_case_metric, mp, ctx.dbm(mp))
    return t


def cmd_area_fr(ctx: Context) -> Table:
    from .fr import fr_area_worst_case

    area = ctx.area()
    pose = single_fr_area(ctx.tx, area, ctx.sc.dims, search_step=ctx.search_step)
    _, wc = fr_area_worst_case(ctx.tx, pose.x, area, ctx.sc.dims)
    field = evaluate_field(ctx.sc.link, [pose], area, ctx.grid_step, ctx.threads)
    t = _area_summary_table()
    mp = min_power(field).power
    t.add("fr_area", 1, pose.x, pose.omega, _deg(pose.omega), wc, mp, ctx.dbm(mp))
    return t


def cmd_plan_mr(ctx: Context) -> Table:
    sol = sequential_mr_area_placement(ctx.tx, ctx.area(), ctx.sc.dims, metric_step=ctx.grid_step)
    t = Table(POSE_COLUMNS)
    _pose_rows(t, sol.poses, sol.per_reflector_lobes)
    return t


def cmd_plan_fr(ctx: Context) -> Table:
    plan = sequential_fr_area(ctx.tx, ctx.area(), ctx.sc.dims, search_step=ctx.search_step,
                              metric_step=ctx.grid_step)
    t = Table(POSE_COLUMNS)
    _pose_rows(t, plan.poses, plan.lobe_anchors)
    return t


def _area_designs(ctx: Context) -> Dict[str, List[ReflectorPose]]:
    area, dims = ctx.area(), ctx.sc.dims
    mr = sequential_mr_area_placement(ctx.tx, area, dims).poses
    fr = sequential_fr_area(ctx.tx, area, dims, search_step=ctx.search_step).poses
    return {
        "plan_mr": mr,
        "plan_fr": fr,
        "equal_spacing_mr": benchmark_poses(BenchmarkScheme("equal_spacing_mr", count=len(mr)),
                                            ctx.tx, dims, area),
        "equal_spacing_fr": benchmark_poses(BenchmarkScheme("equal_spacing_fr", count=len(fr)),
                                            ctx.tx, dims, area),
    }


def cmd_gain_map(ctx: Context) -> Table:
    area = ctx.area()
    designs = _area_designs(ctx)
    t = Table(["scheme", "x_m", "y_m", "reflection_gain", "power_w", "power_dbm"])
    for name in ctx.args.schemes:
        field = evaluate_field(ctx.sc.link, designs[name], area, ctx.grid_step, ctx.threads)
        dbm = to_display_dbm(field.power)
        for x, y, g, p, d in zip(field.x, field.y, field.gain, field.power, dbm):
            t.add(name, x, y, g, p, d)
    return t


def cmd_cdf(ctx: Context) -> Table:
    area = ctx.area()
    designs = _area_designs(ctx)
    t = Table(["scheme", "power_dbm", "probability_i_over_n"])
    for name in ctx.args.schemes:
        field = evaluate_field(ctx.sc.link, designs[name], area, ctx.grid_step, ctx.threads)
        for dbm, prob in empirical_cdf(field):
            t.add(name, dbm, prob)
    return t


def cmd_region_sweep(ctx: Context) -> Table:
    r = ctx.point()
    dims, link = ctx.sc.dims, ctx.sc.link
    s_max = ctx.sc.options.region_size_m
    sizes = np.linspace(0.0, s_max, int(ctx.args.region_points))
    t = Table(["region_size_m", "fpr_dbm", "fprr_dbm", "mr_dbm", "fr_dbm",
               "fpr_w", "fprr_w", "mr_w", "fr_w"])
    for s in sizes:
        watts = []
        for kind in ("fpr", "fprr", "movable_region_mr", "movable_region_fr"):
            scheme = BenchmarkScheme(kind, region_size=float(s))
            watts.append(receive_power(link, benchmark_poses(scheme, ctx.tx, dims, r, ctx.search_step), r))
        t.add(float(s), *[ctx.dbm(w) for w in watts], *watts)
    return t


def cmd_benchmarks(ctx: Context) -> Table:
    dims, link = ctx.sc.dims, ctx.sc.link
    if not ctx.sc.is_area:
        r = ctx.point()
        s = ctx.sc.options.region_size_m
        designs = {
            "fpr": benchmark_poses(BenchmarkScheme("fpr"), ctx.tx, dims, r),
            "fprr": benchmark_poses(BenchmarkScheme("fprr"), ctx.tx, dims, r),
            "movable_region_mr": benchmark_poses(BenchmarkScheme("movable_region_mr", region_size=s),
                                                 ctx.tx, dims, r, ctx.search_step),
            "movable_region_fr": benchmark_poses(BenchmarkScheme("movable_region_fr", region_size=s),
                                                 ctx.tx, dims, r, ctx.search_step),
            "mr_specular": [ReflectorPose(specular_placement(ctx.tx, r), 0.0)],
            "fr_single": [fr_single_target(ctx.tx, r, search_step=ctx.search_step)],
        }
        t = Table(["scheme", "n_reflectors", "power_w", "power_dbm"])
        for name, poses in designs.items():
            p = receive_power(link, poses, r)
            t.add(name, len(poses), p, ctx.dbm(p))
        return t

    area = ctx.area()
    designs = _area_designs(ctx)
    designs["single_mr"] = single_mr_area_placement(ctx.tx, area, dims, ctx.search_step).poses
    designs["single_fr"] = [single_fr_area(ctx.tx, area, dims, search_step=ctx.search_step)]
    designs["fpr"] = benchmark_poses(BenchmarkScheme("fpr"), ctx.tx, dims, area)
    designs["fprr"] = benchmark_poses(BenchmarkScheme("fprr"), ctx.tx, dims, area)
    t = Table(["scheme", "n_reflectors", "min_power_w", "min_power_dbm", "median_power_w",
               "median_power_dbm", "min_reflection_gain"])
    for name, poses in designs.items():
        field = evaluate_field(link, poses, area, ctx.grid_step, ctx.threads)
        mp, med = min_power(field).power, median_power(field)
        t.add(name, len(poses), mp, ctx.dbm(mp), med, ctx.dbm(med), float(field.gain.min()))
    return t


COMMANDS: Dict[str, Callable[[Context], Table]] = {
    "sweep-mr": cmd_sweep_mr,
    "sweep-fr": cmd_sweep_fr,
    "single-target": cmd_single_target,
    "area-mr": cmd_area_mr,
    "area-fr": cmd_area_fr,
    "plan-mr": cmd_plan_mr,
    "plan-fr": cmd_plan_fr,
    "gain-map": cmd_gain_map,
    "cdf": cmd_cdf,
    "region-sweep": cmd_region_sweep,
    "benchmarks": cmd_benchmarks,
}

AREA_SCHEMES = ("plan_mr", "plan_fr", "equal_spacing_mr", "equal_spacing_fr")


def render(table: Table, meta: str) -> str:
    buf = io.StringIO()
    buf.write(f"# {meta}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    w.writerows(table.rows)
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="YAML scenario file")
    common.add_argument("--out", help="output CSV path (default: stdout)")
    common.add_argument("--grid-step", type=float, help="area sampling step in meters")
    common.add_argument("--search-step", type=float, help="1-D placement search step in meters")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized checks (default 0)")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker threads for field evaluation")
    common.add_argument("--format", choices=["csv"], default="csv")

    parser = argparse.ArgumentParser(prog="flexreflect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"flexreflect {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")
    sub.required = True
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common], help=COMMANDS[name].__name__[4:].replace("_", " "))
        if name == "sweep-fr":
            p.add_argument("--omega-step-deg", type=float, default=DEFAULT_OMEGA_STEP_DEG)
        if name in ("gain-map", "cdf"):
            p.add_argument("--schemes", nargs="+", choices=AREA_SCHEMES, default=list(AREA_SCHEMES))
        if name == "region-sweep":
            p.add_argument("--region-points", type=int, default=11)
    return parser


def _fail(code: str, msg: str, status: int) -> int:
    print(f"error[{code}]: {msg}", file=sys.stderr)
    return status


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return int(exc.code or 0)
    for flag in ("grid_step", "search_step"):
        val = getattr(args, flag)
        if val is not None and val <= 0:
            return _fail("usage", f"--{flag.replace('_', '-')} must be positive", EXIT_USAGE)
    if args.threads < 1:
        return _fail("usage", "--threads must be at least 1", EXIT_USAGE)

    try:
        sc = parse_scenario(args.scenario)
        ctx = Context(sc, args)
        table = COMMANDS[args.command](ctx)
    except FileNotFoundError as exc:
        return _fail("scenario", str(exc), EXIT_SCENARIO)
    except ScenarioError as exc:
        return _fail("scenario", str(exc), EXIT_SCENARIO)
    except PlannerError as exc:
        return _fail(exc.code, str(exc), exc.exit_status)
    except GeometryError as exc:
        return _fail("geometry", str(exc), EXIT_SCENARIO)

    meta = (f"flexreflect {__version__} subcommand={args.command} scenario_sha256={sc.digest} "
            f"grid_step={_fmt(ctx.grid_step)} search_step={_fmt(ctx.search_step)} seed={args.seed} "
            f"cdf_probability=i/N dbm_floor=-130")
    text = render(table, meta)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
