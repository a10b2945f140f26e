"""Acceptance suite: one PASS/FAIL line per criterion, shown in the summary.

Run with ``pytest tests/test_acceptance.py -s`` to also see the lines inline.
"""

import math
import time

import numpy as np

from flexreflect.coverage import (
    BenchmarkScheme,
    benchmark_poses,
    evaluate_field,
    median_power,
    worst_case_power_single,
)
from flexreflect.fr import (
    blockage_min_distance,
    optimal_rotation,
    reduced_fr_objective,
    sequential_fr_area,
)
from flexreflect.geometry import (
    Point,
    ReflectorDims,
    ReflectorPose,
    TargetArea,
    delta_field,
    deflection,
    eta_factor,
    projection_delta,
    rotation_basis,
    same_side,
)
from flexreflect.link_budget import (
    LinkBudgetConfig,
    array_factor,
    dbm_to_watts,
    monte_carlo_incoherent_power,
    path_gain,
    receive_power,
)
from flexreflect.mr import (
    delta_extrema_area,
    has_null,
    multi_mr_single_target,
    path_loss_objective,
    sequential_mr_area_placement,
    small_reflector_placement,
    specular_placement,
    worst_case_array_factor,
)

from conftest import WAVELENGTH
from oracles import (
    blocked,
    incident_side_neighbour,
    path_gain_reference,
    ray_hits_segment,
    reflect_side_neighbour,
    sample_blockage_triples,
)

DIMS = ReflectorDims.from_wavelengths(10.0, 5.0, WAVELENGTH)
TX = Point(0.0, -50.0)
RX = Point(100.0, -150.0)
AREA = TargetArea(Point(100.0, -150.0), 100.0, 50.0)
LINK = LinkBudgetConfig(dbm_to_watts(30.0), DIMS, TX)


def _random_below(rng, n):
    return [Point(rng.uniform(-150.0, 150.0), rng.uniform(-200.0, -5.0)) for _ in range(n)]


def test_criterion_1_specular_closed_form(acceptance_report):
    t0 = time.perf_counter()
    x_star = specular_placement(TX, RX)
    xs = np.arange(-5000, 15001) / 100.0
    f = [path_gain_reference(tuple(TX), x, 0.0, tuple(RX), DIMS.l1, DIMS.l2, DIMS.wavelength) for x in xs]
    brute = float(xs[int(np.argmax(f))])
    err = abs(x_star - brute)
    dt = time.perf_counter() - t0
    ok = err <= 0.02 and dt < 1.0
    acceptance_report(1, ok, f"closed form {x_star:.4f} vs scan argmax {brute:.2f}, |diff| {err:.4f} <= 0.02",
                      dt, 1.0)
    assert ok


def test_criterion_2_small_plate_cubic(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        tx = Point(rng.uniform(-100.0, 100.0), rng.uniform(-150.0, -5.0))
        r = Point(rng.uniform(-100.0, 200.0), rng.uniform(-150.0, -5.0))
        x = small_reflector_placement(tx, r)
        lo, hi = min(tx.x, r.x) - 5.0, max(tx.x, r.x) + 5.0
        grid = np.arange(math.floor(lo * 100), math.ceil(hi * 100) + 1) / 100.0
        brute = grid[np.argmin(path_loss_objective(tx, r, grid))]
        worst = max(worst, abs(x - brute))
    dt = time.perf_counter() - t0
    ok = worst <= 0.02 and dt < 5.0
    acceptance_report(2, ok, f"50 random geometries, worst |root - scan argmin| {worst:.4f} <= 0.02", dt, 5.0)
    assert ok


def test_criterion_3_optimal_rotation(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    worst_delta = worst_identity = 0.0
    feasible = 0
    for _ in range(100):
        tx, r = _random_below(rng, 2)
        x = rng.uniform(-150.0, 150.0)
        pose = ReflectorPose(x, optimal_rotation(tx, x, r))
        worst_delta = max(worst_delta, abs(projection_delta(tx, pose, r)))
        feasible += same_side(tx, pose, r)
        vx, vy = deflection(tx, x, r)
        d_t, d_r = math.hypot(x - tx.x, tx.y), math.hypot(r.x - x, r.y)
        lhs = DIMS.sigma_max * eta_factor(tx, pose, r) * array_factor(0.0, DIMS.l1_bar) / (d_t**2 * d_r**2)
        rhs = DIMS.sigma_max * (vx * vx + vy * vy) / (4 * d_t**2 * d_r**2)
        worst_identity = max(worst_identity, abs(lhs - rhs) / rhs)
        worst_identity = max(worst_identity, abs(path_gain(tx, pose, r, DIMS) - rhs) / rhs)
        worst_identity = max(worst_identity, abs(DIMS.sigma_max * reduced_fr_objective(tx, x, r) - rhs) / rhs)
    dt = time.perf_counter() - t0
    ok = worst_delta <= 1e-12 and feasible == 100 and worst_identity <= 1e-9 and dt < 1.0
    acceptance_report(3, ok, f"max |Delta| {worst_delta:.1e}, same-side {feasible}/100, "
                             f"reduced-objective rel err {worst_identity:.1e}", dt, 1.0)
    assert ok


def test_criterion_4_blockage_distance(acceptance_report):
    t0 = time.perf_counter()
    flat = blockage_min_distance(DIMS, 0.0, 0.0, 0.0)
    ok_flat = flat.d_min == DIMS.l1
    rng = np.random.default_rng(4)
    clear = hit = 0
    triples = sample_blockage_triples(rng, 20)
    for theta_t, theta_r, omega in triples:
        d = blockage_min_distance(DIMS, theta_t, theta_r, omega)
        clear += not blocked(DIMS.l1, omega, theta_t, theta_r, d.d_min)
        if d.d_reflect >= d.d_incident:
            worst = reflect_side_neighbour(DIMS.l1, omega, theta_r, 0.99 * d.d_min)
        else:
            worst = incident_side_neighbour(DIMS.l1, omega, theta_t, 0.99 * d.d_min)
        hit += ray_hits_segment(*worst)
    dt = time.perf_counter() - t0
    ok = ok_flat and clear == 20 and hit == 20 and dt < 1.0
    acceptance_report(4, ok, f"flat spacing == L1: {ok_flat}; clear at d_min {clear}/20, "
                             f"blocked at 0.99 d_min {hit}/20", dt, 1.0)
    assert ok


def _grid_gain(poses, step=1.0):
    gx, gy = AREA.grid(step)
    return sum(array_factor(delta_field(TX, p.x, p.omega, gx, gy), DIMS.l1_bar) for p in poses).min()


def test_criterion_5_sequential_mr(acceptance_report):
    t0 = time.perf_counter()
    sol = sequential_mr_area_placement(TX, AREA, DIMS)
    gain = float(_grid_gain(sol.poses))
    dt = time.perf_counter() - t0
    ok = len(sol.poses) == 7 and gain >= 0.40 and dt < 10.0
    acceptance_report(5, ok, f"{len(sol.poses)} movable plates (want 7), min reflection gain {gain:.4f} >= 0.40",
                      dt, 10.0)
    assert ok


def test_criterion_6_sequential_fr(acceptance_report):
    t0 = time.perf_counter()
    plan = sequential_fr_area(TX, AREA, DIMS)
    gain = float(_grid_gain(plan.poses))
    dt = time.perf_counter() - t0
    ok = len(plan.poses) == 6 and gain >= 0.40 and dt < 10.0
    acceptance_report(6, ok, f"{len(plan.poses)} flexible plates (want 6), min reflection gain {gain:.4f} >= 0.40",
                      dt, 10.0)
    assert ok


def _region_sweep():
    tx, r = Point(0.0, -150.0), Point(100.0, -60.0)
    cfg = LinkBudgetConfig(dbm_to_watts(30.0), DIMS, tx)
    rows = []
    for s in np.linspace(0.0, 200.0, 11):
        row = []
        for kind in ("fpr", "fprr", "movable_region_mr", "movable_region_fr"):
            poses = benchmark_poses(BenchmarkScheme(kind, region_size=float(s)), tx, DIMS, r)
            row.append(receive_power(cfg, poses, r))
        rows.append(row)
    return np.array(rows)


def test_criterion_7_benchmark_orderings(acceptance_report):
    t0 = time.perf_counter()
    p = _region_sweep()
    fpr, fprr, mr, fr = p.T
    sweep_ok = bool(
        np.all(fr >= mr) and np.all(mr >= fpr) and np.all(fprr >= fpr)
        and np.all(fpr == fpr[0]) and np.all(fprr == fprr[0])
        and np.all(np.diff(mr) >= 0) and np.all(np.diff(fr) >= 0)
    )

    fpr_zero = []
    for dx in (20.0, 40.0, 60.0, 80.0, 100.0):
        a = TargetArea(Point(100.0, -150.0), dx, 50.0)
        pose = benchmark_poses(BenchmarkScheme("fpr"), TX, DIMS, a)[0]
        fpr_zero.append(worst_case_power_single(LINK, pose, a) == 0.0)

    mr = sequential_mr_area_placement(TX, AREA, DIMS).poses
    fr = sequential_fr_area(TX, AREA, DIMS).poses
    eq_mr = benchmark_poses(BenchmarkScheme("equal_spacing_mr", count=len(mr)), TX, DIMS, AREA)
    eq_fr = benchmark_poses(BenchmarkScheme("equal_spacing_fr", count=len(fr)), TX, DIMS, AREA)
    med = {k: median_power(evaluate_field(LINK, v, AREA, 1.0))
           for k, v in (("mr", mr), ("fr", fr), ("eq_mr", eq_mr), ("eq_fr", eq_fr))}
    cdf_ok = med["mr"] >= med["eq_mr"] and med["fr"] >= med["eq_fr"]
    dt = time.perf_counter() - t0

    ok = sweep_ok and all(fpr_zero) and cdf_ok and dt < 30.0
    dbm = {k: 10 * math.log10(v * 1e3) for k, v in med.items()}
    acceptance_report(7, ok, f"region sweep ordering {sweep_ok}; fixed plate null for Dx>=20 "
                             f"{sum(fpr_zero)}/{len(fpr_zero)}; medians dBm mr {dbm['mr']:.2f} vs "
                             f"{dbm['eq_mr']:.2f}, fr {dbm['fr']:.2f} vs {dbm['eq_fr']:.2f}", dt, 30.0)
    assert ok


def test_criterion_8_incoherent_expectation(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    poses = multi_mr_single_target(TX, RX, DIMS).poses
    worst = 0.0
    for m in (2, 3, 5):
        powers = [receive_power(LINK, [p], RX) for p in poses[:m]]
        mc = monte_carlo_incoherent_power(powers, 100_000, rng)
        worst = max(worst, abs(mc - sum(powers)) / sum(powers))
    dt = time.perf_counter() - t0
    ok = worst <= 0.01 and dt < 5.0
    acceptance_report(8, ok, f"1e5 random-phase draws for M in {{2,3,5}}, worst rel err {worst:.4f} <= 0.01",
                      dt, 5.0)
    assert ok


def test_criterion_9_invariants(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(9)
    failures = []

    for _ in range(500):
        omega = rng.uniform(-math.pi, math.pi)
        u, n = rotation_basis(omega)
        if abs(math.hypot(*u) - 1) > 1e-12 or abs(math.hypot(*n) - 1) > 1e-12 or abs(u[0] * n[0] + u[1] * n[1]) > 1e-12:
            failures.append("basis")
        tx, r = _random_below(rng, 2)
        x = rng.uniform(-150.0, 150.0)
        pose = ReflectorPose(x, omega)
        eta = eta_factor(tx, pose, r)
        if not 0.0 <= eta <= 1.0 + 1e-15:
            failures.append("eta range")
        d_r = math.hypot(r.x - x, r.y)
        if abs(eta_factor(tx, ReflectorPose(x, 0.0), r) - r.y**2 / d_r**2) > 1e-12:
            failures.append("eta unrotated")
        vx, vy = deflection(tx, x, r)
        if abs(projection_delta(tx, pose, r)) > math.hypot(vx, vy) + 1e-12 or math.hypot(vx, vy) > 2 + 1e-12:
            failures.append("projection bound")

    small = TargetArea(Point(100.0, -150.0), 6.0, 4.0)
    for x in np.linspace(23.0, 27.0, 9):
        gx, gy = small.grid(0.5)
        ext = delta_extrema_area(float(x), 0.0, TX, small, 0.5)
        if has_null(ext.delta_min, ext.delta_max, DIMS.l1_bar):
            continue
        brute = array_factor(delta_field(TX, float(x), 0.0, gx, gy), DIMS.l1_bar).min()
        if abs(worst_case_array_factor(float(x), TX, small, DIMS, 0.5) - brute) > 1e-6:
            failures.append("worst-case vs grid")

    c = DIMS.half_lobe
    residual = 0.0
    mr = sequential_mr_area_placement(TX, AREA, DIMS)
    fr = sequential_fr_area(TX, AREA, DIMS)
    for poses, lobes in ((mr.poses, mr.per_reflector_lobes), (fr.poses, fr.lobe_anchors)):
        for m, pose in enumerate(poses):
            left, right = lobes[m]
            residual = max(residual, abs(projection_delta(TX, pose, right) - c))
            if left is not None:
                residual = max(residual, abs(projection_delta(TX, pose, left) + c))
                if lobes[m + 1][1] != left:
                    failures.append("chain anchor")
    dt = time.perf_counter() - t0
    ok = not failures and residual <= 1e-8 and dt < 30.0
    acceptance_report(9, ok, f"randomized invariants failures {len(failures)}, "
                             f"lobe-chaining residual {residual:.1e} <= 1e-8 (full property suite: "
                             f"tests/test_properties.py)", dt, 30.0)
    assert ok
