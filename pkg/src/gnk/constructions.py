"""Trajectory generators for the motions the word invariant is tested on.

Each generator returns an ordinary trajectory in the standard format, so
its output can be dumped, re-scanned and cross-checked independently.
Trig and square-root profiles are approximated by piecewise degree-5
Chebyshev interpolants whose pointwise error is verified against a
budget far below the scanner's stability margin.
"""

from __future__ import annotations

import itertools
import math
import random
from typing import Sequence

import numpy as np

from gnk.group import GroupParams
from gnk.scan import ScanError, ScanOptions, scan_events
from gnk.trajectory import (
    AFFINE,
    PROJECTIVE,
    Trajectory,
    constant_point,
    fit_pieces,
    make_trajectory,
    poly_affine_sub,
)

TRIG_DEGREE = 5
TRIG_PIECES_PER_TURN = 32
FIT_BUDGET = 1e-10

# braid generator geometry; fixed so regression words are reproducible
BRAID_CURVATURE = 0.07  # base points sit on the parabola y = c * x^2
BRAID_DIP = 0.5  # travel depth below the x-axis
BRAID_RADIUS = 0.3  # loop radius around the encircled point


class ConstructionError(ValueError):
    pass


class DiscViolation(ConstructionError):
    pass


class LiftFailed(ConstructionError):
    pass


# ---------------------------------------------------------------------------
# Rotation loop: one point circles the line through two fixed points.
# ---------------------------------------------------------------------------


def rotation_azimuths(n: int) -> tuple:
    """Default azimuths for the n-3 bystander points, distinct mod pi."""
    m = n - 3
    if m < 1:
        raise ConstructionError("rotation loop needs n >= 4")
    return tuple(0.4 + 2.2 * idx / m for idx in range(m))


def rotation_start_angle(azimuths: Sequence[float]) -> float:
    """Midpoint of the largest gap between the azimuths mod pi.

    Starting there puts the initial plane as far as possible from every
    crossing, so the produced word starts at a canonical cyclic position.
    """
    marks = sorted(a % math.pi for a in azimuths)
    best_gap, best_mid = -1.0, 0.0
    for i, a in enumerate(marks):
        b = marks[(i + 1) % len(marks)] if i + 1 < len(marks) else marks[0] + math.pi
        if b - a > best_gap:
            best_gap, best_mid = b - a, 0.5 * (a + b)
    return best_mid % math.pi


def rotation_expected_order(n: int, azimuths: Sequence[float] | None = None) -> tuple:
    """Bystander indices in the order their crossings occur, one half-turn."""
    if azimuths is None:
        azimuths = rotation_azimuths(n)
    theta0 = rotation_start_angle(azimuths)
    keyed = sorted(
        (((a - theta0) % math.pi), j)
        for j, a in zip(range(4, n + 1), azimuths)
    )
    return tuple(j for _key, j in keyed)


def rotation_loop(
    n: int,
    delta: float | None = None,
    azimuths: Sequence[float] | None = None,
    pieces: int = TRIG_PIECES_PER_TURN,
) -> Trajectory:
    """Point 3 makes a full turn around the line through points 1 and 2.

    Points 1 and 2 pin the z-axis at (0,0,0) and (0,0,1); point 3 circles
    it at radius delta and height 1/2; the remaining points are static at
    generic azimuths.  Every bystander point j crosses the rotating plane
    twice per turn, a half-turn apart, so a clean scan yields the square
    of a word of length n-3.
    """
    if n < 4:
        raise ConstructionError("rotation loop needs n >= 4")
    if azimuths is None:
        azimuths = rotation_azimuths(n)
    if len(azimuths) != n - 3:
        raise ConstructionError(f"need {n - 3} azimuths, got {len(azimuths)}")
    marks = sorted(a % math.pi for a in azimuths)
    gaps = [b - a for a, b in zip(marks, marks[1:])]
    gaps.append(marks[0] + math.pi - marks[-1])
    min_gap = min(gaps) if gaps else math.pi
    if delta is None:
        delta = 0.02 * min(1.0, min_gap)
    if delta <= 0:
        raise ConstructionError("delta must be positive")

    theta0 = rotation_start_angle(azimuths)
    bp, cos_pieces = fit_pieces(
        lambda u: delta * np.cos(theta0 + 2 * math.pi * u),
        pieces,
        TRIG_DEGREE,
        FIT_BUDGET,
    )
    _, sin_pieces = fit_pieces(
        lambda u: delta * np.sin(theta0 + 2 * math.pi * u),
        pieces,
        TRIG_DEGREE,
        FIT_BUDGET,
    )

    coeffs = [
        constant_point((0.0, 0.0, 0.0), pieces),
        constant_point((0.0, 0.0, 1.0), pieces),
        (cos_pieces, sin_pieces, tuple((0.5,) for _ in range(pieces))),
    ]
    for idx, alpha in enumerate(azimuths):
        r = 1.0 + 0.11 * idx
        z = 0.2 + 0.6 * (idx + 1) / (n - 2)
        coeffs.append(
            constant_point((r * math.cos(alpha), r * math.sin(alpha), z), pieces)
        )
    return make_trajectory(GroupParams(n, 4), AFFINE, bp, coeffs)


# ---------------------------------------------------------------------------
# Rigid rotation of concyclic points: a kernel element for k = 3.
# ---------------------------------------------------------------------------


def circle_rotation_loop(n: int, steps: int = 1) -> Trajectory:
    """Rotate n equally spaced points on the unit circle by steps * 2pi/n.

    steps=n is the full turn (a pure braid); any power scans to the empty
    word, since no three points of a circle are ever collinear.
    """
    if n < 3:
        raise ConstructionError("circle rotation needs n >= 3")
    if steps < 1:
        raise ConstructionError("steps must be positive")
    angle = 2 * math.pi * steps / n
    pieces = max(4, math.ceil(TRIG_PIECES_PER_TURN * angle / (2 * math.pi)))
    coeffs = []
    bp = None
    for j in range(n):
        phi = 2 * math.pi * j / n
        bp, xs = fit_pieces(
            lambda u, _p=phi: np.cos(_p + angle * u), pieces, TRIG_DEGREE, FIT_BUDGET
        )
        _, ys = fit_pieces(
            lambda u, _p=phi: np.sin(_p + angle * u), pieces, TRIG_DEGREE, FIT_BUDGET
        )
        coeffs.append((xs, ys))
    return make_trajectory(GroupParams(n, 3), AFFINE, bp, coeffs)


# ---------------------------------------------------------------------------
# Pure braid generator: point j loops once around point i.
# ---------------------------------------------------------------------------


def braid_base_points(n: int) -> tuple:
    """Static positions on a parabola, so no three are ever collinear."""
    return tuple((float(l), BRAID_CURVATURE * l * l) for l in range(1, n + 1))


def pure_braid_generator(i: int, j: int, n: int) -> Trajectory:
    """Standard loop realizing the pure braid generator for points i < j.

    Point j dives below the base line, travels to point i, makes one full
    counterclockwise turn around it at radius BRAID_RADIUS, and retraces
    its path.  All other points are static.
    """
    if not (1 <= i < j <= n):
        raise ConstructionError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    base = braid_base_points(n)
    start = base[j - 1]
    center = base[i - 1]
    p1 = (start[0], -BRAID_DIP)
    p2 = (center[0], -BRAID_DIP)
    p3 = (center[0], center[1] - BRAID_RADIUS)

    circle_pieces = TRIG_PIECES_PER_TURN
    _, circle_x = fit_pieces(
        lambda u: center[0] + BRAID_RADIUS * np.cos(-math.pi / 2 + 2 * math.pi * u),
        circle_pieces,
        TRIG_DEGREE,
        FIT_BUDGET,
    )
    _, circle_y = fit_pieces(
        lambda u: center[1] + BRAID_RADIUS * np.sin(-math.pi / 2 + 2 * math.pi * u),
        circle_pieces,
        TRIG_DEGREE,
        FIT_BUDGET,
    )

    def seg(a, b):
        return ((a[0], b[0] - a[0]),), ((a[1], b[1] - a[1]),)

    xs, ys = [], []
    for piece_x, piece_y in (
        seg(start, p1),
        seg(p1, p2),
        seg(p2, p3),
        (circle_x, circle_y),
        seg(p3, p2),
        seg(p2, p1),
        seg(p1, start),
    ):
        xs.extend(piece_x)
        ys.extend(piece_y)

    pieces = len(xs)
    bp = np.linspace(0.0, 1.0, pieces + 1)
    coeffs = []
    for l, pos in enumerate(base, start=1):
        if l == j:
            coeffs.append((tuple(xs), tuple(ys)))
        else:
            coeffs.append(constant_point(pos, pieces))
    return make_trajectory(GroupParams(n, 3), AFFINE, bp, coeffs)


# ---------------------------------------------------------------------------
# Hemisphere lift: planar motions become spatial motions with k = 4.
# ---------------------------------------------------------------------------


def concyclicity_det(points: Sequence[Sequence[float]]) -> float:
    """Four planar points lie on a common circle or line iff this vanishes.

    Rows are (x^2 + y^2, x, y, 1) in increasing point order.
    """
    if len(points) != 4:
        raise ConstructionError("concyclicity test needs exactly 4 points")
    m = np.ones((4, 4))
    for row, (x, y) in enumerate(points):
        m[row, 0] = x * x + y * y
        m[row, 1] = x
        m[row, 2] = y
    return float(np.linalg.det(m))


def concyclicity_roots(planar: Trajectory, samples: int = 4096):
    """Times at which some 4 points become concyclic (or collinear), sorted.

    Independent oracle for the hemisphere cross-check: plain sampling and
    bisection of the concyclicity determinant along the planar motion,
    sharing none of the event scanner's machinery.  Returns a list of
    (t, subset) pairs in time order.
    """
    from gnk.trajectory import eval_trajectory

    n = planar.params.n
    ts = np.linspace(0.0, 1.0, samples + 1)
    configs = [eval_trajectory(planar, t).points for t in ts]
    roots = []
    for subset in itertools.combinations(range(1, n + 1), 4):
        vals = np.array(
            [concyclicity_det([pts[i - 1] for i in subset]) for pts in configs]
        )
        for idx in np.nonzero(vals[:-1] * vals[1:] < 0)[0]:
            a, b, va = ts[idx], ts[idx + 1], vals[idx]
            for _ in range(60):
                mid = 0.5 * (a + b)
                pts = eval_trajectory(planar, mid).points
                vm = concyclicity_det([pts[i - 1] for i in subset])
                if (vm < 0) == (va < 0):
                    a = mid
                else:
                    b = mid
            roots.append((0.5 * (a + b), subset))
    roots.sort()
    return roots


def hemisphere_lift(
    planar: Trajectory,
    margin: float = 0.05,
    max_subdivision: int = 256,
) -> Trajectory:
    """Map a motion in the open unit disc onto the upper half-sphere.

    (x, y) goes to (x, y, sqrt(1 - x^2 - y^2)); a line meets the sphere
    in at most two points, so no three lifted points are ever collinear
    and the lift can be scanned with the 4-point coplanarity condition.
    The square root is fitted piecewise within FIT_BUDGET; input pieces
    are subdivided as needed.  Points must stay inside radius 1 - margin.
    """
    if planar.mode != AFFINE or planar.params.k != 3:
        raise ConstructionError("hemisphere lift expects a planar k=3 trajectory")
    params = GroupParams(planar.params.n, 4)

    new_bp = [0.0]
    new_coeffs = [[[], [], []] for _ in range(planar.params.n)]
    s_dense = np.linspace(0.0, 1.0, 513)
    for b in range(planar.pieces):
        t0, t1 = planar.breakpoints[b], planar.breakpoints[b + 1]
        factor = 1
        while True:
            ok = True
            staged = [[[], [], []] for _ in range(planar.params.n)]
            for idx in range(planar.params.n):
                px = planar.coeffs[idx][0][b]
                py = planar.coeffs[idx][1][b]
                for f in range(factor):
                    sub_x = poly_affine_sub(px, f / factor, 1.0 / factor)
                    sub_y = poly_affine_sub(py, f / factor, 1.0 / factor)
                    xv = _polyval(sub_x, s_dense)
                    yv = _polyval(sub_y, s_dense)
                    rr = xv * xv + yv * yv
                    if rr.max() >= (1.0 - margin) ** 2:
                        raise DiscViolation(
                            f"point {idx + 1} reaches radius "
                            f"{math.sqrt(rr.max()):.4f} in piece {b}"
                        )
                    nodes = 0.5 + 0.5 * np.cos(
                        (2 * np.arange(TRIG_DEGREE + 1) + 1)
                        / (2.0 * (TRIG_DEGREE + 1))
                        * math.pi
                    )
                    xn = _polyval(sub_x, nodes)
                    yn = _polyval(sub_y, nodes)
                    zn = np.sqrt(1.0 - xn * xn - yn * yn)
                    coef = np.polynomial.polynomial.polyfit(nodes, zn, TRIG_DEGREE)
                    zv = _polyval(tuple(coef), s_dense)
                    err = np.abs(zv - np.sqrt(1.0 - rr)).max()
                    if err > FIT_BUDGET:
                        ok = False
                        break
                    staged[idx][0].append(sub_x)
                    staged[idx][1].append(sub_y)
                    staged[idx][2].append(tuple(float(x) for x in coef))
                if not ok:
                    break
            if ok:
                break
            factor *= 2
            if factor > max_subdivision:
                raise ConstructionError(
                    f"square-root fit needs more than {max_subdivision} "
                    f"subdivisions in piece {b}"
                )
        for idx in range(planar.params.n):
            for c in range(3):
                new_coeffs[idx][c].extend(staged[idx][c])
        for f in range(1, factor + 1):
            new_bp.append(t0 + (t1 - t0) * f / factor)

    new_bp[-1] = 1.0
    coeffs = tuple(
        tuple(tuple(per_coord) for per_coord in point) for point in new_coeffs
    )
    return make_trajectory(params, AFFINE, new_bp, coeffs)


def _polyval(coeffs, s):
    acc = np.zeros_like(s)
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


# ---------------------------------------------------------------------------
# Hierarchy lift: n points in the projective (k-1)-space become n+1 points
# in projective k-space, pushing every event subset up by the new index.
# ---------------------------------------------------------------------------


def _homogeneous_coeffs(traj: Trajectory):
    """Per-point homogeneous coordinate pieces of the input dynamics."""
    out = []
    for point in traj.coeffs:
        rows = [per_coord for per_coord in point]
        if traj.mode == AFFINE:
            rows.append(tuple((1.0,) for _ in range(traj.pieces)))
        out.append(rows)
    return out


def _dominance_orders(n: int, k: int, event_subsets: frozenset):
    """Orderings of 1..n (increasing scale) compatible with the input events.

    The determinant watched for an unwanted (k+1)-subset m' expands over
    the scale constants with k-point minors as cofactors; the term with
    the largest constant must have a root-free minor, i.e. the top index
    i of m' must satisfy m' - {i} not an event subset.  Identity first,
    so the plain increasing assignment is used whenever it works.
    """
    subsets = list(itertools.combinations(range(1, n + 1), k + 1))
    for perm in itertools.permutations(range(1, n + 1)):
        rank = {idx: pos for pos, idx in enumerate(perm)}
        ok = True
        for mprime in subsets:
            top = max(mprime, key=rank.__getitem__)
            rest = tuple(x for x in mprime if x != top)
            if rest in event_subsets:
                ok = False
                break
        if ok:
            yield perm


def hierarchy_lift(
    traj: Trajectory,
    s_growth: float = 8.0,
    max_rounds: int = 40,
    opts: ScanOptions | None = None,
):
    """Lift an n-point dynamics to n+1 projective points one dimension up.

    Point j keeps its homogeneous coordinates extended by a constant
    s_j > 0; the new point n+1 is pinned at (0 : ... : 0 : 1).  Inherited
    events are exact: the new determinant for a subset containing n+1
    reduces to the old one.  The constants are chosen by scan-and-retry:
    candidate dominance orderings are tried with geometrically growing
    scales until a verification scan shows exactly the inherited events
    and nothing else.  Returns (lifted trajectory, s constants).
    """
    if opts is None:
        opts = ScanOptions()
    n, k = traj.params.n, traj.params.k
    input_events = scan_events(traj, opts)
    event_subsets = frozenset(ev.subset for ev in input_events)
    homog = _homogeneous_coeffs(traj)
    params_up = GroupParams(n + 1, k + 1)

    orders = list(itertools.islice(_dominance_orders(n, k, event_subsets), 24))
    if not orders:
        raise LiftFailed(
            f"no scale ordering avoids the event subsets {sorted(event_subsets)}"
        )

    expected = [(ev.t, ev.subset + (n + 1,)) for ev in input_events]
    attempts = 0
    rounds = 0
    while attempts < max_rounds:
        growth = s_growth ** (rounds + 1)
        if growth ** (n - 1) > 1e100:
            break
        for order in orders:
            if attempts >= max_rounds:
                break
            attempts += 1
            s = [0.0] * n
            for pos, idx in enumerate(order):
                s[idx - 1] = growth**pos
            lifted = _build_lift(traj, homog, params_up, s)
            try:
                got = scan_events(lifted, opts)
            except ScanError:
                continue
            if _events_match(got, expected):
                return lifted, tuple(s)
        rounds += 1
    raise LiftFailed(f"no clean lift within {max_rounds} verification scans")


def _build_lift(traj, homog, params_up, s):
    pieces = traj.pieces
    coeffs = []
    for j in range(traj.params.n):
        rows = list(homog[j])
        rows.append(tuple((s[j],) for _ in range(pieces)))
        coeffs.append(tuple(rows))
    fixed = [(0.0,)] * (params_up.k - 1) + [(1.0,)]
    coeffs.append(tuple(tuple(c for _ in range(pieces)) for c in fixed))
    return make_trajectory(params_up, PROJECTIVE, traj.breakpoints, coeffs)


def _events_match(got, expected, time_tol: float = 1e-8) -> bool:
    if len(got) != len(expected):
        return False
    for ev, (t, subset) in zip(got, expected):
        if ev.subset != subset or abs(ev.t - t) > time_tol:
            return False
    return True


# ---------------------------------------------------------------------------
# Random wandering points, used as generic scan/lift/hemisphere inputs.
# ---------------------------------------------------------------------------


def random_disc_trajectory(
    n: int,
    seed: int,
    pieces: int = 6,
    radius: float = 0.8,
    step: float = 0.35,
) -> Trajectory:
    """Seeded piecewise-linear wandering of n points inside a disc.

    Generic inputs for scans and lifts: each point does a clamped random
    walk through `pieces` waypoints.  Nothing guarantees the scan is
    clean; callers filter seeds.
    """
    if n < 2:
        raise ConstructionError("need at least two points")
    rng = random.Random(seed)
    bp = np.linspace(0.0, 1.0, pieces + 1)
    coeffs = []
    for _ in range(n):
        angle = rng.uniform(0, 2 * math.pi)
        rr = radius * 0.85 * math.sqrt(rng.random())
        way = [(rr * math.cos(angle), rr * math.sin(angle))]
        for _ in range(pieces):
            x = way[-1][0] + rng.uniform(-step, step)
            y = way[-1][1] + rng.uniform(-step, step)
            norm = math.hypot(x, y)
            cap = radius * 0.95
            if norm > cap:
                x, y = x * cap / norm, y * cap / norm
            way.append((x, y))
        xs = tuple((way[b][0], way[b + 1][0] - way[b][0]) for b in range(pieces))
        ys = tuple((way[b][1], way[b + 1][1] - way[b][1]) for b in range(pieces))
        coeffs.append((xs, ys))
    return make_trajectory(GroupParams(n, 3), AFFINE, bp, coeffs)
