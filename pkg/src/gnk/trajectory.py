"""Piecewise-polynomial motions of n labelled points.

A trajectory stores, for every point and coordinate, one polynomial per
piece of a shared breakpoint grid 0 = t_0 < ... < t_B = 1.  Polynomials
are kept in local piece time s in [0, 1] with t = t_b + s * (t_{b+1} -
t_b), so concatenation and time rescaling never touch coefficients.
Affine mode uses k-1 coordinates per point; projective mode uses k
homogeneous coordinates whose vector must stay away from zero.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from gnk.group import GroupParams, GroupError

AFFINE = "affine"
PROJECTIVE = "projective"


class TrajectoryError(ValueError):
    pass


class TrajectoryFormatError(TrajectoryError):
    pass


def horner(coeffs: Sequence[float], s: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def poly_add(a, b):
    n = max(len(a), len(b))
    return tuple(
        (a[i] if i < len(a) else 0.0) + (b[i] if i < len(b) else 0.0)
        for i in range(n)
    )


def poly_mul(a, b):
    out = [0.0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return tuple(out)


def poly_affine_sub(coeffs, a: float, h: float):
    """Coefficients of p(a + h*s) given coefficients of p(t)."""
    out = (0.0,)
    for c in reversed(coeffs):
        out = poly_add(poly_mul(out, (a, h)), (c,))
    return out


def poly_reverse_time(coeffs):
    """Coefficients of p(1 - s)."""
    return poly_affine_sub(coeffs, 1.0, -1.0)


def coordinate_count(params: GroupParams, mode: str) -> int:
    if mode == AFFINE:
        return params.k - 1
    if mode == PROJECTIVE:
        return params.k
    raise TrajectoryError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class Configuration:
    """Positions of all n points at one instant."""

    params: GroupParams
    mode: str
    points: tuple  # points[i] = tuple of coordinates


@dataclass(frozen=True)
class Trajectory:
    params: GroupParams
    mode: str
    breakpoints: tuple  # 0 = t_0 < ... < t_B = 1
    coeffs: tuple  # coeffs[point][coord][piece] = ascending-degree tuple

    @property
    def pieces(self) -> int:
        return len(self.breakpoints) - 1


def make_trajectory(
    params: GroupParams,
    mode: str,
    breakpoints: Iterable[float],
    coeffs,
    continuity_tol: float = 1e-9,
    projective_floor: float = 1e-9,
) -> Trajectory:
    """Validate and freeze a trajectory.

    Checks grid shape, per-point/per-coordinate piece counts, continuity
    of every coordinate across breakpoints (to `continuity_tol`, relative
    to the coordinate scale), and in projective mode that each point's
    homogeneous vector stays above `projective_floor` on a sample grid.
    """
    bp = tuple(float(t) for t in breakpoints)
    if len(bp) < 2 or bp[0] != 0.0 or bp[-1] != 1.0:
        raise TrajectoryError("breakpoints must run from 0.0 to 1.0")
    if any(b >= c for b, c in zip(bp, bp[1:])):
        raise TrajectoryError("breakpoints must be strictly increasing")
    pieces = len(bp) - 1
    d = coordinate_count(params, mode)

    frozen = []
    for i, point in enumerate(coeffs):
        if len(point) != d:
            raise TrajectoryError(
                f"point {i + 1} has {len(point)} coordinates, expected {d}"
            )
        fpoint = []
        for c, per_piece in enumerate(point):
            if len(per_piece) != pieces:
                raise TrajectoryError(
                    f"point {i + 1} coord {c + 1} has {len(per_piece)} pieces, "
                    f"expected {pieces}"
                )
            fpoint.append(
                tuple(tuple(float(x) for x in piece) or (0.0,) for piece in per_piece)
            )
        frozen.append(tuple(fpoint))
    if len(frozen) != params.n:
        raise TrajectoryError(f"expected {params.n} points, got {len(frozen)}")

    traj = Trajectory(params, mode, bp, tuple(frozen))

    for i in range(params.n):
        for c in range(d):
            pp = traj.coeffs[i][c]
            scale = 1.0 + max(abs(x) for piece in pp for x in piece)
            for b in range(pieces - 1):
                gap = abs(horner(pp[b], 1.0) - horner(pp[b + 1], 0.0))
                if gap > continuity_tol * scale:
                    raise TrajectoryError(
                        f"point {i + 1} coord {c + 1} jumps by {gap:g} "
                        f"at breakpoint t={bp[b + 1]}"
                    )

    if mode == PROJECTIVE:
        s = np.linspace(0.0, 1.0, 65)
        for i in range(params.n):
            for b in range(pieces):
                rows = np.array(
                    [_polyval_grid(traj.coeffs[i][c][b], s) for c in range(d)]
                )
                norms = np.sqrt((rows * rows).sum(axis=0))
                if norms.min() < projective_floor:
                    raise TrajectoryError(
                        f"homogeneous vector of point {i + 1} falls below "
                        f"{projective_floor:g} in piece {b}"
                    )
    return traj


def _polyval_grid(coeffs, s: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(s)
    for c in reversed(coeffs):
        acc = acc * s + c
    return acc


def piece_index(traj: Trajectory, t: float) -> int:
    if not 0.0 <= t <= 1.0:
        raise TrajectoryError(f"time {t} outside [0, 1]")
    b = bisect.bisect_right(traj.breakpoints, t) - 1
    return min(b, traj.pieces - 1)


def local_time(traj: Trajectory, b: int, t: float) -> float:
    t0, t1 = traj.breakpoints[b], traj.breakpoints[b + 1]
    return (t - t0) / (t1 - t0)


def eval_trajectory(traj: Trajectory, t: float) -> Configuration:
    """Positions at time t (Horner per piece, local coordinates)."""
    b = piece_index(traj, t)
    s = local_time(traj, b, t)
    pts = tuple(
        tuple(horner(traj.coeffs[i][c][b], s) for c in range(len(traj.coeffs[i])))
        for i in range(traj.params.n)
    )
    return Configuration(traj.params, traj.mode, pts)


def eval_piece_grid(traj: Trajectory, b: int, s: np.ndarray) -> np.ndarray:
    """Array of shape (n, d, len(s)) with all coordinates on a local grid."""
    n = traj.params.n
    d = len(traj.coeffs[0])
    out = np.empty((n, d, len(s)))
    for i in range(n):
        for c in range(d):
            out[i, c] = _polyval_grid(traj.coeffs[i][c][b], s)
    return out


def concatenate(t1: Trajectory, t2: Trajectory, endpoint_tol: float = 1e-9) -> Trajectory:
    """Run t1 on [0, 1/2] and t2 on [1/2, 1].

    Local-coordinate pieces carry over unchanged; only breakpoints move.
    The end configuration of t1 must match the start of t2 within
    `endpoint_tol`.
    """
    if t1.params != t2.params or t1.mode != t2.mode:
        raise TrajectoryError("cannot concatenate trajectories with different shape")
    end = eval_trajectory(t1, 1.0).points
    start = eval_trajectory(t2, 0.0).points
    for p, q in zip(end, start):
        for x, y in zip(p, q):
            if abs(x - y) > endpoint_tol * (1.0 + abs(x)):
                raise TrajectoryError(
                    f"endpoint mismatch: {end} vs {start}"
                )
    bp = tuple(b / 2.0 for b in t1.breakpoints) + tuple(
        0.5 + b / 2.0 for b in t2.breakpoints[1:]
    )
    coeffs = tuple(
        tuple(t1.coeffs[i][c] + t2.coeffs[i][c] for c in range(len(t1.coeffs[i])))
        for i in range(t1.params.n)
    )
    return Trajectory(t1.params, t1.mode, bp, coeffs)


def reverse(traj: Trajectory) -> Trajectory:
    """Time reversal t -> 1 - t."""
    bp = tuple(1.0 - b for b in reversed(traj.breakpoints))
    coeffs = tuple(
        tuple(
            tuple(poly_reverse_time(p) for p in reversed(per_piece))
            for per_piece in point
        )
        for point in traj.coeffs
    )
    return Trajectory(traj.params, traj.mode, bp, coeffs)


def _bump_profile(rng) -> tuple:
    """Random cubic q for the global bump t(1-t)q(t), coefficients in [-1, 1]."""
    return tuple(rng.uniform(-1.0, 1.0) for _ in range(3))


def perturb(traj: Trajectory, magnitude: float, seed: int) -> Trajectory:
    """Add a small interior wiggle to every coordinate.

    Each coordinate receives t(1-t)q(t) with a random cubic q drawn from
    `seed`, rescaled to peak magnitude `magnitude`, and restricted to the
    interior pieces: the first and last pieces are left untouched, so the
    endpoint configurations are bit-identical.  Trajectories with fewer
    than three pieces are subdivided first (for a single-piece input the
    t=1 value may then move by rounding only).  magnitude 0 returns the
    trajectory unchanged.
    """
    if magnitude < 0:
        raise TrajectoryError("magnitude must be nonnegative")
    if magnitude == 0:
        return traj
    import random

    rng = random.Random(seed)
    work = traj
    while work.pieces < 3:
        work = _subdivide_first_piece(work)

    new_points = []
    for i in range(work.params.n):
        new_coords = []
        for c in range(len(work.coeffs[i])):
            q = _bump_profile(rng)
            bump = poly_mul((0.0, 1.0), poly_mul((1.0, -1.0), q))  # t(1-t)q(t)
            peak = _poly_peak(bump)
            if peak == 0.0:
                new_coords.append(work.coeffs[i][c])
                continue
            bump = tuple(float(x) * magnitude / peak for x in bump)
            per_piece = list(work.coeffs[i][c])
            for b in range(1, work.pieces - 1):
                t0, t1 = work.breakpoints[b], work.breakpoints[b + 1]
                local = poly_affine_sub(bump, t0, t1 - t0)
                per_piece[b] = poly_add(per_piece[b], local)
            new_coords.append(tuple(per_piece))
        new_points.append(tuple(new_coords))
    return Trajectory(work.params, work.mode, work.breakpoints, tuple(new_points))


def _poly_peak(coeffs) -> float:
    """Exact max of |p| on [0, 1]: endpoints plus critical points."""
    candidates = [0.0, 1.0]
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    if any(deriv):
        for root in np.roots(list(reversed(deriv))):
            if abs(root.imag) < 1e-12 and 0.0 <= root.real <= 1.0:
                candidates.append(float(root.real))
    return max(abs(horner(coeffs, s)) for s in candidates)


def _subdivide_first_piece(traj: Trajectory) -> Trajectory:
    """Split the first piece at its midpoint; the t=0 value is preserved exactly."""
    t0, t1 = traj.breakpoints[0], traj.breakpoints[1]
    mid = t0 + (t1 - t0) / 2.0
    bp = (t0, mid) + traj.breakpoints[1:]
    coeffs = tuple(
        tuple(
            (
                poly_affine_sub(per_piece[0], 0.0, 0.5),
                poly_affine_sub(per_piece[0], 0.5, 0.5),
            )
            + per_piece[1:]
            for per_piece in point
        )
        for point in traj.coeffs
    )
    return Trajectory(traj.params, traj.mode, bp, coeffs)


def fit_pieces(
    func: Callable[[np.ndarray], np.ndarray],
    pieces: int,
    degree: int,
    max_err: float,
    check_points: int = 257,
):
    """Fit func on [0, 1] by `pieces` local polynomials of the given degree.

    Interpolates at Chebyshev nodes per piece and verifies the fit on a
    dense grid, raising if the worst error exceeds `max_err`.  Returns
    (breakpoints, per-piece ascending coefficient tuples).
    """
    bp = np.linspace(0.0, 1.0, pieces + 1)
    nodes = 0.5 + 0.5 * np.cos((2 * np.arange(degree + 1) + 1) / (2.0 * (degree + 1)) * np.pi)
    out = []
    worst = 0.0
    for b in range(pieces):
        t = bp[b] + (bp[b + 1] - bp[b]) * nodes
        vals = func(t)
        coef = np.polynomial.polynomial.polyfit(nodes, vals, degree)
        s = np.linspace(0.0, 1.0, check_points)
        approx = _polyval_grid(tuple(coef), s)
        exact = func(bp[b] + (bp[b + 1] - bp[b]) * s)
        worst = max(worst, float(np.abs(approx - exact).max()))
        out.append(tuple(float(x) for x in coef))
    if worst > max_err:
        raise TrajectoryError(
            f"piecewise fit error {worst:g} exceeds budget {max_err:g}; "
            f"raise the degree or piece count"
        )
    return tuple(float(t) for t in bp), tuple(out)


def constant_point(value: Sequence[float], pieces: int):
    """Per-coordinate piece table for a static point."""
    return tuple(tuple((float(v),) for _ in range(pieces)) for v in value)


# ---------------------------------------------------------------------------
# Text format: header, breakpoint line, then one line per (point, coord)
# with piece coefficient groups separated by '|'.  Floats are written with
# repr and therefore round-trip exactly through binary64.
# ---------------------------------------------------------------------------


def format_trajectory(traj: Trajectory) -> str:
    lines = [
        f"n={traj.params.n} k={traj.params.k} mode={traj.mode}",
        "breakpoints " + " ".join(repr(b) for b in traj.breakpoints),
    ]
    for i in range(traj.params.n):
        for c in range(len(traj.coeffs[i])):
            groups = " | ".join(
                " ".join(repr(x) for x in piece) for piece in traj.coeffs[i][c]
            )
            lines.append(f"point {i + 1} coord {c + 1} : {groups}")
    return "\n".join(lines) + "\n"


def parse_trajectory(text: str) -> Trajectory:
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if len(lines) < 2:
        raise TrajectoryFormatError("trajectory file needs a header and breakpoints")
    fields = dict(part.split("=", 1) for part in lines[0].split() if "=" in part)
    try:
        params = GroupParams(int(fields["n"]), int(fields["k"]))
        mode = fields["mode"]
    except (KeyError, ValueError, GroupError) as exc:
        raise TrajectoryFormatError(f"bad header {lines[0]!r}") from exc
    if mode not in (AFFINE, PROJECTIVE):
        raise TrajectoryFormatError(f"unknown mode {mode!r}")
    if not lines[1].startswith("breakpoints"):
        raise TrajectoryFormatError("second line must list breakpoints")
    try:
        bp = [float(x) for x in lines[1].split()[1:]]
    except ValueError as exc:
        raise TrajectoryFormatError("bad breakpoint value") from exc

    d = coordinate_count(params, mode)
    table = {}
    for ln in lines[2:]:
        head, _, body = ln.partition(":")
        parts = head.split()
        if len(parts) != 4 or parts[0] != "point" or parts[2] != "coord":
            raise TrajectoryFormatError(f"bad coefficient line {ln!r}")
        try:
            i, c = int(parts[1]), int(parts[3])
            pieces = tuple(
                tuple(float(x) for x in group.split())
                for group in body.split("|")
            )
        except ValueError as exc:
            raise TrajectoryFormatError(f"bad coefficient line {ln!r}") from exc
        table[(i, c)] = pieces

    coeffs = []
    for i in range(1, params.n + 1):
        point = []
        for c in range(1, d + 1):
            if (i, c) not in table:
                raise TrajectoryFormatError(f"missing line for point {i} coord {c}")
            point.append(table.pop((i, c)))
        coeffs.append(tuple(point))
    if table:
        raise TrajectoryFormatError(f"unexpected coefficient lines: {sorted(table)}")
    try:
        return make_trajectory(params, mode, bp, coeffs)
    except TrajectoryError as exc:
        raise TrajectoryFormatError(str(exc)) from exc
