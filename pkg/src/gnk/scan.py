"""Singular-event detection along trajectories.

A time t is singular when some k of the moving points lie on a common
(k-2)-plane: affinely dependent in affine mode, linearly dependent
homogeneous lifts in projective mode.  Both conditions are determinant
signs, so per k-subset the determinant against time is a piecewise
polynomial; the scanner samples it on a grid, refines sign changes by
bisection, rejects tangencies and coincident events, and returns the
events in time order.  Reading their subsets off in order gives the word
invariant of the path.

Everything here is pure and deterministic given (trajectory, options).
Per-subset work may run on a thread pool capped by the GNK_THREADS
environment variable; the merged output does not depend on it.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from gnk.group import GroupParams, Word
from gnk.trajectory import (
    AFFINE,
    PROJECTIVE,
    Configuration,
    Trajectory,
    eval_piece_grid,
    eval_trajectory,
    horner,
    piece_index,
    local_time,
)


class GeometryError(ValueError):
    pass


class DimensionMismatch(GeometryError):
    pass


class ScanError(Exception):
    """A trajectory violated the good-and-stable contract."""


class SingularEndpoint(ScanError):
    pass


class GoodPathViolation(ScanError):
    pass


class NotStable(ScanError):
    pass


class LeftGeneralPosition(ScanError):
    pass


@dataclass(frozen=True)
class ScanOptions:
    """Grid resolution and tolerances for event scanning.

    stability_margin is relative to the max |det| of the subset on the
    piece; root and simultaneity tolerances are absolute in t.
    """

    samples_per_piece: int = 2048
    root_tol: float = 1e-12
    simultaneity_tol: float = 1e-9
    stability_margin: float = 1e-7
    membership_tol: float = 1e-9
    membership_stride: int = 16

    def __post_init__(self):
        for name in (
            "samples_per_piece",
            "root_tol",
            "simultaneity_tol",
            "stability_margin",
            "membership_tol",
            "membership_stride",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SingularEvent:
    t: float
    subset: tuple  # 1-based point indices, sorted
    crossing: int  # sign of d(det)/dt at the root: +1 rising, -1 falling


def dependence_det(points: Sequence[Sequence[float]]) -> float:
    """Bordered determinant: zero iff the k points share a (k-2)-plane.

    Row i is the coordinates of point i (given in increasing point-index
    order) followed by 1, so the sign is fixed by the input order.
    """
    k = len(points)
    for p in points:
        if len(p) != k - 1:
            raise DimensionMismatch(
                f"{k} points need dimension {k - 1}, got a point of dimension {len(p)}"
            )
    m = np.ones((k, k))
    for i, p in enumerate(points):
        m[i, : k - 1] = p
    return float(np.linalg.det(m))


def dependence_det_projective(vectors: Sequence[Sequence[float]]) -> float:
    """Plain k x k determinant of homogeneous lifts, rows in point order."""
    k = len(vectors)
    m = np.empty((k, k))
    for i, v in enumerate(vectors):
        if len(v) != k:
            raise DimensionMismatch(
                f"{k} homogeneous vectors need dimension {k}, got {len(v)}"
            )
        if not any(x != 0.0 for x in v):
            raise GeometryError(f"vector {i + 1} is the zero vector")
        m[i] = v
    return float(np.linalg.det(m))


@dataclass(frozen=True)
class MembershipReport:
    """Diagnostics for one configuration.

    `degenerate` lists (k-1)-subsets on a common (k-3)-plane (leaving the
    admissible configuration space); `singular` lists k-subsets on a
    common (k-2)-plane.  Values are scale-relative smallness measures.
    """

    degenerate: tuple
    singular: tuple

    @property
    def in_general_position(self) -> bool:
        return not self.degenerate

    @property
    def nonsingular(self) -> bool:
        return not self.singular

    @property
    def clean(self) -> bool:
        return self.in_general_position and self.nonsingular


def _subset_matrix(config: Configuration, subset, bordered: bool) -> np.ndarray:
    rows = [config.points[i - 1] for i in subset]
    if bordered:
        m = np.ones((len(rows), len(rows[0]) + 1))
        m[:, :-1] = rows
        return m
    return np.array(rows, dtype=float)


def check_membership(config: Configuration, tol: float = 1e-9) -> MembershipReport:
    k = config.params.k
    n = config.params.n
    bordered = config.mode == AFFINE

    degenerate = []
    if k >= 3:
        for subset in itertools.combinations(range(1, n + 1), k - 1):
            m = _subset_matrix(config, subset, bordered=False)
            if bordered:
                m = m[1:] - m[0]  # affine rank: differences from the first point
            sv = np.linalg.svd(m, compute_uv=False)
            ratio = sv[-1] / max(1.0, sv[0])
            if ratio <= tol:
                degenerate.append((subset, float(ratio)))

    singular = []
    for subset in itertools.combinations(range(1, n + 1), k):
        m = _subset_matrix(config, subset, bordered=bordered)
        det = float(np.linalg.det(m))
        scale = float(np.prod(np.linalg.norm(m, axis=1)))
        if abs(det) <= tol * max(1.0, scale):
            singular.append((subset, det))
    return MembershipReport(tuple(degenerate), tuple(singular))


def _det_grid(coords: np.ndarray, subset, mode: str) -> np.ndarray:
    """Determinant samples for one subset; coords has shape (n, d, S)."""
    k = len(subset)
    s_count = coords.shape[2]
    if mode == AFFINE:
        m = np.ones((s_count, k, k))
        for row, i in enumerate(subset):
            m[:, row, : k - 1] = coords[i - 1].T
    else:
        m = np.empty((s_count, k, k))
        for row, i in enumerate(subset):
            m[:, row, :] = coords[i - 1].T
    return np.linalg.det(m)


def _det_at(traj: Trajectory, subset, t: float) -> float:
    b = piece_index(traj, t)
    s = local_time(traj, b, t)
    pts = [
        [horner(traj.coeffs[i - 1][c][b], s) for c in range(len(traj.coeffs[0]))]
        for i in subset
    ]
    if traj.mode == AFFINE:
        return dependence_det(pts)
    return dependence_det_projective(pts)


def _bisect_root(traj, subset, a, b, va, tol):
    while b - a > tol:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        vm = _det_at(traj, subset, mid)
        if vm == 0.0:
            a = b = mid
            break
        if (va < 0) == (vm < 0):
            a = mid
        else:
            b = mid
    return 0.5 * (a + b)


def _check_general_position(traj, coords, ts, k, tol):
    """Spot-check that no k-1 points degenerate anywhere on the sampled grid."""
    if k < 3:
        return
    n = traj.params.n
    bordered = traj.mode == AFFINE
    for subset in itertools.combinations(range(1, n + 1), k - 1):
        block = np.stack([coords[i - 1] for i in subset], axis=0)  # (k-1, d, S)
        m = np.transpose(block, (2, 0, 1))  # (S, k-1, d)
        if bordered:
            m = m[:, 1:, :] - m[:, :1, :]
        sv = np.linalg.svd(m, compute_uv=False)
        ratio = sv[:, -1] / np.maximum(1.0, sv[:, 0])
        bad = np.nonzero(ratio <= tol)[0]
        if bad.size:
            raise LeftGeneralPosition(
                f"points {subset} degenerate near t={ts[bad[0]]:.9f} "
                f"(smallness {ratio[bad[0]]:.3g})"
            )


def _subset_roots(traj, subset, ts, vs, piece_slices, opts):
    """Roots and stability screening for one subset's sampled determinant."""
    events = []
    # tangency screening piece by piece, relative to the piece's det scale
    for sl in piece_slices:
        seg = vs[sl]
        scale = np.abs(seg).max()
        if scale == 0.0:
            raise NotStable(
                f"subset {subset} is identically singular on a whole piece"
            )
        interior = np.arange(1, len(seg) - 1)
        mins = interior[
            (np.abs(seg[interior]) <= np.abs(seg[interior - 1]))
            & (np.abs(seg[interior]) <= np.abs(seg[interior + 1]))
            & (np.abs(seg[interior]) <= opts.stability_margin * scale)
            & (seg[interior - 1] * seg[interior + 1] > 0)
            & (seg[interior] * seg[interior - 1] > 0)
        ]
        if mins.size:
            i = mins[0]
            raise NotStable(
                f"subset {subset} grazes zero without a sign change near "
                f"t={ts[sl][i]:.9f} (|det| {abs(seg[i]):.3g} vs scale {scale:.3g})"
            )

    zero_hits = np.nonzero(vs == 0.0)[0]
    for i in zero_hits:
        if i == 0 or i == len(vs) - 1:
            raise SingularEndpoint(
                f"subset {subset} singular exactly at t={ts[i]:.9f}"
            )
        if vs[i - 1] * vs[i + 1] < 0:
            events.append(
                SingularEvent(float(ts[i]), subset, 1 if vs[i + 1] > 0 else -1)
            )
        else:
            raise NotStable(f"subset {subset} touches zero at t={ts[i]:.9f}")

    changes = np.nonzero(vs[:-1] * vs[1:] < 0)[0]
    for i in changes:
        a, b, va = float(ts[i]), float(ts[i + 1]), float(vs[i])
        root = _bisect_root(traj, subset, a, b, va, opts.root_tol)
        events.append(SingularEvent(root, subset, 1 if va < 0 else -1))
    return events


def _thread_count() -> int:
    raw = os.environ.get("GNK_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"GNK_THREADS must be an integer, got {raw!r}")
    if value < 1:
        raise ValueError(f"GNK_THREADS must be at least 1, got {value}")
    return value


def scan_events(traj: Trajectory, opts: ScanOptions | None = None):
    """All singular events of a good and stable trajectory, in time order.

    Raises SingularEndpoint / LeftGeneralPosition / NotStable /
    GoodPathViolation when the trajectory violates the contract the word
    invariant needs.
    """
    if opts is None:
        opts = ScanOptions()
    params = traj.params
    k = params.k

    for t in (0.0, 1.0):
        report = check_membership(eval_trajectory(traj, t), opts.membership_tol)
        if not report.in_general_position:
            raise LeftGeneralPosition(
                f"endpoint t={t} degenerate: {report.degenerate[0][0]}"
            )
        if not report.nonsingular:
            raise SingularEndpoint(
                f"endpoint t={t} singular: subset {report.singular[0][0]}"
            )

    # Sample every piece once; per-subset determinant rows share the grid.
    s_grid = np.linspace(0.0, 1.0, opts.samples_per_piece + 1)
    ts_parts = []
    piece_slices = []
    grids = []
    offset = 0
    for b in range(traj.pieces):
        t0, t1 = traj.breakpoints[b], traj.breakpoints[b + 1]
        coords = eval_piece_grid(traj, b, s_grid)
        ts_piece = t0 + (t1 - t0) * s_grid
        keep = slice(1, None) if b > 0 else slice(None)
        ts_parts.append(ts_piece[keep])
        grids.append((coords, keep))
        count = len(ts_piece[keep])
        piece_slices.append(slice(offset, offset + count))
        offset += count
    ts = np.concatenate(ts_parts)

    stride = opts.membership_stride
    for (coords, keep), sl in zip(grids, piece_slices):
        _check_general_position(
            traj, coords[:, :, ::stride], ts[sl][::stride], k, opts.membership_tol
        )

    subsets = list(itertools.combinations(range(1, params.n + 1), k))
    det_rows = {}
    for subset in subsets:
        parts = [
            _det_grid(coords, subset, traj.mode)[keep] for coords, keep in grids
        ]
        det_rows[subset] = np.concatenate(parts)

    threads = _thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(
                    _subset_roots, traj, sub, ts, det_rows[sub], piece_slices, opts
                )
                for sub in subsets
            ]
            nested = [f.result() for f in futures]
    else:
        nested = [
            _subset_roots(traj, sub, ts, det_rows[sub], piece_slices, opts)
            for sub in subsets
        ]

    events = sorted(
        (ev for group in nested for ev in group), key=lambda e: (e.t, e.subset)
    )

    # the same root can be found from both sides of a breakpoint
    deduped = []
    for ev in events:
        if (
            deduped
            and deduped[-1].subset == ev.subset
            and ev.t - deduped[-1].t <= max(4 * opts.root_tol, 1e-13)
        ):
            continue
        deduped.append(ev)

    for prev, cur in zip(deduped, deduped[1:]):
        if cur.t - prev.t < opts.simultaneity_tol:
            raise GoodPathViolation(
                f"events for {prev.subset} and {cur.subset} coincide near "
                f"t={prev.t:.12f} (gap {cur.t - prev.t:.3g})"
            )
    for ev in deduped:
        if ev.t < opts.simultaneity_tol or ev.t > 1.0 - opts.simultaneity_tol:
            raise SingularEndpoint(
                f"event for {ev.subset} too close to an endpoint: t={ev.t:.12f}"
            )
    return tuple(deduped)


def trajectory_word(traj: Trajectory, opts: ScanOptions | None = None) -> Word:
    """The word whose p-th letter names the p-th singular event's subset."""
    events = scan_events(traj, opts)
    return Word(traj.params, tuple(ev.subset for ev in events))
