"""Trajectory values: evaluation, composition, perturbation, serialization."""

import math
import random

import numpy as np
import pytest

from gnk.group import GroupParams
from gnk.trajectory import (
    AFFINE,
    PROJECTIVE,
    TrajectoryError,
    TrajectoryFormatError,
    concatenate,
    eval_trajectory,
    fit_pieces,
    format_trajectory,
    make_trajectory,
    parse_trajectory,
    perturb,
    poly_affine_sub,
    reverse,
)
from gnk.constructions import random_disc_trajectory

P33 = GroupParams(3, 3)


def crossing_trajectory():
    coeffs = [
        [[(0.0,)], [(0.0,)]],
        [[(1.0,)], [(0.0,)]],
        [[(0.5,)], [(-1.0, 2.0)]],
    ]
    return make_trajectory(P33, AFFINE, [0.0, 1.0], coeffs)


def test_eval_constant_and_linear():
    traj = crossing_trajectory()
    cfg = eval_trajectory(traj, 0.0)
    assert cfg.points == ((0.0, 0.0), (1.0, 0.0), (0.5, -1.0))
    assert eval_trajectory(traj, 1.0).points[2] == (0.5, 1.0)
    assert eval_trajectory(traj, 0.25).points[2] == (0.5, -0.5)


def test_eval_outside_domain():
    with pytest.raises(TrajectoryError):
        eval_trajectory(crossing_trajectory(), 1.5)


def test_breakpoint_continuity_enforced():
    coeffs = [
        [[(0.0,), (0.5,)], [(0.0,), (0.0,)]],  # jumps from 0 to 0.5 at t=0.5
        [[(1.0,), (1.0,)], [(0.0,), (0.0,)]],
        [[(0.5,), (0.5,)], [(1.0,), (1.0,)]],
    ]
    with pytest.raises(TrajectoryError):
        make_trajectory(P33, AFFINE, [0.0, 0.5, 1.0], coeffs)


def test_breakpoint_evaluation_agrees_from_both_sides():
    traj = random_disc_trajectory(4, 1, pieces=5)
    for b in range(1, traj.pieces):
        t = traj.breakpoints[b]
        left = eval_trajectory(traj, t - 1e-12).points
        right = eval_trajectory(traj, t).points
        for p, q in zip(left, right):
            for x, y in zip(p, q):
                assert abs(x - y) < 1e-9


def test_projective_zero_vector_rejected():
    coeffs = [
        [[(0.0, 1.0)], [(0.0,)], [(0.0,)]],  # passes through the zero vector
        [[(1.0,)], [(0.0,)], [(1.0,)]],
        [[(0.0,)], [(1.0,)], [(1.0,)]],
    ]
    with pytest.raises(TrajectoryError):
        make_trajectory(P33, PROJECTIVE, [0.0, 1.0], coeffs)


def test_concatenate_and_reverse():
    traj = crossing_trajectory()
    rev = reverse(traj)
    assert eval_trajectory(rev, 0.0).points == eval_trajectory(traj, 1.0).points
    cat = concatenate(traj, rev)
    assert cat.pieces == traj.pieces + rev.pieces
    assert eval_trajectory(cat, 0.0).points == eval_trajectory(cat, 1.0).points
    # reversal is an involution up to float noise in the recomposed pieces
    double = reverse(rev)
    for t in np.linspace(0, 1, 17):
        for p, q in zip(
            eval_trajectory(double, float(t)).points,
            eval_trajectory(traj, float(t)).points,
        ):
            assert max(abs(x - y) for x, y in zip(p, q)) < 1e-12


def test_concatenate_requires_matching_endpoints():
    traj = crossing_trajectory()
    with pytest.raises(TrajectoryError):
        concatenate(traj, traj)  # end of traj differs from its start


def test_perturb_contract():
    traj = random_disc_trajectory(4, 2, pieces=5)
    wig = perturb(traj, 1e-3, seed=42)
    assert perturb(traj, 1e-3, seed=42) == wig  # deterministic
    assert perturb(traj, 0.0, seed=1) is traj
    # untouched first/last pieces keep the endpoints bit-identical
    assert eval_trajectory(wig, 0.0) == eval_trajectory(traj, 0.0)
    assert eval_trajectory(wig, 1.0) == eval_trajectory(traj, 1.0)
    # bounded displacement
    worst = 0.0
    for t in np.linspace(0, 1, 101):
        for p, q in zip(
            eval_trajectory(wig, float(t)).points,
            eval_trajectory(traj, float(t)).points,
        ):
            worst = max(worst, max(abs(x - y) for x, y in zip(p, q)))
    assert 0 < worst <= 1e-3 * (1 + 1e-9)


def test_perturb_subdivides_short_trajectories():
    traj = crossing_trajectory()
    wig = perturb(traj, 1e-4, seed=5)
    assert wig.pieces >= 3
    start = eval_trajectory(wig, 0.0).points
    assert start == eval_trajectory(traj, 0.0).points


def test_serialization_round_trip_exact():
    rng = random.Random(30)
    for seed in range(10):
        traj = random_disc_trajectory(rng.randint(3, 6), seed, pieces=4)
        assert parse_trajectory(format_trajectory(traj)) == traj
    wig = perturb(random_disc_trajectory(4, 3), math.pi * 1e-4, seed=1)
    assert parse_trajectory(format_trajectory(wig)) == wig


def test_parse_errors():
    with pytest.raises(TrajectoryFormatError):
        parse_trajectory("")
    with pytest.raises(TrajectoryFormatError):
        parse_trajectory("n=3 k=3 mode=affine\nbreakpoints 0.0 1.0\n")
    good = format_trajectory(crossing_trajectory())
    with pytest.raises(TrajectoryFormatError):
        parse_trajectory(good.replace("mode=affine", "mode=weird"))


def test_fit_pieces_budget():
    bp, pieces = fit_pieces(np.cos, 8, 5, 1e-8)
    assert len(pieces) == 8
    s = np.linspace(0, 1, 501)
    worst = 0.0
    for b in range(8):
        vals = sum(c * ((bp[b] + (bp[b + 1] - bp[b]) * s - bp[b]) / (bp[b + 1] - bp[b])) ** i
                   for i, c in enumerate(pieces[b]))
        worst = max(worst, float(np.abs(vals - np.cos(bp[b] + (bp[b + 1] - bp[b]) * s)).max()))
    assert worst <= 1e-8
    with pytest.raises(TrajectoryError):
        fit_pieces(lambda t: np.cos(40 * t), 2, 3, 1e-12)


def test_poly_affine_sub_is_exact_composition():
    rng = random.Random(31)
    for _ in range(50):
        coeffs = tuple(rng.uniform(-2, 2) for _ in range(5))
        a, h = rng.uniform(-1, 1), rng.uniform(0.1, 2)
        sub = poly_affine_sub(coeffs, a, h)
        for s in (0.0, 0.3, 1.0):
            direct = sum(c * (a + h * s) ** i for i, c in enumerate(coeffs))
            via = sum(c * s**i for i, c in enumerate(sub))
            assert abs(direct - via) < 1e-12
