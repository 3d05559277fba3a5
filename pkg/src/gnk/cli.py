"""Command line front end.

Subcommands cover word algebra (reduce, eq, abelianize, epsilon, include,
project), trajectory scanning (scan), and the experiment drivers.  Exit
codes: 0 success / Equal / PASS, 1 Distinct, 2 bad input, 3 Unknown,
4 scan or construction failure, 5 experiment assertion failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from gnk import constructions
from gnk.constructions import (
    ConstructionError,
    circle_rotation_loop,
    hemisphere_lift,
    hierarchy_lift,
    pure_braid_generator,
    random_disc_trajectory,
    rotation_expected_order,
    rotation_loop,
)
from gnk.group import (
    GroupError,
    GroupParams,
    SearchBudget,
    Word,
    WordFormatError,
    abelianize,
    epsilon_element,
    equal,
    format_letters,
    format_word,
    include_up,
    normal_form,
    parse_word,
    project_down,
)
from gnk.scan import ScanError, ScanOptions, scan_events, trajectory_word
from gnk.trajectory import (
    TrajectoryError,
    TrajectoryFormatError,
    format_trajectory,
    parse_trajectory,
)

OK, DISTINCT, BAD_INPUT, UNKNOWN, SCAN_FAIL, ASSERT_FAIL = 0, 1, 2, 3, 4, 5


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise WordFormatError(f"cannot read {path}: {exc}") from exc


def _scan_options(args) -> ScanOptions:
    return ScanOptions(
        samples_per_piece=args.grid,
        root_tol=args.root_tol,
        simultaneity_tol=args.simultaneity_tol,
        stability_margin=args.stability_margin,
        membership_tol=args.membership_tol,
    )


def _add_scan_flags(parser):
    defaults = ScanOptions()
    parser.add_argument("--grid", type=int, default=defaults.samples_per_piece,
                        help="samples per piece")
    parser.add_argument("--root-tol", type=float, default=defaults.root_tol)
    parser.add_argument("--simultaneity-tol", type=float,
                        default=defaults.simultaneity_tol)
    parser.add_argument("--stability-margin", type=float,
                        default=defaults.stability_margin)
    parser.add_argument("--membership-tol", type=float,
                        default=defaults.membership_tol)


def _indices(text: str):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise GroupError(f"bad index list {text!r}")


def cmd_reduce(args) -> int:
    w = parse_word(_read(args.file))
    print(normal_form(w))
    return OK


def cmd_eq(args) -> int:
    w1 = parse_word(_read(args.file1))
    w2 = parse_word(_read(args.file2))
    budget = SearchBudget(max_visited=args.budget, max_depth=args.depth)
    verdict = equal(w1, w2, budget)
    print(verdict.status.capitalize())
    if args.certificate:
        if verdict.status == "equal":
            for label, word in verdict.certificate:
                print(f"  {label}: {word}")
        elif verdict.status == "distinct":
            name, v1, v2 = verdict.certificate
            print(f"  separated by {name}:")
            print(f"    left  {format_letters(sorted(v1))}")
            print(f"    right {format_letters(sorted(v2))}")
        else:
            for key, value in verdict.certificate:
                print(f"  {key}: {value}")
    return {"equal": OK, "distinct": DISTINCT, "unknown": UNKNOWN}[verdict.status]


def cmd_abelianize(args) -> int:
    w = parse_word(_read(args.file))
    print(format_letters(sorted(abelianize(w))))
    return OK


def cmd_epsilon(args) -> int:
    params = GroupParams(args.n, args.k)
    word = epsilon_element(params, _indices(args.fixed), _indices(args.order))
    sys.stdout.write(format_word(word))
    return OK


def cmd_include(args) -> int:
    sys.stdout.write(format_word(include_up(parse_word(_read(args.file)))))
    return OK


def cmd_project(args) -> int:
    sys.stdout.write(format_word(project_down(parse_word(_read(args.file)))))
    return OK


def cmd_scan(args) -> int:
    traj = parse_trajectory(_read(args.file))
    events = scan_events(traj, _scan_options(args))
    word = Word(traj.params, tuple(ev.subset for ev in events))
    if not args.word_only:
        print("# t subset crossing")
        for ev in events:
            sign = "+1" if ev.crossing > 0 else "-1"
            print(f"{ev.t:.15f} {{{','.join(map(str, ev.subset))}}} {sign}")
    print(f"word {word}" if not args.word_only else str(word))
    return OK


def _dump_artifacts(args, name: str, **artifacts) -> None:
    outdir = Path(args.artifacts)
    outdir.mkdir(parents=True, exist_ok=True)
    for label, text in artifacts.items():
        path = outdir / f"gnk-{name}-{label}.txt"
        path.write_text(text)
        print(f"  wrote {path}", file=sys.stderr)


def _experiment_rotation(args) -> int:
    n = args.n
    traj = rotation_loop(n, delta=args.delta)
    events = scan_events(traj, _scan_options(args))
    word = Word(traj.params, tuple(ev.subset for ev in events))
    order = rotation_expected_order(n)
    eps = epsilon_element(GroupParams(n, 4), [1, 2, 3], order)
    verdict = equal(word, eps)
    count_ok = len(events) == 2 * (n - 3)
    if count_ok and verdict.status == "equal":
        print(f"PASS rotation n={n}: word {word}")
        print(f"  group-equal to the elementary element for fixed {{1,2,3}}, "
              f"order {order}")
        return OK
    print(f"FAIL rotation n={n}: word {word} ({len(events)} events, "
          f"expected {2 * (n - 3)}); verdict vs elementary element: "
          f"{verdict.status}")
    _dump_artifacts(args, "rotation", trajectory=format_trajectory(traj),
                    word=format_word(word), expected=format_word(eps))
    return ASSERT_FAIL


def _experiment_circle(args) -> int:
    steps = args.n if args.full_turn else args.steps
    traj = circle_rotation_loop(args.n, steps=steps)
    word = trajectory_word(traj, _scan_options(args))
    if len(word) == 0:
        print(f"PASS circle n={args.n} steps={steps}: empty word (kernel element)")
        return OK
    print(f"FAIL circle n={args.n} steps={steps}: expected empty word, got {word}")
    _dump_artifacts(args, "circle", trajectory=format_trajectory(traj),
                    word=format_word(word))
    return ASSERT_FAIL


def _experiment_braid(args) -> int:
    traj = pure_braid_generator(args.i, args.j, args.n)
    word = trajectory_word(traj, _scan_options(args))
    if abelianize(word):
        print(f"FAIL braid A({args.i},{args.j}) n={args.n}: odd letter parity "
              f"in {word}")
        _dump_artifacts(args, "braid", trajectory=format_trajectory(traj),
                        word=format_word(word))
        return ASSERT_FAIL
    print(f"PASS braid A({args.i},{args.j}) n={args.n}: word {word} "
          f"(every letter has even count)")
    return OK


def _experiment_lift(args) -> int:
    traj = parse_trajectory(_read(args.input))
    opts = _scan_options(args)
    word = trajectory_word(traj, opts)
    lifted, s = hierarchy_lift(traj, s_growth=args.growth,
                               max_rounds=args.max_rounds, opts=opts)
    lifted_word = trajectory_word(lifted, opts)
    expected = include_up(word)
    if lifted_word.letters == expected.letters:
        print(f"PASS lift: {word} -> {lifted_word}")
        print(f"  scale constants {s}")
        return OK
    print(f"FAIL lift: got {lifted_word}, expected {expected}")
    _dump_artifacts(args, "lift", trajectory=format_trajectory(lifted),
                    word=format_word(lifted_word), expected=format_word(expected))
    return ASSERT_FAIL


def _experiment_hemisphere(args) -> int:
    planar = random_disc_trajectory(args.n, args.seed, pieces=4, step=0.25)
    lifted = hemisphere_lift(planar)
    events = scan_events(lifted, _scan_options(args))
    oracle = constructions.concyclicity_roots(planar)
    ok = len(oracle) == len(events)
    worst = 0.0
    if ok:
        for (t, subset), ev in zip(oracle, events):
            if subset != ev.subset:
                ok = False
                break
            worst = max(worst, abs(t - ev.t))
    if ok and worst <= args.time_tol:
        print(f"PASS hemisphere n={args.n} seed={args.seed}: "
              f"{len(events)} events, max time deviation {worst:.3g}")
        return OK
    print(f"FAIL hemisphere n={args.n} seed={args.seed}: "
          f"{len(oracle)} concyclicity roots vs {len(events)} coplanarity "
          f"events, max time deviation {worst:.3g} (tolerance {args.time_tol:g})")
    _dump_artifacts(args, "hemisphere", planar=format_trajectory(planar),
                    lifted=format_trajectory(lifted))
    return ASSERT_FAIL


def cmd_experiment(args) -> int:
    runner = {
        "rotation": _experiment_rotation,
        "circle": _experiment_circle,
        "braid": _experiment_braid,
        "lift": _experiment_lift,
        "hemisphere": _experiment_hemisphere,
    }[args.name]
    return runner(args)


def _print_config() -> None:
    budget = SearchBudget()
    opts = ScanOptions()
    print("equal.max_visited", budget.max_visited)
    print("equal.max_depth", budget.max_depth)
    print("scan.samples_per_piece", opts.samples_per_piece)
    print("scan.root_tol", opts.root_tol)
    print("scan.simultaneity_tol", opts.simultaneity_tol)
    print("scan.stability_margin", opts.stability_margin)
    print("scan.membership_tol", opts.membership_tol)
    print("scan.membership_stride", opts.membership_stride)
    print("fit.degree", constructions.TRIG_DEGREE)
    print("fit.pieces_per_turn", constructions.TRIG_PIECES_PER_TURN)
    print("fit.budget", constructions.FIT_BUDGET)
    print("lift.s_growth", 8.0)
    print("lift.max_rounds", 40)
    print("hemisphere.time_tol", 1e-8)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gnk",
        description="Word invariants of point motions: algebra, scanning, "
                    "and experiment drivers.",
    )
    parser.add_argument("--print-config", action="store_true",
                        help="print all tolerance defaults and exit")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("reduce", help="print the normal form of a word file")
    p.add_argument("file")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("eq", help="semidecide equality of two word files")
    p.add_argument("file1")
    p.add_argument("file2")
    defaults = SearchBudget()
    p.add_argument("--budget", type=int, default=defaults.max_visited,
                   help="max words visited by the search")
    p.add_argument("--depth", type=int, default=defaults.max_depth,
                   help="max reversal-rule applications")
    p.add_argument("--certificate", action="store_true",
                   help="print the rewrite chain or separating invariant")
    p.set_defaults(func=cmd_eq)

    p = sub.add_parser("abelianize", help="letters with odd count")
    p.add_argument("file")
    p.set_defaults(func=cmd_abelianize)

    p = sub.add_parser("epsilon", help="elementary element word")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--fixed", required=True, help="k-1 indices, comma separated")
    p.add_argument("--order", required=True,
                   help="the remaining indices in crossing order")
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("include", help="push a word up one level")
    p.add_argument("file")
    p.set_defaults(func=cmd_include)

    p = sub.add_parser("project", help="project a word down one level")
    p.add_argument("file")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("scan", help="scan a trajectory file for events")
    p.add_argument("file")
    p.add_argument("--word-only", action="store_true")
    _add_scan_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("experiment", help="run a named construction and check it")
    p.add_argument("name", choices=["rotation", "lift", "circle", "braid",
                                    "hemisphere"])
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--delta", type=float, default=None,
                   help="rotation loop radius")
    p.add_argument("--steps", type=int, default=1,
                   help="circle rotation steps of 2pi/n")
    p.add_argument("--full-turn", action="store_true",
                   help="circle: rotate by a full 2pi")
    p.add_argument("--i", type=int, default=1, help="braid: encircled point")
    p.add_argument("--j", type=int, default=2, help="braid: moving point")
    p.add_argument("--input", help="lift: trajectory file")
    p.add_argument("--growth", type=float, default=8.0,
                   help="lift: scale growth factor")
    p.add_argument("--max-rounds", type=int, default=40,
                   help="lift: verification scan budget")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for randomized experiments")
    p.add_argument("--time-tol", type=float, default=1e-8,
                   help="hemisphere: root agreement tolerance")
    p.add_argument("--artifacts", default=".",
                   help="directory for failure artifacts")
    _add_scan_flags(p)
    p.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_config:
        _print_config()
        return OK
    if not getattr(args, "command", None):
        parser.print_help()
        return BAD_INPUT
    try:
        return args.func(args)
    except (GroupError, WordFormatError, TrajectoryFormatError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return BAD_INPUT
    except (ScanError, TrajectoryError, ConstructionError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return SCAN_FAIL


if __name__ == "__main__":
    sys.exit(main())
