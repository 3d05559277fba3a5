"""Motions of n labelled points and their word invariants.

The library has two halves.  The symbolic half (`gnk.group`) does exact
word arithmetic in the finitely presented groups generated by involutions
a_m, one per k-element subset m of {1..n}, with partial commutation and
reversal relations.  The numerical half (`gnk.trajectory`, `gnk.scan`)
moves n points along piecewise-polynomial paths, detects the times at
which some k of them become affinely (or projectively) dependent, and
reads those events off as a word.  `gnk.constructions` builds the
specific motions the two halves are tested against each other on, and
`gnk.cli` exposes everything as a command line tool.
"""

from gnk.group import (
    EqualityVerdict,
    GroupParams,
    SearchBudget,
    Word,
    abelianize,
    epsilon_element,
    equal,
    include_up,
    inverse,
    make_generator,
    make_word,
    multiply,
    normal_form,
    project_down,
    relator,
)
from gnk.scan import ScanOptions, SingularEvent, scan_events, trajectory_word
from gnk.trajectory import Configuration, Trajectory, eval_trajectory, make_trajectory

__all__ = [
    "Configuration",
    "EqualityVerdict",
    "GroupParams",
    "ScanOptions",
    "SearchBudget",
    "SingularEvent",
    "Trajectory",
    "Word",
    "abelianize",
    "epsilon_element",
    "equal",
    "eval_trajectory",
    "include_up",
    "inverse",
    "make_generator",
    "make_trajectory",
    "make_word",
    "multiply",
    "normal_form",
    "project_down",
    "relator",
    "scan_events",
    "trajectory_word",
]
