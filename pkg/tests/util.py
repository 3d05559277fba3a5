"""Shared test helpers: independent oracles and randomized rewriting."""

from __future__ import annotations

import random

from gnk.group import Word, _decode, _encode, _lex_least, _table
from gnk.scan import ScanError, scan_events
from gnk.constructions import random_disc_trajectory


def cofactor_det(m):
    """Brute-force determinant by first-row cofactor expansion.

    Pure-python oracle, independent of the numpy route used by the
    library.
    """
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0.0
    for col in range(n):
        minor = [row[:col] + row[col + 1 :] for row in m[1:]]
        term = m[0][col] * cofactor_det(minor)
        total += term if col % 2 == 0 else -term
    return total


def all_cancellable_pairs(codes, tab):
    out = []
    for i in range(len(codes)):
        mask = tab.commute[codes[i]]
        for j in range(i + 1, len(codes)):
            if codes[j] == codes[i]:
                out.append((i, j))
                break
            if not (mask >> codes[j]) & 1:
                break
    return out


def randomized_normal_form(word: Word, rng: random.Random) -> Word:
    """Rewrite to exhaustion with randomized rule application order.

    Interleaves random commuting swaps with deletion of a randomly chosen
    cancellable pair until none remains, then orders the residue
    canonically.  Confluence means the result cannot depend on any of the
    random choices.
    """
    tab = _table(word.params.n, word.params.k)
    codes = _encode(word)
    while True:
        for _ in range(rng.randrange(8)):
            adjacent = [
                p
                for p in range(len(codes) - 1)
                if (tab.commute[codes[p]] >> codes[p + 1]) & 1
            ]
            if not adjacent:
                break
            p = rng.choice(adjacent)
            codes[p], codes[p + 1] = codes[p + 1], codes[p]
        pairs = all_cancellable_pairs(codes, tab)
        if not pairs:
            break
        i, j = pairs[rng.randrange(len(pairs))]
        del codes[j]
        del codes[i]
    return _decode(_lex_least(codes, tab), word.params)


def clean_random_trajectories(n, count, start_seed=1, opts=None, **kwargs):
    """First `count` seeded random trajectories that scan without errors.

    Returns a list of (seed, trajectory, events) triples.
    """
    out = []
    seed = start_seed
    while len(out) < count:
        traj = random_disc_trajectory(n, seed, **kwargs)
        try:
            events = scan_events(traj, opts)
        except ScanError:
            seed += 1
            continue
        out.append((seed, traj, events))
        seed += 1
    return out
