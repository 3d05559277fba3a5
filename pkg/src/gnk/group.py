"""Exact word arithmetic in the involution groups G(n, k).

For fixed integers n > k >= 2 the group has one generator a_m per
k-element subset m of {1..n}, subject to three families of relations:

  (1) a_m * a_m = 1                               (every generator is an involution)
  (2) a_m * a_m' = a_m' * a_m   when |m & m'| < k-1   (partial commutation)
  (3) for every (k+1)-set U and every ordering m^1..m^{k+1} of its
      k-subsets:  a_{m^1} ... a_{m^{k+1}} = a_{m^{k+1}} ... a_{m^1}

Relations (1)+(2) alone present a partially commutative involution
structure with a unique shortlex canonical form, computed by
`normal_form`.  Relation (3) has no known canonical form here, so word
equality is a semidecision: `equal` returns a verdict Equal / Distinct /
Unknown, where Equal carries a rewrite chain, Distinct carries a
separating parity invariant, and Unknown means the bounded search gave
out.  Generators are plain sorted int tuples; words are immutable.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence


class GroupError(ValueError):
    """Base class for invalid group-side inputs."""


class WrongCardinality(GroupError):
    pass


class IndexOutOfRange(GroupError):
    pass


class DuplicateIndex(GroupError):
    pass


class ParamsMismatch(GroupError):
    pass


class InvalidRelator(GroupError):
    pass


Generator = tuple  # sorted tuple of k distinct indices in 1..n


@dataclass(frozen=True)
class GroupParams:
    """The pair (n, k): n moving points, k-point incidence condition."""

    n: int
    k: int

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.k, int)):
            raise GroupError("n and k must be integers")
        if self.k < 2:
            raise GroupError(f"k must be at least 2, got {self.k}")
        # n = k is allowed so single-subset motions can be scanned; the
        # group is then generated by one involution.
        if self.n < self.k:
            raise GroupError(f"need n >= k, got n={self.n}, k={self.k}")


def make_generator(indices: Iterable[int], params: GroupParams) -> Generator:
    """Validate and canonicalize an index set into a sorted generator tuple."""
    idx = list(indices)
    if len(idx) != params.k:
        raise WrongCardinality(
            f"generator needs {params.k} indices, got {len(idx)}"
        )
    for i in idx:
        if not isinstance(i, int) or isinstance(i, bool):
            raise IndexOutOfRange(f"index {i!r} is not an integer")
        if not 1 <= i <= params.n:
            raise IndexOutOfRange(f"index {i} outside 1..{params.n}")
    if len(set(idx)) != len(idx):
        raise DuplicateIndex(f"duplicate index in {sorted(idx)}")
    return tuple(sorted(idx))


def commutes(g: Generator, h: Generator, params: GroupParams) -> bool:
    """Relation (2) test: generators commute iff they share < k-1 indices."""
    return len(set(g).intersection(h)) < params.k - 1


@dataclass(frozen=True)
class Word:
    """An element representative: a finite sequence of generators.

    The empty sequence represents the identity.  Words are values; every
    operation returns a new word.
    """

    params: GroupParams
    letters: tuple

    def __post_init__(self):
        if not isinstance(self.letters, tuple):
            raise GroupError("letters must be a tuple of generator tuples")
        for g in self.letters:
            if not isinstance(g, tuple) or make_generator(g, self.params) != g:
                raise GroupError(f"letter {g!r} is not a sorted generator tuple")

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def __str__(self):
        if not self.letters:
            return "e"
        return " ".join("{" + ",".join(map(str, g)) + "}" for g in self.letters)


def make_word(params: GroupParams, letters: Iterable[Iterable[int]]) -> Word:
    """Build a word from index lists, sorting each letter."""
    return Word(params, tuple(make_generator(g, params) for g in letters))


def identity(params: GroupParams) -> Word:
    return Word(params, ())


def multiply(w1: Word, w2: Word) -> Word:
    """Concatenation.  No implicit normalization."""
    _require_same_params(w1, w2)
    return Word(w1.params, w1.letters + w2.letters)


def inverse(w: Word) -> Word:
    """Reversal: every generator is an involution, so this inverts w."""
    return Word(w.params, tuple(reversed(w.letters)))


def _require_same_params(w1: Word, w2: Word):
    if w1.params != w2.params:
        raise ParamsMismatch(f"params differ: {w1.params} vs {w2.params}")


# ---------------------------------------------------------------------------
# Generator tables: integer codes, lex order, commutation bitmasks.
# Code order coincides with lexicographic order on sorted index tuples,
# which is the generator order used by the shortlex normal form.
# ---------------------------------------------------------------------------


class _Table:
    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.gens = list(itertools.combinations(range(1, n + 1), k))
        self.code = {g: i for i, g in enumerate(self.gens)}
        masks = []
        for g in self.gens:
            sg = set(g)
            m = 0
            for j, h in enumerate(self.gens):
                if len(sg.intersection(h)) < k - 1:
                    m |= 1 << j
            masks.append(m)
        self.commute = masks  # commute[i] bit j set <=> gens i and j commute


@lru_cache(maxsize=None)
def _table(n: int, k: int) -> _Table:
    return _Table(n, k)


def _encode(w: Word) -> list:
    tab = _table(w.params.n, w.params.k)
    return [tab.code[g] for g in w.letters]


def _decode(codes: Sequence[int], params: GroupParams) -> Word:
    tab = _table(params.n, params.k)
    return Word(params, tuple(tab.gens[c] for c in codes))


def _find_cancellable_pair(codes, tab):
    """First (i, j) with equal letters and everything between commuting past them."""
    for i in range(len(codes)):
        ci = codes[i]
        mask = tab.commute[ci]
        for j in range(i + 1, len(codes)):
            cj = codes[j]
            if cj == ci:
                return i, j
            if not (mask >> cj) & 1:
                break
    return None


def _cancel_to_geodesic(codes, tab):
    codes = list(codes)
    while True:
        pair = _find_cancellable_pair(codes, tab)
        if pair is None:
            return codes
        i, j = pair
        del codes[j]
        del codes[i]


def _lex_least(codes, tab):
    """Greedy minimal-available ordering of a commutation class.

    A position is available when its letter commutes with everything
    before it; among available letters the smallest code goes next.  Two
    equal letters are never simultaneously available (a letter does not
    commute with itself), so the choice is unambiguous.
    """
    rest = list(codes)
    out = []
    while rest:
        best = None
        best_pos = -1
        seen_mask = 0
        for p, cp in enumerate(rest):
            blocked = False
            m = tab.commute[cp]
            for t in range(p):
                if not (m >> rest[t]) & 1:
                    blocked = True
                    break
            if not blocked and (best is None or cp < best):
                best, best_pos = cp, p
        out.append(best)
        del rest[best_pos]
    return out


def _nf_codes(codes, tab):
    return _lex_least(_cancel_to_geodesic(codes, tab), tab)


def normal_form(w: Word) -> Word:
    """Canonical form under relations (1) and (2) only.

    Returns the shortlex-least word reachable from w by deleting equal
    letters separated only by letters commuting with them, and by
    commuting swaps.  Deterministic and order-independent: all maximal
    cancellation sequences land in the same commutation class, whose
    lexicographically least member is unique.
    """
    tab = _table(w.params.n, w.params.k)
    return _decode(_nf_codes(_encode(w), tab), w.params)


# ---------------------------------------------------------------------------
# Abelianization and the separating-invariant battery.
# All three relation families only ever insert letters in pairs or permute
# them, so per-generator letter counts mod 2 are invariant.
# ---------------------------------------------------------------------------


def abelianize(w: Word):
    """Sparse parity vector: the frozenset of generators with odd count."""
    odd = set()
    for g in w.letters:
        if g in odd:
            odd.discard(g)
        else:
            odd.add(g)
    return frozenset(odd)


def _drop_index_letters(w: Word, i: int):
    """Letterwise image under the index-deletion homomorphism for index i.

    Letters not containing i die; letters containing i lose it.  The
    images are (k-1)-subsets of {1..n}-{i}; they are returned unrelabeled
    since only comparisons between words of equal params use them.
    """
    out = []
    for g in w.letters:
        if i in g:
            out.append(tuple(x for x in g if x != i))
    return out


def _drop_index_parity(w: Word, i: int):
    odd = set()
    for g in _drop_index_letters(w, i):
        if g in odd:
            odd.discard(g)
        else:
            odd.add(g)
    return frozenset(odd)


def separating_invariants(params: GroupParams):
    """The battery of cheap invariants used to certify Distinct.

    Plain abelianization plus, for every index i, abelianization after
    the deletion homomorphism a_m -> a_{m-{i}} (or 1 when i is not in m).
    Each member is relation-invariant; `check_invariant_battery` verifies
    that computationally on random relator insertions.
    """
    battery = [("parity", abelianize)]
    for i in range(1, params.n + 1):
        battery.append(
            (f"parity/drop{i}", lambda w, _i=i: _drop_index_parity(w, _i))
        )
    return battery


def check_invariant_battery(params: GroupParams, rng, trials: int = 50) -> bool:
    """Spot-check that every battery member is unchanged by relator insertion."""
    battery = separating_invariants(params)
    for _ in range(trials):
        w = random_word(params, rng, max_len=8)
        r = random_relator(params, rng)
        pos = rng.randrange(len(w.letters) + 1)
        w2 = Word(params, w.letters[:pos] + r.letters + w.letters[pos:])
        for name, f in battery:
            if f(w) != f(w2):
                raise AssertionError(f"invariant {name} broken by relator insertion")
    return True


# ---------------------------------------------------------------------------
# Relators and structural words.
# ---------------------------------------------------------------------------


def relator(params: GroupParams, kind: int, **data) -> Word:
    """A word that must be trivial in the group.

    kind=1: data m          -> [a_m, a_m]
    kind=2: data p, q       -> [a_p, a_q, a_p, a_q], requires |p & q| < k-1
    kind=3: data u, order   -> squared product of the k+1 k-subsets of the
                               (k+1)-set u, in the given order (default lex)
    """
    if kind == 1:
        m = make_generator(data["m"], params)
        return Word(params, (m, m))
    if kind == 2:
        p = make_generator(data["p"], params)
        q = make_generator(data["q"], params)
        if not commutes(p, q, params):
            raise InvalidRelator(
                f"{p} and {q} share {len(set(p) & set(q))} indices; "
                f"commutation needs fewer than {params.k - 1}"
            )
        return Word(params, (p, q, p, q))
    if kind == 3:
        u = sorted(data["u"])
        if len(u) != params.k + 1 or len(set(u)) != len(u):
            raise InvalidRelator(f"u must be a ({params.k + 1})-subset, got {u}")
        for i in u:
            if not 1 <= i <= params.n:
                raise IndexOutOfRange(f"index {i} outside 1..{params.n}")
        subsets = [tuple(s) for s in itertools.combinations(u, params.k)]
        order = data.get("order")
        if order is None:
            order = subsets
        else:
            order = [make_generator(g, params) for g in order]
            if sorted(order) != sorted(subsets):
                raise InvalidRelator(
                    f"order must enumerate the {params.k}-subsets of {u} exactly once"
                )
        return Word(params, tuple(order) + tuple(order))
    raise InvalidRelator(f"unknown relator kind {kind!r}")


def epsilon_element(params: GroupParams, fixed: Iterable[int], order: Sequence[int]) -> Word:
    """The square of the product of all generators through a fixed (k-1)-set.

    `fixed` has k-1 indices; `order` enumerates the remaining n-k+1
    indices.  The word is (a_{fixed+l_1} ... a_{fixed+l_{n-k+1}})^2.
    """
    fx = sorted(fixed)
    if len(fx) != params.k - 1 or len(set(fx)) != len(fx):
        raise WrongCardinality(f"fixed must be a ({params.k - 1})-subset, got {fx}")
    complement = [i for i in range(1, params.n + 1) if i not in fx]
    if sorted(order) != complement:
        raise WrongCardinality(
            f"order must be a permutation of {complement}, got {list(order)}"
        )
    half = tuple(make_generator(fx + [l], params) for l in order)
    return Word(params, half + half)


def include_up(w: Word) -> Word:
    """Letterwise m -> m + {n+1}, landing in params (n+1, k+1)."""
    p2 = GroupParams(w.params.n + 1, w.params.k + 1)
    new_index = w.params.n + 1
    return Word(p2, tuple(g + (new_index,) for g in w.letters))


def project_down(w: Word) -> Word:
    """Letterwise inverse of include_up: delete letters missing the top index.

    Letters containing n map to the letter with n removed; all others map
    to the identity.  Lands in params (n-1, k-1).
    """
    if w.params.k - 1 < 2:
        raise GroupError(f"cannot project below k=2 (got k={w.params.k})")
    p2 = GroupParams(w.params.n - 1, w.params.k - 1)
    top = w.params.n
    kept = tuple(g[:-1] for g in w.letters if g[-1] == top)
    return Word(p2, kept)


def random_word(params: GroupParams, rng, max_len: int = 12) -> Word:
    """Uniform-length random word over the full generator set (test helper)."""
    tab = _table(params.n, params.k)
    length = rng.randrange(max_len + 1)
    return Word(params, tuple(tab.gens[rng.randrange(len(tab.gens))] for _ in range(length)))


def random_relator(params: GroupParams, rng) -> Word:
    """Random relator of random kind; kind 2 only if any pair commutes."""
    kinds = [1, 3]
    if params.n >= params.k + 2:  # commuting pairs exist only from n = k+2 on
        kinds.append(2)
    kind = rng.choice(kinds)
    idx = list(range(1, params.n + 1))
    if kind == 1:
        return relator(params, 1, m=rng.sample(idx, params.k))
    if kind == 2:
        while True:
            p = rng.sample(idx, params.k)
            q = rng.sample(idx, params.k)
            if len(set(p) & set(q)) < params.k - 1:
                return relator(params, 2, p=p, q=q)
    u = rng.sample(idx, params.k + 1)
    subsets = list(itertools.combinations(sorted(u), params.k))
    rng.shuffle(subsets)
    return relator(params, 3, u=u, order=subsets)


# ---------------------------------------------------------------------------
# Bounded equality search.
#
# States are normal forms under (1)+(2).  Moves replace a gatherable
# occurrence of the k+1 distinct k-subsets of some (k+1)-set U by its
# reversal (relation (3)), tolerating interleaved letters that commute
# out of the occurrence window, then renormalize.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    max_visited: int = 10_000
    max_depth: int = 6

    def __post_init__(self):
        if self.max_visited < 1 or self.max_depth < 0:
            raise GroupError("budget limits must be positive")


@dataclass(frozen=True)
class EqualityVerdict:
    """Outcome of `equal`.

    status "equal":    certificate is a chain of (label, Word) pairs from
                       the first word to the second, each step one
                       normalization or one relation-(3) reversal.
    status "distinct": certificate is (invariant name, value1, value2).
    status "unknown":  certificate is search statistics.
    """

    status: str
    certificate: tuple = ()


def _exit_assignment(codes, collected_pos, skipped_pos, tab):
    """Decide whether skipped letters can commute out of an occurrence window.

    Each skipped letter must exit left (commuting with every collected
    letter before it) or right (commuting with every collected letter
    after it); a right-exiting letter followed by a left-exiting one must
    itself commute with it, since commutation moves preserve the relative
    order of non-commuting letters.  Returns a dict pos -> "L"/"R", or
    None when no assignment works.
    """
    if not skipped_pos:
        return {}
    if len(skipped_pos) > 16:
        return None
    options = []
    for q in skipped_pos:
        mask = tab.commute[codes[q]]
        can_l = all((mask >> codes[p]) & 1 for p in collected_pos if p < q)
        can_r = all((mask >> codes[p]) & 1 for p in collected_pos if p > q)
        opts = []
        if can_l:
            opts.append("L")
        if can_r:
            opts.append("R")
        if not opts:
            return None
        options.append(opts)

    assignment = {}

    def backtrack(i):
        if i == len(skipped_pos):
            return True
        q = skipped_pos[i]
        for side in options[i]:
            ok = True
            if side == "L":
                mask = tab.commute[codes[q]]
                for j in range(i):
                    qj = skipped_pos[j]
                    if assignment[qj] == "R" and not (mask >> codes[qj]) & 1:
                        ok = False
                        break
            if ok:
                assignment[q] = side
                if backtrack(i + 1):
                    return True
                del assignment[q]
        return False

    return assignment if backtrack(0) else None


def _relation3_neighbors(codes, tab):
    """Yield (U, rewritten code list) for every gatherable relation-(3) occurrence."""
    k = tab.k
    support = sorted({i for c in codes for i in tab.gens[c]})
    if len(support) < k + 1:
        return
    for u in itertools.combinations(support, k + 1):
        target = {tab.code[m] for m in itertools.combinations(u, k)}
        for start, c0 in enumerate(codes):
            if c0 not in target:
                continue
            collected = []
            collected_pos = []
            skipped_pos = []
            for q in range(start, len(codes)):
                c = codes[q]
                if c in target:
                    if c in collected:
                        break
                    collected.append(c)
                    collected_pos.append(q)
                    if len(collected) == k + 1:
                        break
                else:
                    skipped_pos.append(q)
            if len(collected) < k + 1:
                continue
            assignment = _exit_assignment(codes, collected_pos, skipped_pos, tab)
            if assignment is None:
                continue
            left = [codes[q] for q in skipped_pos if assignment[q] == "L"]
            right = [codes[q] for q in skipped_pos if assignment[q] == "R"]
            new = (
                codes[:start]
                + left
                + list(reversed(collected))
                + right
                + codes[collected_pos[-1] + 1 :]
            )
            yield u, new


def equal(w1: Word, w2: Word, budget: SearchBudget | None = None) -> EqualityVerdict:
    """Semidecide equality of two words in the group.

    Tries, in order: identical normal forms under (1)+(2); a separating
    parity invariant (returns Distinct); breadth-first search over
    relation-(3) reversals between normal forms.  Budget exhaustion
    yields Unknown, never a guess.
    """
    _require_same_params(w1, w2)
    if budget is None:
        budget = SearchBudget()
    params = w1.params
    tab = _table(params.n, params.k)

    start = tuple(_nf_codes(_encode(w1), tab))
    goal = tuple(_nf_codes(_encode(w2), tab))

    def finish(chain_codes, labels):
        chain = [("word", w1), ("normal form", _decode(start, params))]
        for lab, st in zip(labels, chain_codes):
            chain.append((lab, _decode(st, params)))
        chain.append(("normal form of", w2))
        return EqualityVerdict("equal", tuple(chain))

    if start == goal:
        return finish([], [])

    for name, f in separating_invariants(params):
        v1, v2 = f(w1), f(w2)
        if v1 != v2:
            return EqualityVerdict("distinct", (name, v1, v2))

    parent = {start: None}
    depth = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if depth[cur] >= budget.max_depth:
            continue
        for u, new in _relation3_neighbors(list(cur), tab):
            state = tuple(_nf_codes(new, tab))
            if state in parent:
                continue
            parent[state] = (cur, u)
            depth[state] = depth[cur] + 1
            if state == goal:
                states, labels = [], []
                node = state
                while parent[node] is not None:
                    prev, uu = parent[node]
                    states.append(node)
                    labels.append("reverse {" + ",".join(map(str, uu)) + "}")
                    node = prev
                return finish(states[::-1], labels[::-1])
            if len(parent) >= budget.max_visited:
                return EqualityVerdict(
                    "unknown", (("visited", len(parent)), ("reason", "budget"))
                )
            queue.append(state)
    return EqualityVerdict(
        "unknown", (("visited", len(parent)), ("reason", "frontier exhausted"))
    )


def verify_equal_certificate(verdict: EqualityVerdict, w1: Word, w2: Word) -> bool:
    """Replay an Equal certificate: every step must be a sound rewrite.

    Normalization steps are rechecked with `normal_form`; reversal steps
    are rechecked by regenerating the neighbor set.  Raises on any
    inconsistency.
    """
    if verdict.status != "equal":
        raise AssertionError("only Equal verdicts carry a chain")
    chain = verdict.certificate
    if chain[0][1].letters != w1.letters or chain[-1][1].letters != w2.letters:
        raise AssertionError("certificate endpoints do not match the words")
    tab = _table(w1.params.n, w1.params.k)
    for (lab_a, a), (lab_b, b) in zip(chain, chain[1:]):
        if lab_b.startswith("normal form"):
            na = normal_form(a).letters
            nb = normal_form(b).letters
            if na != nb:
                raise AssertionError(f"bad normalization step: {a} -> {b}")
        elif lab_b.startswith("reverse"):
            codes_a = _encode(a)
            targets = {
                tuple(_nf_codes(new, tab))
                for _u, new in _relation3_neighbors(codes_a, tab)
            }
            if tuple(_encode(b)) not in targets:
                raise AssertionError(f"unjustified reversal step: {a} -> {b}")
        else:
            raise AssertionError(f"unknown step label {lab_b!r}")
        if abelianize(a) != abelianize(b):
            raise AssertionError("certificate step changes the parity vector")
    return True


# ---------------------------------------------------------------------------
# Word text format: header "n=5 k=3", then letters like {1,2,3} or "e".
# ---------------------------------------------------------------------------


class WordFormatError(ValueError):
    pass


def format_word(w: Word) -> str:
    """Serialize with the params header; inverse of parse_word."""
    return f"n={w.params.n} k={w.params.k}\n{w}\n"


def format_letters(letters: Iterable[Generator]) -> str:
    text = " ".join("{" + ",".join(map(str, g)) + "}" for g in letters)
    return text if text else "e"


def _parse_header(line: str) -> GroupParams:
    fields = dict(
        part.split("=", 1) for part in line.split() if "=" in part
    )
    try:
        n, k = int(fields["n"]), int(fields["k"])
    except (KeyError, ValueError) as exc:
        raise WordFormatError(f"bad params header {line!r}") from exc
    try:
        return GroupParams(n, k)
    except GroupError as exc:
        raise WordFormatError(str(exc)) from exc


def _parse_letter(token: str, params: GroupParams) -> Generator:
    if not (token.startswith("{") and token.endswith("}")):
        raise WordFormatError(f"letter {token!r} must be brace-delimited")
    body = token[1:-1]
    if "," in body:
        parts = body.split(",")
    else:
        # comma-free digit run, unambiguous only for n <= 9
        if params.n > 9:
            raise WordFormatError(
                f"comma-free letter {token!r} is ambiguous for n={params.n}"
            )
        parts = list(body)
    try:
        indices = [int(p) for p in parts]
    except ValueError as exc:
        raise WordFormatError(f"letter {token!r} has a non-integer index") from exc
    return make_generator(indices, params)


def parse_word(text: str) -> Word:
    """Parse the word file format (header line, then one word line)."""
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise WordFormatError("empty word file")
    params = _parse_header(lines[0])
    if len(lines) == 1:
        raise WordFormatError("missing word line after the params header")
    if len(lines) > 2:
        raise WordFormatError("expected exactly one word line")
    body = lines[1]
    if body == "e":
        return Word(params, ())
    letters = tuple(_parse_letter(tok, params) for tok in body.split())
    return Word(params, letters)
