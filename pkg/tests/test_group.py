"""Word arithmetic: generators, normal forms, equality search, hierarchy maps."""

import random

import pytest

from gnk.group import (
    DuplicateIndex,
    EqualityVerdict,
    GroupError,
    GroupParams,
    IndexOutOfRange,
    InvalidRelator,
    ParamsMismatch,
    SearchBudget,
    Word,
    WordFormatError,
    WrongCardinality,
    abelianize,
    check_invariant_battery,
    commutes,
    epsilon_element,
    equal,
    format_word,
    identity,
    include_up,
    inverse,
    make_generator,
    make_word,
    multiply,
    normal_form,
    parse_word,
    project_down,
    random_relator,
    random_word,
    relator,
    verify_equal_certificate,
)

P43 = GroupParams(4, 3)
P53 = GroupParams(5, 3)


def w(params, *letters):
    return make_word(params, letters)


class TestGenerators:
    def test_sorts_indices(self):
        assert make_generator({3, 1, 2}, P53) == (1, 2, 3)

    def test_wrong_cardinality(self):
        with pytest.raises(WrongCardinality):
            make_generator([1, 2], P53)

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            make_generator([1, 2, 6], P53)

    def test_duplicates(self):
        with pytest.raises(DuplicateIndex):
            make_generator([1, 2, 2], P53)

    def test_params_validation(self):
        with pytest.raises(GroupError):
            GroupParams(3, 1)
        with pytest.raises(GroupError):
            GroupParams(2, 3)
        GroupParams(3, 3)  # single-subset scans are allowed

    def test_commutes(self):
        assert commutes((1, 4, 5), (1, 2, 3), P53)
        assert not commutes((1, 3, 4), (1, 2, 3), P43)
        assert not commutes((1, 2, 3), (1, 2, 3), P53)


class TestWordOps:
    def test_multiply_identity(self):
        a = w(P53, [1, 2, 3])
        assert multiply(a, identity(P53)).letters == a.letters

    def test_multiply_concatenates(self):
        got = multiply(w(P53, [1, 2, 3]), w(P53, [1, 4, 5]))
        assert got.letters == ((1, 2, 3), (1, 4, 5))

    def test_multiply_no_implicit_normalization(self):
        got = multiply(w(P53, [1, 2, 3]), w(P53, [1, 2, 3]))
        assert got.letters == ((1, 2, 3), (1, 2, 3))

    def test_multiply_params_mismatch(self):
        with pytest.raises(ParamsMismatch):
            multiply(w(P53, [1, 2, 3]), w(P43, [1, 2, 3]))

    def test_inverse_is_reversal(self):
        assert inverse(w(P53, [1, 2, 3], [1, 4, 5])).letters == (
            (1, 4, 5),
            (1, 2, 3),
        )
        assert inverse(identity(P53)).letters == ()
        assert inverse(w(P53, [1, 2, 3])).letters == ((1, 2, 3),)

    def test_word_validation(self):
        with pytest.raises(GroupError):
            Word(P53, ((2, 1, 3),))


class TestNormalForm:
    def test_involution_cancels(self):
        assert normal_form(w(P53, [1, 2, 3], [1, 2, 3])).letters == ()

    def test_commuting_swap_to_lex_order(self):
        got = normal_form(w(P53, [1, 4, 5], [1, 2, 3]))
        assert got.letters == ((1, 2, 3), (1, 4, 5))

    def test_blocked_swap_stays(self):
        got = normal_form(w(P43, [1, 3, 4], [1, 2, 3]))
        assert got.letters == ((1, 3, 4), (1, 2, 3))

    def test_cancellation_through_commuting_letters(self):
        # the {2,4,5} between the two {1,2,3} commutes with them
        got = normal_form(w(P53, [1, 2, 3], [2, 4, 5], [1, 2, 3]))
        assert got.letters == ((2, 4, 5),)

    def test_soundness_random(self):
        rng = random.Random(4)
        for _ in range(300):
            params = GroupParams(rng.randint(4, 7), rng.choice([3, 4]))
            word = random_word(params, rng, max_len=16)
            nf = normal_form(word)
            assert abelianize(nf) == abelianize(word)
            assert len(nf) <= len(word)
            assert (len(word) - len(nf)) % 2 == 0


class TestEqual:
    def test_relation3_reversal_pair(self):
        w1 = w(P43, [1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4])
        w2 = w(P43, [2, 3, 4], [1, 3, 4], [1, 2, 4], [1, 2, 3])
        verdict = equal(w1, w2)
        assert verdict.status == "equal"
        verify_equal_certificate(verdict, w1, w2)

    def test_generator_vs_identity_distinct(self):
        verdict = equal(w(P53, [1, 2, 3]), identity(P53))
        assert verdict.status == "distinct"
        name, v1, v2 = verdict.certificate
        assert name == "parity" and v1 != v2

    def test_square_vs_identity_equal(self):
        verdict = equal(w(P53, [1, 2, 3], [1, 2, 3]), identity(P53))
        assert verdict.status == "equal"

    def test_involution_found_within_budget_one(self):
        for g in [[1, 2, 3], [2, 4, 5]]:
            verdict = equal(
                w(P53, g, g), identity(P53), SearchBudget(max_visited=1, max_depth=1)
            )
            assert verdict.status == "equal"

    def test_budget_exhaustion_is_unknown(self):
        # trivial word whose triviality needs a reversal move, denied by depth 0
        word = relator(P43, 3, u=[1, 2, 3, 4])
        verdict = equal(word, identity(P43), SearchBudget(max_depth=0))
        assert verdict.status == "unknown"

    def test_params_mismatch(self):
        with pytest.raises(ParamsMismatch):
            equal(w(P53, [1, 2, 3]), w(P43, [1, 2, 3]))

    def test_interleaved_commuting_letter_does_not_hide_reversal(self):
        # relation (3) block for U={1,2,3,4} with {1,2,5}-commuting noise inside
        half = [[1, 2, 3], [1, 2, 4], [1, 3, 4], [2, 3, 4]]
        noisy = half[:2] + [[5, 6, 7]] + half[2:] + half
        params = GroupParams(7, 3)
        word = make_word(params, noisy)
        target = make_word(params, [[5, 6, 7]])
        assert equal(word, target).status == "equal"

    def test_inverse_gives_equal(self):
        rng = random.Random(11)
        for _ in range(50):
            word = random_word(P53, rng, max_len=8)
            verdict = equal(multiply(word, inverse(word)), identity(P53))
            assert verdict.status == "equal"


class TestAbelianize:
    def test_counts_mod_two(self):
        word = w(P53, [1, 2, 3], [1, 4, 5], [1, 2, 3])
        assert abelianize(word) == frozenset({(1, 4, 5)})

    def test_identity_is_empty(self):
        assert abelianize(identity(P53)) == frozenset()

    def test_squared_relator_vanishes(self):
        word = relator(P43, 3, u=[1, 2, 3, 4])
        doubled = multiply(word, word)
        assert abelianize(word) == frozenset()
        assert abelianize(doubled) == frozenset()

    def test_invariant_battery(self):
        rng = random.Random(5)
        assert check_invariant_battery(P53, rng, trials=30)
        assert check_invariant_battery(GroupParams(6, 4), rng, trials=30)


class TestHierarchyMaps:
    def test_include_up_letterwise(self):
        assert include_up(w(P43, [1, 2, 3])).letters == ((1, 2, 3, 5),)
        assert include_up(identity(P43)).letters == ()
        assert include_up(w(P43, [1, 2, 3], [1, 2, 4])).letters == (
            (1, 2, 3, 5),
            (1, 2, 4, 5),
        )

    def test_project_down_formula(self):
        p54 = GroupParams(5, 4)
        assert project_down(make_word(p54, [[1, 2, 3, 5]])).letters == ((1, 2, 3),)
        assert project_down(make_word(p54, [[1, 2, 3, 4]])).letters == ()

    def test_round_trip_literal(self):
        rng = random.Random(6)
        for _ in range(200):
            params = GroupParams(rng.randint(4, 7), rng.choice([3, 4]))
            word = random_word(params, rng, max_len=10)
            assert project_down(include_up(word)).letters == word.letters

    def test_projection_preserves_relators(self):
        rng = random.Random(7)
        p54 = GroupParams(5, 4)
        for _ in range(40):
            rel = random_relator(p54, rng)
            image = project_down(rel)
            verdict = equal(image, identity(image.params))
            assert verdict.status == "equal"

    def test_inclusion_preserves_involution_and_commutation_relators(self):
        rng = random.Random(8)
        for _ in range(40):
            kind = rng.choice([1, 2])
            idx = list(range(1, 6))
            if kind == 1:
                rel = relator(P53, 1, m=rng.sample(idx, 3))
            else:
                rel = relator(P53, 2, p=[1, 2, 3], q=[1, 4, 5])
            image = include_up(rel)
            assert equal(image, identity(image.params)).status == "equal"

    @pytest.mark.xfail(
        strict=True,
        reason="the letterwise index-extension does not preserve reversal "
        "relators: its image misses one letter of the larger reversal "
        "family, and an O(2) reflection representation (all generators to "
        "reflections, every full product squaring to the identity) sends "
        "the image to a nontrivial rotation, so no rewrite chain exists; "
        "the bounded search honestly returns Unknown",
    )
    def test_inclusion_preserves_reversal_relators(self):
        rel = relator(P43, 3, u=[1, 2, 3, 4])
        image = include_up(rel)
        assert equal(image, identity(image.params)).status == "equal"


class TestStructuralWords:
    def test_epsilon_element(self):
        p54 = GroupParams(5, 4)
        eps = epsilon_element(p54, [1, 2, 3], (4, 5))
        assert eps.letters == (
            (1, 2, 3, 4),
            (1, 2, 3, 5),
            (1, 2, 3, 4),
            (1, 2, 3, 5),
        )
        eps2 = epsilon_element(P43, [1, 2], (3, 4))
        assert eps2.letters == ((1, 2, 3), (1, 2, 4), (1, 2, 3), (1, 2, 4))
        assert abelianize(eps) == frozenset()

    def test_epsilon_validation(self):
        with pytest.raises(WrongCardinality):
            epsilon_element(P43, [1, 2, 3], (4,))
        with pytest.raises(WrongCardinality):
            epsilon_element(P43, [1, 2], (3,))

    def test_relator_kinds(self):
        assert relator(P53, 1, m=[1, 2, 3]).letters == ((1, 2, 3), (1, 2, 3))
        kind2 = relator(P53, 2, p=[1, 2, 3], q=[1, 4, 5])
        assert kind2.letters == ((1, 2, 3), (1, 4, 5), (1, 2, 3), (1, 4, 5))
        kind3 = relator(P43, 3, u=[1, 2, 3, 4])
        assert kind3.letters == (
            (1, 2, 3),
            (1, 2, 4),
            (1, 3, 4),
            (2, 3, 4),
        ) * 2

    def test_relator_kind2_rejects_sharing_too_much(self):
        with pytest.raises(InvalidRelator):
            relator(P43, 2, p=[1, 2, 3], q=[1, 2, 4])

    def test_relator_kind3_custom_order_must_cover(self):
        with pytest.raises(InvalidRelator):
            relator(P43, 3, u=[1, 2, 3, 4], order=[[1, 2, 3]] * 4)

    def test_relators_trivial_any_kind3_order(self):
        rng = random.Random(9)
        import itertools

        subsets = list(itertools.combinations(range(1, 5), 3))
        for order in itertools.permutations(subsets):
            rel = relator(P43, 3, u=[1, 2, 3, 4], order=list(order))
            assert equal(rel, identity(P43)).status == "equal"


class TestWordFormat:
    def test_round_trip(self):
        rng = random.Random(10)
        for _ in range(100):
            k = rng.choice([2, 3, 4])
            params = GroupParams(rng.randint(k, 9), k)
            word = random_word(params, rng, max_len=6)
            assert parse_word(format_word(word)) == word

    def test_empty_word(self):
        assert parse_word("n=5 k=3\ne\n") == identity(P53)
        assert format_word(identity(P53)) == "n=5 k=3\ne\n"

    def test_comma_free_letters(self):
        assert parse_word("n=5 k=3\n{123} {145}\n").letters == (
            (1, 2, 3),
            (1, 4, 5),
        )

    def test_comma_free_rejected_for_wide_params(self):
        with pytest.raises(WordFormatError):
            parse_word("n=12 k=3\n{123}\n")

    def test_parse_errors(self):
        with pytest.raises(WordFormatError):
            parse_word("")
        with pytest.raises(WordFormatError):
            parse_word("n=5 k=3\n")
        with pytest.raises(WordFormatError):
            parse_word("nonsense\n{1,2,3}\n")
        with pytest.raises(WrongCardinality):
            parse_word("n=5 k=3\n{1,2}\n")

    def test_certificate_consistency_on_random_pairs(self):
        # Equal verdicts replay; Distinct never co-occurs with a rewrite chain.
        rng = random.Random(12)
        for _ in range(40):
            word = random_word(P43, rng, max_len=6)
            rel = random_relator(P43, rng)
            pos = rng.randrange(len(word.letters) + 1)
            padded = Word(P43, word.letters[:pos] + rel.letters + word.letters[pos:])
            verdict = equal(word, padded)
            assert verdict.status in ("equal", "unknown")
            if verdict.status == "equal":
                verify_equal_certificate(verdict, word, padded)
