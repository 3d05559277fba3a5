"""Confluence of the normal form under randomized rewrite orders."""

import random

from gnk.group import GroupParams, abelianize, normal_form, random_word

from util import randomized_normal_form


def test_randomized_orders_agree_with_deterministic():
    rng = random.Random(20)
    for _ in range(200):
        k = rng.choice([3, 4, 5])
        n = rng.randint(k, 7)
        params = GroupParams(n, k)
        word = random_word(params, rng, max_len=18)
        reference = normal_form(word)
        for _ in range(3):
            assert randomized_normal_form(word, rng) == reference


def test_randomized_orders_agree_on_long_words():
    rng = random.Random(21)
    params = GroupParams(7, 3)
    for _ in range(30):
        word = random_word(params, rng, max_len=30)
        results = {randomized_normal_form(word, rng).letters for _ in range(5)}
        assert len(results) == 1
        assert results == {normal_form(word).letters}


def test_normal_form_is_idempotent():
    rng = random.Random(22)
    params = GroupParams(6, 3)
    for _ in range(100):
        word = random_word(params, rng, max_len=20)
        nf = normal_form(word)
        assert normal_form(nf) == nf
        assert abelianize(nf) == abelianize(word)
