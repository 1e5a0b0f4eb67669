import itertools
import math

import numpy as np
import pytest

from cpcr.decode import CharNgramLm, lm_score, train_char_lm
from cpcr.decode.lm import EOS


class TestEstimation:
    def test_unigram_limit_alpha_to_zero(self):
        # corpus {"aa"}: character distribution concentrates on 'a'
        lm = train_char_lm(["aa"], order=1, alpha=1e-9)
        assert math.exp(lm.cond_logprob("", "a")) == pytest.approx(1.0, abs=1e-6)
        # char terms of score -> 0; the end marker holds the remaining mass
        char_terms = lm.cond_logprob("", "a") * 2
        assert char_terms == pytest.approx(0.0, abs=1e-6)
        assert lm_score(lm, "aa") == pytest.approx(char_terms + lm.cond_logprob("", EOS))

    def test_conditionals_sum_to_one(self):
        lm = train_char_lm(["abab", "bba", "aab"], order=3, alpha=0.2)
        contexts = [""] + ["a", "b", "ab", "ba", "bb", "aa"]
        for ctx in contexts:
            total = sum(math.exp(lm.cond_logprob(ctx, c)) for c in lm.chars)
            total += math.exp(lm.cond_logprob(ctx, EOS))
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_unseen_context_uniform_backoff(self):
        lm = train_char_lm(["aaa"], order=3, alpha=0.7)
        # context never observed -> uniform over chars + end marker
        p = math.exp(lm.cond_logprob("zz", "a"))
        assert p == pytest.approx(1.0 / lm.support_size)

    def test_total_probability_over_short_strings_bounded(self):
        lm = train_char_lm(["aa", "a"], order=2, alpha=0.3)
        total = 0.0
        for length in range(0, 3):
            for chars in itertools.product(lm.chars, repeat=length):
                total += math.exp(lm_score(lm, "".join(chars)))
        assert total <= 1.0 + 1e-9

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            train_char_lm([], order=2, alpha=0.1)

    def test_invalid_hyperparameters(self):
        with pytest.raises(ValueError):
            train_char_lm(["a"], order=0, alpha=0.1)
        with pytest.raises(ValueError):
            train_char_lm(["a"], order=2, alpha=0.0)


class TestScoring:
    def test_in_domain_strings_score_higher(self):
        lm = train_char_lm(["abab", "ababab", "abab ab"], order=3, alpha=0.05)
        assert lm_score(lm, "abab") > lm_score(lm, "bbbb")

    def test_context_window_respects_order(self):
        # order-2 model: probability of symbol depends on one previous char only
        lm = train_char_lm(["ab", "cb"], order=2, alpha=0.1)
        assert lm.cond_logprob("xa", "b") == lm.cond_logprob("a", "b")

    def test_out_of_vocab_symbol_rejected(self):
        lm = train_char_lm(["ab"], order=2, alpha=0.1)
        with pytest.raises(ValueError):
            lm.cond_logprob("a", "z")
