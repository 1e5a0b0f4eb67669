import itertools

import numpy as np
import pytest

from cpcr.decode import greedy_ctc_decode, prefix_beam_search, train_char_lm


def random_posteriors(rng, t_len, n_classes):
    x = rng.normal(size=(t_len, n_classes)) * 1.5
    return x - np.log(np.exp(x).sum(axis=1, keepdims=True))


def exhaustive_best_label(log_probs: np.ndarray, chars: str) -> tuple[str, float]:
    """Argmax over label strings of the summed alignment probability."""
    t_len, n_sym = log_probs.shape
    scores: dict[tuple[int, ...], float] = {}
    for path in itertools.product(range(n_sym), repeat=t_len):
        collapsed = []
        prev = None
        for s in path:
            if s != 0 and s != prev:
                collapsed.append(s)
            prev = s
        key = tuple(collapsed)
        lp = sum(log_probs[t, s] for t, s in enumerate(path))
        scores[key] = np.logaddexp(scores.get(key, -np.inf), lp)
    best = min(scores.items(), key=lambda kv: (-kv[1], kv[0]))
    return "".join(chars[i - 1] for i in best[0]), best[1]


class TestGreedy:
    def test_collapse_rule(self):
        # trace a a - b b - -> "ab"  (indices: blank=0, a=1, b=2)
        logp = np.log(
            np.array(
                [[0.1, 0.8, 0.1], [0.2, 0.7, 0.1], [0.6, 0.2, 0.2], [0.1, 0.2, 0.7], [0.2, 0.3, 0.5], [0.9, 0.05, 0.05]]
            )
        )
        res = greedy_ctc_decode(logp, "ab")
        assert res.text == "ab"
        assert res.frame_labels == [1, 1, 0, 2, 2, 0]

    def test_blank_separates_repeats(self):
        logp = np.log(np.array([[0.1, 0.9], [0.9, 0.1], [0.1, 0.9]]))
        assert greedy_ctc_decode(logp, "a").text == "aa"

    def test_all_blank_empty(self):
        logp = np.log(np.array([[0.9, 0.1], [0.9, 0.1]]))
        res = greedy_ctc_decode(logp, "a")
        assert res.text == ""

    def test_never_emits_blank_and_bounded_length(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            t_len = int(rng.integers(1, 12))
            logp = random_posteriors(rng, t_len, 4)
            res = greedy_ctc_decode(logp, "abc")
            assert set(res.text) <= set("abc")
            assert len(res.text) <= t_len


class TestPrefixBeamSearch:
    def test_beam_one_equals_greedy_on_random_inputs(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            t_len = int(rng.integers(1, 9))
            n_chars = int(rng.integers(1, 5))
            logp = random_posteriors(rng, t_len, n_chars + 1)
            chars = "abcd"[:n_chars]
            assert prefix_beam_search(logp, chars, beam_width=1).text == greedy_ctc_decode(logp, chars).text

    def test_huge_beam_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(40):
            t_len = int(rng.integers(1, 5))
            n_chars = int(rng.integers(1, 3))
            logp = random_posteriors(rng, t_len, n_chars + 1)
            chars = "ab"[:n_chars]
            want_text, want_score = exhaustive_best_label(logp, chars)
            got = prefix_beam_search(logp, chars, beam_width=(n_chars + 1) ** t_len + 8)
            assert got.text == want_text
            assert got.score == pytest.approx(want_score, abs=1e-9)

    def test_lm_weight_zero_ignores_lm(self):
        rng = np.random.default_rng(3)
        lm_a = train_char_lm(["aab", "abb"], order=2, alpha=0.5)
        lm_b = train_char_lm(["bbb"], order=2, alpha=0.5)
        for _ in range(20):
            logp = random_posteriors(rng, 6, 3)
            r1 = prefix_beam_search(logp, "ab", 4, lm=lm_a, lm_weight=0.0)
            r2 = prefix_beam_search(logp, "ab", 4, lm=lm_b, lm_weight=0.0)
            r3 = prefix_beam_search(logp, "ab", 4, lm=None)
            assert r1.text == r2.text == r3.text

    def test_lm_biases_toward_in_domain_strings(self):
        # ambiguous posteriors; an LM trained on "ab" should pick "ab" over "aa"
        logp = np.log(
            np.array([[0.02, 0.96, 0.02], [0.02, 0.49, 0.49], [0.96, 0.02, 0.02]])
        )
        lm = train_char_lm(["ab"] * 50, order=2, alpha=0.01)
        no_lm = prefix_beam_search(logp, "ab", 8)
        with_lm = prefix_beam_search(logp, "ab", 8, lm=lm, lm_weight=2.0)
        assert no_lm.text in ("aa", "ab")
        assert with_lm.text == "ab"

    def test_score_nondecreasing_in_beam_width(self):
        rng = np.random.default_rng(4)
        for _ in range(60):
            t_len = int(rng.integers(2, 7))
            logp = random_posteriors(rng, t_len, 4)
            scores = [prefix_beam_search(logp, "abc", w).score for w in (1, 2, 4, 8, 16, 64)]
            for a, b in zip(scores, scores[1:]):
                assert b >= a - 1e-12

    def test_beam_width_zero_rejected(self):
        with pytest.raises(ValueError):
            prefix_beam_search(np.zeros((2, 2)), "a", beam_width=0)
