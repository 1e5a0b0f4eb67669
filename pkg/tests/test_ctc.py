import itertools

import numpy as np
import pytest

from cpcr import numcore as nc
from cpcr.asr import CharVocab, CtcLengthError, FramePosteriors, VocabError, ctc_loss


def ctc_brute_force(log_probs: np.ndarray, label_ids: list[int]) -> float:
    """-log sum over all (V+1)^T alignment paths that collapse to the label."""
    t_len, n_sym = log_probs.shape
    target = tuple(label_ids)
    total = -np.inf
    for path in itertools.product(range(n_sym), repeat=t_len):
        collapsed = []
        prev = None
        for s in path:
            if s != 0 and s != prev:
                collapsed.append(s)
            prev = s
        if tuple(collapsed) == target:
            total = np.logaddexp(total, sum(log_probs[t, s] for t, s in enumerate(path)))
    return -total


def random_posteriors(rng, t_len, n_classes):
    x = rng.normal(size=(t_len, n_classes))
    return x - np.log(np.exp(x).sum(axis=1, keepdims=True))


class TestCtcExamples:
    def test_single_frame_single_char(self):
        vocab = CharVocab(chars=("a",))
        logp = np.log(np.array([[0.4, 0.6]]))
        loss = ctc_loss(logp, "a", vocab)
        assert loss.item() == pytest.approx(-np.log(0.6), abs=1e-12)

    def test_two_frames_uniform(self):
        # alignments {aa, a-, -a} each 0.25 -> -log 0.75
        vocab = CharVocab(chars=("a",))
        logp = np.log(np.full((2, 2), 0.5))
        loss = ctc_loss(logp, "a", vocab)
        assert loss.item() == pytest.approx(0.2876820724517809, abs=1e-12)

    def test_matches_brute_force_enumeration(self):
        rng = np.random.default_rng(0)
        vocabs = {1: CharVocab(chars=("a",)), 2: CharVocab(chars=("a", "b")), 3: CharVocab(chars=("a", "b", "c"))}
        for _ in range(60):
            v = int(rng.integers(1, 4))
            t_len = int(rng.integers(1, 6))
            vocab = vocabs[v]
            label_len = int(rng.integers(1, min(3, t_len) + 1))
            ids = [int(i) for i in rng.integers(1, v + 1, size=label_len)]
            label = vocab.decode(ids)
            logp = random_posteriors(rng, t_len, v + 1)
            try:
                got = ctc_loss(logp, label, vocab).item()
            except CtcLengthError:
                from cpcr.asr.ctc import min_frames_for

                assert min_frames_for(ids) > t_len
                continue
            want = ctc_brute_force(logp, ids)
            assert got == pytest.approx(want, abs=1e-6)


class TestCtcErrorPaths:
    def test_label_too_long_raises(self):
        vocab = CharVocab(chars=("a", "b"))
        logp = random_posteriors(np.random.default_rng(1), 2, 3)
        with pytest.raises(CtcLengthError):
            ctc_loss(logp, "aba", vocab)

    def test_adjacent_repeat_needs_blank_frame(self):
        vocab = CharVocab(chars=("a",))
        logp = random_posteriors(np.random.default_rng(2), 2, 2)
        with pytest.raises(CtcLengthError):
            ctc_loss(logp, "aa", vocab)  # needs >= 3 frames

    def test_out_of_vocab_character(self):
        vocab = CharVocab(chars=("a",))
        logp = random_posteriors(np.random.default_rng(3), 4, 2)
        with pytest.raises(VocabError):
            ctc_loss(logp, "az", vocab)

    def test_impossible_label_gives_inf_loss(self):
        # fits in T but has zero probability at every frame -> +inf (error path)
        vocab = CharVocab(chars=("a", "b"))
        logp = np.log(np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.5, 0.5, 0.0]]))
        loss = ctc_loss(nc.Tensor(logp), "ab", vocab)
        assert loss.item() == float("inf")
        loss.backward(check_finite=False)

    def test_empty_label_rejected(self):
        vocab = CharVocab(chars=("a",))
        with pytest.raises(ValueError):
            ctc_loss(random_posteriors(np.random.default_rng(4), 3, 2), "", vocab)


class TestCtcProperties:
    def test_vocab_relabeling_invariance(self):
        rng = np.random.default_rng(5)
        vocab = CharVocab(chars=("a", "b", "c"))
        logp = random_posteriors(rng, 5, 4)
        base = ctc_loss(logp, "acb", vocab).item()
        # permute characters consistently in posterior columns and label
        perm = [0, 3, 1, 2]  # blank fixed; a->c, b->a, c->b
        relabeled = logp[:, np.argsort(perm)] if False else logp[:, perm]
        swapped = ctc_loss(relabeled, "acb".translate(str.maketrans("abc", "cab")), vocab).item()
        assert base == pytest.approx(swapped, abs=1e-12)

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(6)
        vocab = CharVocab(chars=("a", "b"))
        x = rng.normal(size=(4, 3))

        def build(t):
            return ctc_loss(t.log_softmax(axis=1), "ab", vocab)

        assert nc.check_gradients(build, [x]) <= 1e-5

    def test_frame_posteriors_row_validation(self):
        with pytest.raises(ValueError, match="normalized"):
            FramePosteriors(log_probs=np.zeros((3, 4)))
        FramePosteriors(log_probs=np.full((3, 4), np.log(0.25)))
