import pytest
import itertools
import math
from dataclasses import replace

import numpy as np

from glyphread.alphabet import END, Alphabet
from glyphread.errors import InputError
from glyphread.inference.beamsearch import (
    DecodeConfig,
    Hypothesis,
    beam_decode,
    beam_search,
    greedy_search,
    hypothesis_extend,
)
from glyphread.inference.lexicon import LexiconTrie, build_trie
from glyphread.inference.ngram import fit
from test_utils import RandomScorer, TableScorer, distribution, lm_flip_scorer, random_image, toy_model

SMALL = Alphabet("abc")


def exhaustive(scorer, alphabet, max_length, lm=None, alpha=0.0):
    """Every terminated sequence of at most ``max_length`` symbols, best first."""
    scored = []
    for length in range(max_length):
        for chars in itertools.product(alphabet.chars, repeat=length):
            prefix, score = "", 0.0
            for char in list(chars) + [END]:
                score += float(scorer.log_probs(prefix)[alphabet.index(char)])
                if lm is not None:
                    score += alpha * lm.logprob(prefix, char)
                prefix += char if char != END else ""
            scored.append((-score, tuple(alphabet.encode(prefix)), prefix))
    scored.sort()
    return [(word, -neg) for neg, _, word in scored]


def root(scorer, node=None):
    return Hypothesis((), 0.0, 0.0, 0.0, scorer.initial_state(), node)


def test_extend_without_constraints_yields_every_symbol():
    scorer = TableScorer(SMALL, {})
    children = hypothesis_extend(root(scorer), scorer.log_probs(""), "", SMALL, DecodeConfig())
    assert [c.symbols for c in children] == [(0,), (1,), (2,), (3,)]
    assert [c.complete for c in children] == [False, False, False, True]
    assert all(c.score == pytest.approx(-math.log(4)) for c in children)


def test_zero_weight_matches_disabled_lm():
    scorer = RandomScorer(SMALL, seed=1)
    lm = fit(["abc", "cab"], k_max=3, symbols="abc")
    log_probs = scorer.log_probs("")
    with_lm = hypothesis_extend(root(scorer), log_probs, "", SMALL, DecodeConfig(lm=lm, alpha=0.0))
    without = hypothesis_extend(root(scorer), log_probs, "", SMALL, DecodeConfig())
    assert [c.score for c in with_lm] == [c.score for c in without]
    assert all(c.lm_score == 0.0 for c in with_lm)


def test_trie_restricts_children():
    alphabet = Alphabet()
    trie = build_trie(["cat", "car"])
    scorer = TableScorer(alphabet, {})
    hyp = Hypothesis(tuple(alphabet.encode("ca")), -1.0, -1.0, 0.0, "ca", trie.find("ca"))
    children = hypothesis_extend(hyp, scorer.log_probs("ca"), "ca", alphabet, DecodeConfig(trie=trie))
    assert sorted(alphabet.decode(c.symbols) for c in children) == ["car", "cat"]
    assert not any(c.complete for c in children)


def test_last_step_only_allows_end():
    scorer = TableScorer(SMALL, {})
    children = hypothesis_extend(root(scorer), scorer.log_probs(""), "", SMALL, DecodeConfig(), last_step=True)
    assert [c.symbols for c in children] == [(SMALL.end,)]


def test_extend_edge_cases():
    scorer = TableScorer(SMALL, {})
    done = Hypothesis((SMALL.end,), 0.0, 0.0, 0.0, "", complete=True)
    assert hypothesis_extend(done, scorer.log_probs(""), "", SMALL, DecodeConfig()) == []
    with pytest.raises(InputError):
        hypothesis_extend(root(scorer), np.zeros(5), "", SMALL, DecodeConfig())


@pytest.mark.parametrize("kwargs", [
    {"beam_width": 0},
    {"alpha": -0.5},
    {"max_length": 0},
    {"lexicon_mode": "fuzzy"},
    {"trie": LexiconTrie()},
    {"lexicon_words": []},
])
def test_invalid_decode_config(kwargs):
    with pytest.raises(InputError):
        DecodeConfig(**kwargs)


@pytest.mark.parametrize("seed", range(10))
def test_width_one_matches_greedy(seed):
    alphabet = Alphabet()
    scorer = RandomScorer(alphabet, seed)
    beam = beam_search(scorer, alphabet, DecodeConfig(beam_width=1, max_length=6))
    greedy = greedy_search(scorer, alphabet, max_length=6)
    assert beam[0].word == greedy.word
    assert beam[0].score == pytest.approx(greedy.score)


@pytest.mark.parametrize("use_lm", [False, True])
def test_wide_beam_matches_exhaustive_search(use_lm):
    lm = fit(["abc", "ab", "cab", "ba"], k_max=3, delta=0.1, symbols="abc") if use_lm else None
    config = DecodeConfig(beam_width=64, max_length=4, lm=lm, alpha=0.3)
    for seed in range(100):
        scorer = RandomScorer(SMALL, seed)
        results = beam_search(scorer, SMALL, config)
        expected = exhaustive(scorer, SMALL, 4, lm=lm, alpha=0.3)
        assert len(results) == len(expected) == 40
        assert [r.word for r in results] == [word for word, _ in expected]
        assert [r.score for r in results] == pytest.approx([score for _, score in expected])
        assert all(r.complete for r in results)


def test_language_model_flips_ranking():
    alphabet = Alphabet()
    scorer = lm_flip_scorer(alphabet)
    plain = beam_search(scorer, alphabet, DecodeConfig(max_length=6))
    assert plain[0].word == "zq"
    assert plain[0].score == pytest.approx(-1.0)

    lm = fit(["th", "the", "this", "that", "then"], k_max=3, delta=0.1)
    fused = beam_search(scorer, alphabet, DecodeConfig(max_length=6, lm=lm, alpha=0.3))
    assert fused[0].word == "th"
    assert fused[0].score == pytest.approx(-2.4447, abs=1e-3)
    assert fused[0].lm_score == pytest.approx(-4.1491, abs=1e-3)
    zq = next(r for r in fused if r.word == "zq")
    assert zq.score == pytest.approx(-4.8146, abs=1e-3)


def cab_scorer(alphabet):
    return TableScorer(
        alphabet,
        {
            "": distribution(alphabet, {"c": 0.9}),
            "c": distribution(alphabet, {"a": 0.9}),
            "ca": distribution(alphabet, {"b": 0.8, "t": 0.1}),
            "cab": distribution(alphabet, {END: 0.9}),
            "cat": distribution(alphabet, {END: 0.9}),
        },
    )


def test_trie_forces_lexicon_word():
    alphabet = Alphabet()
    scorer = cab_scorer(alphabet)
    assert beam_search(scorer, alphabet, DecodeConfig(max_length=6))[0].word == "cab"
    constrained = beam_search(scorer, alphabet, DecodeConfig(max_length=6, trie=build_trie(["cat"])))
    assert [r.word for r in constrained] == ["cat"]


def test_edit_mode_snaps_to_nearest_word():
    alphabet = Alphabet()
    config = DecodeConfig(max_length=6, lexicon_mode="edit", lexicon_words=["dog", "cat"], top=1)
    result = beam_search(cab_scorer(alphabet), alphabet, config)[0]
    assert result.word == "cat"
    assert result.raw == "cab"


def test_pruned_results_are_lexicon_words():
    alphabet = Alphabet("abcdef")
    rng = np.random.default_rng(0)
    words = set()
    while len(words) < 50:
        words.add("".join(rng.choice(list(alphabet.chars), size=int(rng.integers(1, 6)))))
    trie = build_trie(words, alphabet)
    config = DecodeConfig(beam_width=4, max_length=8, trie=trie)
    for seed in range(1000):
        results = beam_search(RandomScorer(alphabet, seed), alphabet, config)
        assert results
        assert all(r.complete and r.word in trie for r in results)


def test_unfinished_search_returns_open_hypotheses():
    config = DecodeConfig(max_length=2, trie=build_trie(["abcd"], SMALL))
    results = beam_search(TableScorer(SMALL, {}), SMALL, config)
    assert [(r.word, r.complete) for r in results] == [("a", False)]


def test_top_limits_results():
    scorer = RandomScorer(SMALL, 3)
    assert len(beam_search(scorer, SMALL, DecodeConfig(beam_width=8, max_length=4, top=3))) == 3


def test_beam_decode_on_recognizer():
    model = toy_model(seed=1)
    results = beam_decode(model, random_image(3), DecodeConfig(beam_width=4, max_length=8))
    scores = [r.score for r in results]
    assert scores == sorted(scores, reverse=True)
    assert all(len(r.word) <= 7 for r in results)


@pytest.mark.parametrize("use_lm", [False, True])
def test_scores_never_increase_along_a_branch(use_lm):
    scorer = RandomScorer(SMALL, seed=21)
    config = DecodeConfig(lm=fit(["abc", "cab", "bb"], k_max=3, symbols="abc"), alpha=0.3) if use_lm else DecodeConfig()
    frontier = [root(scorer)]
    for depth in range(4):
        children = []
        for parent in frontier:
            log_probs, successor = scorer.step(parent.state)
            for child in hypothesis_extend(parent, log_probs, successor, SMALL, config, last_step=depth == 3):
                assert child.score <= parent.score
                assert child.score == pytest.approx(
                    sum(lp + config.alpha * lm for lp, lm in child.terms) if use_lm else sum(lp for lp, _ in child.terms)
                )
                if not child.complete:
                    children.append(replace(child, state=scorer.feed(child.state, child.symbols[-1])))
        frontier = children
    assert not frontier


@pytest.mark.parametrize("symbols,first", [("ab", "a"), ("ba", "b")])
def test_ties_are_broken_by_alphabet_order(symbols, first):
    alphabet = Alphabet(symbols)
    scorer = TableScorer(alphabet, {
        "": distribution(alphabet, {"a": 0.4, "b": 0.4}),
        "a": distribution(alphabet, {END: 0.9}),
        "b": distribution(alphabet, {END: 0.9}),
    })
    results = beam_search(scorer, alphabet, DecodeConfig(beam_width=4, max_length=3))
    assert results[0].score == results[1].score
    assert [r.word for r in results[:2]] == [first, "b" if first == "a" else "a"]
    again = beam_search(scorer, alphabet, DecodeConfig(beam_width=4, max_length=3))
    assert [r.word for r in again] == [r.word for r in results]
