import pytest
import math

import numpy as np

from glyphread.alphabet import END
from glyphread.errors import InputError
from glyphread.inference.ngram import NgramModel, fit


def test_hand_counted_probability():
    model = fit(["ab", "ab", "ac"], k_max=3, delta=0.0)
    assert model.prob("a", "b") == pytest.approx(2 / 3, abs=1e-12)
    assert model.prob("a", "c") == pytest.approx(1 / 3, abs=1e-12)
    assert model.prob("a", "d") == 0.0
    assert model.logprob("a", "d") == -math.inf


def test_end_is_an_event():
    model = fit(["ab", "ab", "ac"], k_max=3, delta=0.0)
    assert model.prob("ab", END) == pytest.approx(1.0)
    assert model.prob("", END) == pytest.approx(3 / 9)


def test_backs_off_to_longest_counted_suffix():
    model = fit(["the", "then"], k_max=4, delta=0.1)
    assert model.matched_context("xth") == "th"
    assert model.matched_context("qq") == ""
    # only the last k_max - 1 characters are used
    assert model.matched_context("zzthe") == "the"


def test_unseen_context_with_unit_smoothing_is_uniform():
    model = NgramModel(k_max=3, delta=1.0)
    assert model.prob("xyz", "a") == pytest.approx(1 / 37)
    assert sum(model.distribution("q").values()) == pytest.approx(1.0)


def test_smoothed_probability():
    model = fit(["ab"], k_max=2, delta=0.5, symbols="abc")
    # context "a": b once, total 1, |L| = 4
    assert model.prob("a", "b") == pytest.approx(1.5 / 3.0)
    assert model.prob("a", "c") == pytest.approx(0.5 / 3.0)


@pytest.mark.parametrize("seed", range(20))
def test_distributions_sum_to_one(seed):
    rng = np.random.default_rng(seed)
    symbols = "abcde"
    corpus = [
        "".join(rng.choice(list(symbols), size=int(rng.integers(1, 7))))
        for _ in range(int(rng.integers(1, 30)))
    ]
    model = fit(corpus, k_max=int(rng.integers(1, 6)), delta=float(rng.choice([0.0, 0.1, 1.0])), symbols=symbols)
    for _ in range(20):
        context = "".join(rng.choice(list(symbols), size=int(rng.integers(0, 6))))
        assert sum(model.distribution(context).values()) == pytest.approx(1.0, abs=1e-9)


def test_update_is_incremental():
    corpus = ["cat", "car", "dog"]
    twice = fit(corpus + corpus, k_max=3)
    assert fit(corpus, k_max=3).update(corpus).counts == twice.counts


def test_unigram_model_ignores_context():
    model = fit(["ab", "b"], k_max=1, delta=0.0)
    assert model.prob("a", "b") == model.prob("", "b") == pytest.approx(2 / 5)


def test_dict_round_trip():
    model = fit(["abc", "abd"], k_max=3, delta=0.2)
    restored = NgramModel.from_dict(model.to_dict())
    assert restored.counts == model.counts
    assert restored.prob("ab", "c") == model.prob("ab", "c")


@pytest.mark.parametrize("kwargs", [{"k_max": 0}, {"delta": -0.1}])
def test_invalid_model(kwargs):
    with pytest.raises(InputError):
        NgramModel(**kwargs)


def test_foreign_characters():
    with pytest.raises(InputError):
        fit(["a-b"])
    with pytest.raises(InputError):
        fit(["ab"]).prob("a", "-")
