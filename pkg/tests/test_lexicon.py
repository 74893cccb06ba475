import pytest

import numpy as np

from glyphread.alphabet import Alphabet
from glyphread.errors import InputError
from glyphread.inference.lexicon import build_trie, distractor_lexicon, nearest_word


def test_has_prefix():
    trie = build_trie(["cat", "car", "dog"])
    assert trie.has_prefix("ca") == (True, False)
    assert trie.has_prefix("cat") == (True, True)
    assert trie.has_prefix("cab") == (False, False)
    assert trie.has_prefix("") == (True, False)


def test_contains_and_size():
    trie = build_trie(["cat", "car", "cat", "do"])
    assert "car" in trie and trie.contains("do")
    assert "ca" not in trie
    assert len(trie) == 3
    assert trie.node_count == 6


def test_words_are_sorted():
    assert list(build_trie(["dog", "cat", "ca", "car"]).words()) == ["ca", "car", "cat", "dog"]


def test_child_walk():
    trie = build_trie(["cat"])
    node = trie.child(trie.root, "c")
    assert node is not None and trie.child(node, "x") is None
    assert trie.child(trie.child(node, "a"), "t").is_word


def test_foreign_characters_rejected():
    with pytest.raises(InputError):
        build_trie(["Cat"])
    with pytest.raises(InputError):
        build_trie(["dab"], Alphabet("abc"))


def test_prefix_queries_agree_with_naive_scan():
    rng = np.random.default_rng(0)
    symbols = list("abcd")
    words = sorted({"".join(rng.choice(symbols, size=int(rng.integers(1, 6)))) for _ in range(200)})
    trie = build_trie(words, Alphabet("abcd"))
    for _ in range(10_000):
        query = "".join(rng.choice(symbols, size=int(rng.integers(0, 7))))
        expected = (any(w.startswith(query) for w in words), query in words)
        assert trie.has_prefix(query) == expected


@pytest.mark.parametrize("query,expected", [
    ("cat", "cat"),
    ("cst", "cat"),
    ("dgo", "dog"),
    ("ca", "car"),
])
def test_nearest_word(query, expected):
    assert nearest_word(["dog", "cat", "car"], query) == expected


def test_nearest_word_of_empty_lexicon():
    with pytest.raises(InputError):
        nearest_word([], "cat")


def test_distractor_lexicon():
    words = [f"w{i}" for i in range(100)]
    lexicon = distractor_lexicon(words, "w7", size=50, seed=3)
    assert len(lexicon) == 50 and "w7" in lexicon
    assert lexicon == sorted(lexicon)
    assert distractor_lexicon(words, "w7", size=50, seed=3) == lexicon
    assert len(distractor_lexicon(words[:10], "w7", size=50)) == 10
