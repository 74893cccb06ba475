from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import Levenshtein
import numpy as np

from glyphread.alphabet import Alphabet
from glyphread.errors import InputError


class TrieNode:
    def __init__(self) -> None:
        self.children: Dict[str, "TrieNode"] = {}
        self.is_word = False


class LexiconTrie:
    """Prefix tree over a word list."""

    def __init__(self) -> None:
        self.root = TrieNode()
        self.word_count = 0
        self.node_count = 0

    def insert(self, word: str) -> None:
        node = self.root
        for char in word:
            if char not in node.children:
                node.children[char] = TrieNode()
                self.node_count += 1
            node = node.children[char]
        if not node.is_word:
            node.is_word = True
            self.word_count += 1

    def find(self, prefix: str) -> Optional[TrieNode]:
        node = self.root
        for char in prefix:
            node = node.children.get(char)
            if node is None:
                return None
        return node

    @staticmethod
    def child(node: TrieNode, char: str) -> Optional[TrieNode]:
        return node.children.get(char)

    def has_prefix(self, prefix: str) -> Tuple[bool, bool]:
        node = self.find(prefix)
        if node is None:
            return False, False
        return True, node.is_word

    def contains(self, word: str) -> bool:
        return self.has_prefix(word)[1]

    def __contains__(self, word: str) -> bool:
        return self.contains(word)

    def __len__(self) -> int:
        return self.word_count

    def words(self) -> Iterator[str]:
        def walk(node: TrieNode, prefix: str) -> Iterator[str]:
            if node.is_word:
                yield prefix
            for char in sorted(node.children):
                yield from walk(node.children[char], prefix + char)

        return walk(self.root, "")


def build_trie(words: Iterable[str], alphabet: Optional[Alphabet] = None) -> LexiconTrie:
    alphabet = alphabet or Alphabet()
    trie = LexiconTrie()
    for word in words:
        alphabet.encode(word)
        if word:
            trie.insert(word)
    return trie


def nearest_word(words: Sequence[str], query: str) -> str:
    """Closest word by edit distance; ties go to the lexicographically smallest."""
    if not words:
        raise InputError("cannot search an empty lexicon")
    return min(words, key=lambda word: (Levenshtein.distance(query, word), word))


def distractor_lexicon(words: Sequence[str], truth: str, size: int = 50, seed: int = 0) -> List[str]:
    """The ground truth plus ``size - 1`` random other words, sorted."""
    others = sorted(set(words) - {truth})
    count = min(max(size - 1, 0), len(others))
    picked = np.random.default_rng(seed).choice(len(others), size=count, replace=False) if count else []
    return sorted([truth] + [others[i] for i in picked])
