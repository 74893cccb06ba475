"""
Character n-gram language model with longest-suffix backoff and add-delta
smoothing inside the matched table.

Contexts are counted inside words only, for every length 0 .. k_max - 1, and
END is counted as an ordinary event after the last character.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable
import math

from dataclasses_json import dataclass_json

from glyphread.alphabet import DEFAULT_SYMBOLS, END, Alphabet
from glyphread.errors import InputError


@dataclass_json
@dataclass
class NgramModel:
    k_max: int = 6
    delta: float = 0.1
    symbols: str = DEFAULT_SYMBOLS
    counts: Dict[str, Dict[str, int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.k_max < 1:
            raise InputError(f"k_max must be at least 1, got {self.k_max}")
        if self.delta < 0:
            raise InputError(f"smoothing constant must be non-negative, got {self.delta}")
        self.alphabet = Alphabet(self.symbols)
        self._totals = {context: sum(row.values()) for context, row in self.counts.items()}

    def update(self, corpus: Iterable[str]) -> "NgramModel":
        for word in corpus:
            self.alphabet.encode(word)
            sequence = list(word) + [END]
            for i, char in enumerate(sequence):
                for length in range(min(i, self.k_max - 1) + 1):
                    context = word[i - length: i]
                    row = self.counts.setdefault(context, {})
                    row[char] = row.get(char, 0) + 1
                    self._totals[context] = self._totals.get(context, 0) + 1
        return self

    def total(self, context: str) -> int:
        return self._totals.get(context, 0)

    def matched_context(self, context: str) -> str:
        """Longest suffix of ``context`` (at most k_max - 1 long) with counts."""
        context = context[-(self.k_max - 1):] if self.k_max > 1 else ""
        for start in range(len(context) + 1):
            suffix = context[start:]
            if self._totals.get(suffix, 0) > 0:
                return suffix
        return ""

    def prob(self, context: str, char: str) -> float:
        if char != END and char not in self.alphabet:
            raise InputError(f"character '{char}' is not in the alphabet")
        size = len(self.alphabet)
        matched = self.matched_context(context)
        total = self._totals.get(matched, 0)
        if total == 0:
            return 1.0 / size
        count = self.counts[matched].get(char, 0)
        return (count + self.delta) / (total + self.delta * size)

    def logprob(self, context: str, char: str) -> float:
        p = self.prob(context, char)
        return math.log(p) if p > 0 else -math.inf

    def distribution(self, context: str) -> Dict[str, float]:
        return {symbol: self.prob(context, symbol) for symbol in self.alphabet.symbols}


def fit(corpus: Iterable[str], k_max: int = 6, delta: float = 0.1, symbols: str = DEFAULT_SYMBOLS) -> NgramModel:
    return NgramModel(k_max, delta, symbols).update(corpus)
