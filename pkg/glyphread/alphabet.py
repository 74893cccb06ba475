from typing import Dict, Iterable, List, Sequence
import string

import numpy as np

from glyphread.errors import InputError

END = "$"
DEFAULT_SYMBOLS = string.ascii_lowercase + string.digits


class Alphabet:
    """
    Ordered symbol set with the stop symbol END always last.

    The default instance holds a-z, 0-9 and END, 37 symbols in total.
    """

    def __init__(self, symbols: str = DEFAULT_SYMBOLS) -> None:
        if END in symbols:
            raise InputError(f"symbol '{END}' is reserved for the stop symbol")
        if len(set(symbols)) != len(symbols):
            raise InputError(f"duplicate symbols in alphabet '{symbols}'")
        self.symbols: List[str] = list(symbols) + [END]
        self._index: Dict[str, int] = {s: i for i, s in enumerate(self.symbols)}

    @property
    def end(self) -> int:
        return len(self.symbols) - 1

    @property
    def chars(self) -> str:
        return "".join(self.symbols[:-1])

    def __len__(self) -> int:
        return len(self.symbols)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self) -> int:
        return hash(tuple(self.symbols))

    def __repr__(self) -> str:
        return f"Alphabet({self.chars!r})"

    def __contains__(self, char: str) -> bool:
        return char in self._index and char != END

    def index(self, char: str) -> int:
        result = self._index.get(char)
        if result is None:
            raise InputError(f"character '{char}' is not in the alphabet")
        return result

    def symbol(self, index: int) -> str:
        return self.symbols[index]

    def encode(self, word: str) -> List[int]:
        result = []
        for char in word:
            if char == END or char not in self._index:
                raise InputError(f"character '{char}' of word '{word}' is not in the alphabet")
            result.append(self._index[char])
        return result

    def decode(self, indices: Iterable[int]) -> str:
        return "".join(self.symbols[i] for i in indices if i != self.end)

    def one_hot(self, index: int) -> np.ndarray:
        result = np.zeros(len(self.symbols))
        result[index] = 1.0
        return result

    def validate(self, words: Sequence[str]) -> None:
        for word in words:
            self.encode(word)


def normalize_word(word: str) -> str:
    return word.strip().lower()
