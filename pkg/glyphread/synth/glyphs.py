"""
Built-in 8x6 bitmaps for the lowercase letters and the digits.
"""

from typing import Dict, List

import numpy as np

GLYPH_HEIGHT = 8
GLYPH_WIDTH = 6

_BITMAPS: Dict[str, List[str]] = {
    "a": ["......", "......", ".####.", ".....#", ".#####", "#....#", "#....#", ".#####"],
    "b": ["#.....", "#.....", "#.###.", "##...#", "#....#", "#....#", "##...#", "#.###."],
    "c": ["......", "......", ".####.", "#....#", "#.....", "#.....", "#....#", ".####."],
    "d": [".....#", ".....#", ".###.#", "#...##", "#....#", "#....#", "#...##", ".###.#"],
    "e": ["......", "......", ".####.", "#....#", "######", "#.....", "#....#", ".####."],
    "f": ["..###.", ".#...#", ".#....", "####..", ".#....", ".#....", ".#....", ".#...."],
    "g": [".####.", "#....#", "#....#", "#....#", ".#####", ".....#", "#....#", ".####."],
    "h": ["#.....", "#.....", "#.###.", "##...#", "#....#", "#....#", "#....#", "#....#"],
    "i": ["..#...", "......", ".##...", "..#...", "..#...", "..#...", "..#...", ".###.."],
    "j": ["....#.", "......", "...##.", "....#.", "....#.", "....#.", "#...#.", ".###.."],
    "k": ["#.....", "#.....", "#...#.", "#..#..", "###...", "#..#..", "#...#.", "#....#"],
    "l": [".##...", "..#...", "..#...", "..#...", "..#...", "..#...", "..#...", ".###.."],
    "m": ["......", "......", "##.##.", "#.#.#.", "#.#.#.", "#.#.#.", "#.#.#.", "#.#.#."],
    "n": ["......", "......", "#.###.", "##...#", "#....#", "#....#", "#....#", "#....#"],
    "o": ["......", "......", ".####.", "#....#", "#....#", "#....#", "#....#", ".####."],
    "p": ["#.###.", "##...#", "#....#", "##...#", "#.###.", "#.....", "#.....", "#....."],
    "q": [".###.#", "#...##", "#....#", "#...##", ".###.#", ".....#", ".....#", ".....#"],
    "r": ["......", "......", "#.###.", "##...#", "#.....", "#.....", "#.....", "#....."],
    "s": ["......", "......", ".#####", "#.....", ".####.", ".....#", ".....#", "#####."],
    "t": ["..#...", "..#...", "#####.", "..#...", "..#...", "..#...", "..#..#", "...##."],
    "u": ["......", "......", "#....#", "#....#", "#....#", "#....#", "#...##", ".###.#"],
    "v": ["......", "......", "#....#", "#....#", "#....#", ".#..#.", ".#..#.", "..##.."],
    "w": ["......", "......", "#....#", "#....#", "#.##.#", "#.##.#", "##..##", "#....#"],
    "x": ["......", "......", "#....#", ".#..#.", "..##..", "..##..", ".#..#.", "#....#"],
    "y": ["#....#", "#....#", "#....#", "#...##", ".###.#", ".....#", "#....#", ".####."],
    "z": ["......", "......", "######", "....#.", "...#..", "..#...", ".#....", "######"],
    "0": [".####.", "#....#", "#...##", "#..#.#", "#.#..#", "##...#", "#....#", ".####."],
    "1": ["..#...", ".##...", "#.#...", "..#...", "..#...", "..#...", "..#...", "#####."],
    "2": [".####.", "#....#", ".....#", "....#.", "...#..", "..#...", ".#....", "######"],
    "3": [".####.", "#....#", ".....#", "..###.", ".....#", ".....#", "#....#", ".####."],
    "4": ["...##.", "..#.#.", ".#..#.", "#...#.", "######", "....#.", "....#.", "....#."],
    "5": ["######", "#.....", "#.....", "#####.", ".....#", ".....#", "#....#", ".####."],
    "6": ["..###.", ".#....", "#.....", "#####.", "#....#", "#....#", "#....#", ".####."],
    "7": ["######", ".....#", "....#.", "...#..", "..#...", "..#...", "..#...", "..#..."],
    "8": [".####.", "#....#", "#....#", ".####.", "#....#", "#....#", "#....#", ".####."],
    "9": [".####.", "#....#", "#....#", "#....#", ".#####", ".....#", "....#.", ".###.."],
}


def _to_array(rows: List[str]) -> np.ndarray:
    return np.array([[1.0 if c == "#" else 0.0 for c in row] for row in rows])


class GlyphSet:
    def __init__(self) -> None:
        self._glyphs = {char: _to_array(rows) for char, rows in _BITMAPS.items()}

    def __contains__(self, char: str) -> bool:
        return char in self._glyphs

    def __len__(self) -> int:
        return len(self._glyphs)

    @property
    def chars(self) -> str:
        return "".join(self._glyphs)

    def bitmap(self, char: str) -> np.ndarray:
        return self._glyphs[char]


GLYPHS = GlyphSet()
