"""Bundled 5×7 bitmaps of the printed alphabet, the sticker shapes."""

from dataclasses import dataclass

import torch

_ALPHABET: dict[str, tuple[str, ...]] = {
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": (".###.", "..#..", "..#..", "..#..", "..#..", "..#..", ".###."),
    "J": ("..###", "...#.", "...#.", "...#.", "...#.", "#..#.", ".##.."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}

ALPHABET_SIZE = len(_ALPHABET)


def glyph_bitmap(letter: str) -> torch.Tensor:
    """7×7 boolean bitmap of `letter`, the 5-wide glyph centred with one blank column per side."""
    rows = _ALPHABET[letter]
    bitmap = torch.zeros(7, 7, dtype=torch.bool)
    for y, row in enumerate(rows):
        for x, cell in enumerate(row):
            bitmap[y, x + 1] = cell == "#"
    return bitmap


@dataclass(frozen=True)
class GlyphSet:
    """The |C_n| glyphs in use; `glyph_index` of a StickerSpec indexes into `letters`."""

    letters: tuple[str, ...]
    bitmaps: tuple[torch.Tensor, ...]

    def __len__(self) -> int:
        return len(self.letters)

    @classmethod
    def select(cls, n_classes: int, glyph_seed: int = 0) -> "GlyphSet":
        """Seeded random subset of `n_classes` letters from the bundled alphabet."""
        if not 1 <= n_classes <= ALPHABET_SIZE:
            raise ValueError(f"n_classes must be in [1, {ALPHABET_SIZE}], got {n_classes}")
        generator = torch.Generator().manual_seed(glyph_seed)
        letters = sorted(_ALPHABET)
        chosen = [letters[i] for i in torch.randperm(ALPHABET_SIZE, generator=generator)[:n_classes].tolist()]
        return cls(letters=tuple(chosen), bitmaps=tuple(glyph_bitmap(c) for c in chosen))

    def with_bitmap(self, index: int, bitmap: torch.Tensor) -> "GlyphSet":
        bitmaps = list(self.bitmaps)
        bitmaps[index] = bitmap
        return GlyphSet(letters=self.letters, bitmaps=tuple(bitmaps))
