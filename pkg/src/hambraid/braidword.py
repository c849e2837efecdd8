"""Artin braid words on n strands."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class BraidWord:
    """Signed Artin generators ``+-i`` (1 <= i < n).

    A positive letter is a counterclockwise interchange of the strands
    currently at positions ``i`` and ``i + 1``.  Words act on positions left
    to right.
    """

    n: int
    letters: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one strand")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if a == 0 or abs(a) >= self.n:
                raise ValueError(f"generator {a} out of range for {self.n} strands")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str, n: int) -> "BraidWord":
        return cls(n, tuple(int(tok) for tok in text.split()))

    def __str__(self) -> str:
        return " ".join(str(a) for a in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if other.n != self.n:
            raise ValueError("strand counts differ")
        return BraidWord(self.n, self.letters + other.letters)

    def __pow__(self, k: int) -> "BraidWord":
        if k < 0:
            return self.inverse() ** (-k)
        return BraidWord(self.n, self.letters * k)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n, tuple(-a for a in reversed(self.letters)))

    def conjugate(self, x: "BraidWord") -> "BraidWord":
        """``x^-1 w x``."""
        return x.inverse() * self * x

    @property
    def exponent_sum(self) -> int:
        return sum(1 if a > 0 else -1 for a in self.letters)

    @property
    def permutation(self) -> tuple:
        """``p[i]`` = final position of the strand starting at position ``i`` (0-based)."""
        at = list(range(self.n))          # at[pos] = strand currently at pos
        for a in self.letters:
            i = abs(a) - 1
            at[i], at[i + 1] = at[i + 1], at[i]
        perm = [0] * self.n
        for pos, strand in enumerate(at):
            perm[strand] = pos
        return tuple(perm)


def cycle_type(perm: Sequence[int]) -> tuple:
    seen = [False] * len(perm)
    lengths = []
    for i in range(len(perm)):
        if not seen[i]:
            j, c = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                c += 1
            lengths.append(c)
    return tuple(sorted(lengths))


def full_twist(n: int, power: int = 1) -> BraidWord:
    """``(s_1 ... s_{n-1})^n``, the positive full twist, raised to ``power``."""
    return BraidWord(n, tuple(range(1, n))) ** (n * power)


def rotation_word(n: int, steps: int = 1) -> BraidWord:
    """``(s_1 ... s_{n-1})^steps``: n points on a circle turned ccw by ``2 pi steps / n``."""
    return BraidWord(n, tuple(range(1, n))) ** steps


def words_from_ints(n: int, seqs: Iterable[Sequence[int]]) -> list:
    return [BraidWord(n, tuple(s)) for s in seqs]
