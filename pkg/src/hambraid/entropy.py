"""Growth of the induced free-group action: the entropy lower bound of a disk braid.

Letters of free-group words are signed ints ``+-(i + 1)`` for ``x_i^{+-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numba import njit

from .braidword import BraidWord

LETTER_CAP = 1 << 27        # letters per stored word before the iteration saturates
LOWER_BOUND_LABEL = ("lower-bound estimate of the topological entropy of any "
                     "diffeomorphism realizing the braid")


def free_reduce(word: Sequence[int]) -> list:
    out: list = []
    for a in word:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return out


def cyclic_reduce(word: Sequence[int]) -> list:
    w = free_reduce(word)
    lo, hi = 0, len(w)
    while hi - lo >= 2 and w[lo] == -w[hi - 1]:
        lo += 1
        hi -= 1
    return w[lo:hi]


def invert(word: Sequence[int]) -> list:
    return [-a for a in reversed(word)]


@dataclass(frozen=True)
class FreeGroupEndo:
    """Endomorphism of the free group on ``x_1..x_rank`` given by generator images."""

    rank: int
    images: tuple

    def __post_init__(self):
        imgs = tuple(tuple(free_reduce(w)) for w in self.images)
        if len(imgs) != self.rank:
            raise ValueError("need one image per generator")
        for w in imgs:
            if any(a == 0 or abs(a) > self.rank for a in w):
                raise ValueError("image uses a letter outside the generating set")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, rank: int) -> "FreeGroupEndo":
        return cls(rank, tuple((i + 1,) for i in range(rank)))

    def apply(self, word: Sequence[int]) -> list:
        out: list = []
        for a in word:
            img = self.images[abs(a) - 1]
            out.extend(img if a > 0 else invert(img))
        return free_reduce(out)

    def then(self, other: "FreeGroupEndo") -> "FreeGroupEndo":
        """``self`` first, then ``other``: ``x -> other(self(x))``."""
        if other.rank != self.rank:
            raise ValueError("ranks differ")
        return FreeGroupEndo(self.rank, tuple(tuple(other.apply(w)) for w in self.images))

    def is_identity(self) -> bool:
        return all(w == (i + 1,) for i, w in enumerate(self.images))

    def format(self) -> list:
        def letter(a):
            return f"x{abs(a)}" + ("" if a > 0 else "^-1")
        return [f"x{i + 1} -> " + (" ".join(letter(a) for a in w) or "1") for i, w in enumerate(self.images)]


def generator_action(n: int, letter: int) -> FreeGroupEndo:
    i = abs(letter)                       # x_i, x_{i+1} are 1-based letters i, i + 1
    images = [(k + 1,) for k in range(n)]
    if letter > 0:
        images[i - 1] = (i, i + 1, -i)
        images[i] = (i,)
    else:
        images[i - 1] = (i + 1,)
        images[i] = (-(i + 1), i, i + 1)
    return FreeGroupEndo(n, tuple(images))


def artin_action(word: BraidWord) -> FreeGroupEndo:
    """Action on the punctured disk's free group; letters apply in word order."""
    f = FreeGroupEndo.identity(word.n)
    for a in word.letters:
        f = f.then(generator_action(word.n, a))
    return f


# -- iteration kernels -------------------------------------------------------------

@njit(cache=True)
def _substitute(word, flat, off, cap):
    """Apply the endomorphism (images packed in ``flat``/``off``) with free reduction."""
    bound = 0
    for idx in range(word.shape[0]):
        g = abs(word[idx]) - 1
        bound += off[g + 1] - off[g]
    size = min(bound, cap)
    out = np.empty(size, dtype=np.int32)
    top = 0
    for idx in range(word.shape[0]):
        a = word[idx]
        g = abs(a) - 1
        s, e = off[g], off[g + 1]
        if a > 0:
            for j in range(s, e):
                x = flat[j]
                if top > 0 and out[top - 1] == -x:
                    top -= 1
                else:
                    if top >= size:
                        return out, -1
                    out[top] = x
                    top += 1
        else:
            for j in range(e - 1, s - 1, -1):
                x = -flat[j]
                if top > 0 and out[top - 1] == -x:
                    top -= 1
                else:
                    if top >= size:
                        return out, -1
                    out[top] = x
                    top += 1
    return out, top


@njit(cache=True)
def _loop_cyclic_length(a, b):
    """Cyclically reduced length of the product of two reduced words."""
    la, lb = a.shape[0], b.shape[0]
    k = 0
    while k < la and k < lb and a[la - 1 - k] == -b[k]:
        k += 1
    # product is a[0:la-k] + b[k:lb]
    n1 = la - k
    total = n1 + lb - k
    lo, hi = 0, total - 1
    while hi - lo >= 1:
        first = a[lo] if lo < n1 else b[k + lo - n1]
        last = a[hi] if hi < n1 else b[k + hi - n1]
        if first != -last:
            break
        lo += 1
        hi -= 1
    return hi - lo + 1


@dataclass
class GrowthEstimate:
    """Tail-fit growth rate of loop lengths under iteration of the braid action.

    ``loop_lengths[(i, j)]`` holds the cyclically reduced length of
    ``f^N(x_i) f^N(x_j)`` for N = 0..iterations; generator image lengths are
    kept as diagnostics.  ``rate`` is the largest fitted slope of ``log L_N``.
    """

    word: str
    n: int
    N: int
    rate: float
    iterations_used: int
    loop_lengths: dict
    generator_lengths: dict
    saturated: bool
    fit_window: tuple
    label: str = LOWER_BOUND_LABEL
    notes: list = field(default_factory=list)

    def as_row(self) -> dict:
        final = {f"x{g + 1}": int(v[-1]) for g, v in sorted(self.generator_lengths.items())}
        return {"word": self.word, "n": self.n, "N": self.N, "iterations_used": self.iterations_used,
                "rate": self.rate, "saturated": self.saturated, "final_generator_lengths": final}


def _fit_rate(lengths: np.ndarray) -> tuple:
    m = len(lengths) - 1
    if m < 1:
        return 0.0, (0, 0)
    lo = max(0, m - max(2, (m + 1) // 2))
    k = np.arange(lo, m + 1, dtype=float)
    y = np.log(np.maximum(lengths[lo:], 1.0))
    slope = float(np.polyfit(k, y, 1)[0]) if len(k) >= 2 else 0.0
    return slope, (int(lo), int(m))


def gamma_estimate(word: BraidWord, N: int = 18, *, cap: int = LETTER_CAP) -> GrowthEstimate:
    """Growth rate estimate of the braid's action on the punctured disk group."""
    if N < 4:
        raise ValueError("need N >= 4 iterations")
    n = word.n
    f = artin_action(word)
    flat = np.array([a for w in f.images for a in w], dtype=np.int32)
    off = np.zeros(n + 1, dtype=np.int64)
    off[1:] = np.cumsum([len(w) for w in f.images])
    current = [np.array([g + 1], dtype=np.int32) for g in range(n)]
    gen_len = {g: [1] for g in range(n)}
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    loop_len = {p: [_loop_cyclic_length(current[p[0]], current[p[1]])] for p in pairs}
    used, saturated = 0, False
    for _ in range(N):
        nxt = []
        for g in range(n):
            out, top = _substitute(current[g], flat, off, cap)
            if top < 0:
                saturated = True
                break
            nxt.append(out[:top])
        if saturated:
            break
        current = nxt
        used += 1
        for g in range(n):
            gen_len[g].append(len(current[g]))
        for p in pairs:
            loop_len[p].append(_loop_cyclic_length(current[p[0]], current[p[1]]))
    rate, window = 0.0, (0, used)
    for p in pairs:
        slope, win = _fit_rate(np.asarray(loop_len[p], dtype=float))
        if slope > rate:
            rate, window = slope, win
    notes = []
    if saturated:
        notes.append(f"letter cap {cap} reached after {used} iterations; fit uses those")
    if used < 4:
        notes.append("fewer than four iterations available; estimate is coarse")
    return GrowthEstimate(str(word), n, N, max(rate, 0.0), used,
                          {p: list(map(int, v)) for p, v in loop_len.items()},
                          {g: list(map(int, v)) for g, v in gen_len.items()},
                          saturated, window, notes=notes)


def full_shift_entropy(m: int) -> float:
    return math.log(m)
