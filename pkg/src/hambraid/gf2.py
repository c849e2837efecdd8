"""Linear algebra over GF(2) with bit-packed rows, and the basis-pairing construction.

A vector of length ``d`` is an int whose bit ``i`` is coordinate ``i``.
Indices are 0-based in code and 1-based only in text output.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Optional, Sequence

import numpy as np


class DimensionError(ValueError):
    pass


class TransversalityError(ValueError):
    pass


class NotAnIsomorphismError(ValueError):
    pass


def _bits(v: int, d: int) -> list:
    return [(v >> i) & 1 for i in range(d)]


def rank_of(vectors: Iterable[int]) -> int:
    """Rank of a set of bit vectors (xor basis keyed by leading bit)."""
    basis: dict = {}
    for v in vectors:
        while v:
            h = v.bit_length() - 1
            if h not in basis:
                basis[h] = v
                break
            v ^= basis[h]
    return len(basis)


def in_span(v: int, vectors: Sequence[int]) -> bool:
    return rank_of(list(vectors) + [v]) == rank_of(vectors)


@dataclass(frozen=True)
class GF2Matrix:
    """``rows x cols`` matrix; ``data[r]`` packs row ``r`` with column ``c`` at bit ``c``."""

    rows: int
    cols: int
    data: tuple

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise DimensionError("dimensions must be positive")
        if len(self.data) != self.rows:
            raise DimensionError("row count does not match data")
        mask = (1 << self.cols) - 1
        object.__setattr__(self, "data", tuple(int(r) & mask for r in self.data))

    @classmethod
    def from_array(cls, a) -> "GF2Matrix":
        a = np.asarray(a, dtype=np.int64) & 1
        if a.ndim != 2:
            raise DimensionError("need a 2-d array")
        return cls(a.shape[0], a.shape[1], tuple(sum(int(x) << c for c, x in enumerate(row)) for row in a))

    @classmethod
    def identity(cls, n: int) -> "GF2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GF2Matrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def from_columns(cls, columns: Sequence[int], rows: int) -> "GF2Matrix":
        data = [0] * rows
        for c, v in enumerate(columns):
            for r in range(rows):
                if (v >> r) & 1:
                    data[r] |= 1 << c
        return cls(rows, len(columns), tuple(data))

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> "GF2Matrix":
        return cls.from_array(rng.integers(0, 2, size=(rows, cols)))

    @classmethod
    def parse(cls, text: str) -> "GF2Matrix":
        """0/1 grid, one row per line; whitespace between entries is optional."""
        lines = [ln.replace(" ", "").replace("\t", "") for ln in text.strip().splitlines() if ln.strip()]
        if not lines or any(set(ln) - {"0", "1"} for ln in lines):
            raise ValueError("matrix text must be a grid of 0/1 entries")
        if len({len(ln) for ln in lines}) != 1:
            raise DimensionError("ragged matrix text")
        return cls.from_array([[int(ch) for ch in ln] for ln in lines])

    def format(self) -> str:
        return "\n".join(" ".join(str(b) for b in _bits(r, self.cols)) for r in self.data)

    def to_array(self) -> np.ndarray:
        return np.array([_bits(r, self.cols) for r in self.data], dtype=np.uint8)

    def entry(self, r: int, c: int) -> int:
        return (self.data[r] >> c) & 1

    def column(self, c: int) -> int:
        return sum(((row >> c) & 1) << r for r, row in enumerate(self.data))

    def columns(self) -> list:
        return [self.column(c) for c in range(self.cols)]

    def transpose(self) -> "GF2Matrix":
        return GF2Matrix(self.cols, self.rows, tuple(self.columns()))

    def apply(self, v: int) -> int:
        """Matrix times a column vector packed as an int of length ``cols``."""
        out = 0
        for r, row in enumerate(self.data):
            if bin(row & v).count("1") & 1:
                out |= 1 << r
        return out

    def __matmul__(self, other: "GF2Matrix") -> "GF2Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for row in self.data:
            acc, c = 0, 0
            while row:
                if row & 1:
                    acc ^= other.data[c]
                row >>= 1
                c += 1
            out.append(acc)
        return GF2Matrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "GF2Matrix") -> "GF2Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("shapes differ")
        return GF2Matrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.data, other.data)))

    def rank(self) -> int:
        return rank_of(self.data)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "GF2Matrix":
        if self.rows != self.cols:
            raise DimensionError("only square matrices have inverses")
        n = self.rows
        aug = [row | (1 << (n + r)) for r, row in enumerate(self.data)]
        for c in range(n):
            piv = next((r for r in range(c, n) if (aug[r] >> c) & 1), None)
            if piv is None:
                raise NotAnIsomorphismError("matrix is singular")
            aug[c], aug[piv] = aug[piv], aug[c]
            for r in range(n):
                if r != c and (aug[r] >> c) & 1:
                    aug[r] ^= aug[c]
        return GF2Matrix(n, n, tuple(row >> n for row in aug))

    def kernel_basis(self) -> list:
        """Basis of the null space, as packed vectors of length ``cols``."""
        rows = list(self.data)
        pivots: list = []
        r = 0
        for c in range(self.cols):
            piv = next((i for i in range(r, len(rows)) if (rows[i] >> c) & 1), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            for i in range(len(rows)):
                if i != r and (rows[i] >> c) & 1:
                    rows[i] ^= rows[r]
            pivots.append(c)
            r += 1
        free = [c for c in range(self.cols) if c not in pivots]
        basis = []
        for f in free:
            v = 1 << f
            for i, c in enumerate(pivots):
                if (rows[i] >> f) & 1:
                    v |= 1 << c
            basis.append(v)
        return basis


# -- transverse selection ---------------------------------------------------------------

def transverse_selection(ws: Sequence[int], Z: Sequence[int], dim: int) -> tuple:
    """Injective ``iota`` with coordinate ``iota[j]`` of ``ws[j]`` equal to 1.

    The selected basis vectors span a space transverse to ``span(Z)``.
    Follows the induction on the number of vectors: the last vector picks
    the smallest coordinate ``i`` with ``e_i`` outside ``span(ws[:-1], Z)``
    and ``ws[-1]`` not in the coordinate hyperplane ``H_i``; then
    coordinate ``i`` is projected away from the rest.
    """
    ws, Z = [int(w) for w in ws], [int(z) for z in Z if z]
    n, k = len(ws), rank_of(Z)
    if n == 0:
        return ()
    if any(v >> dim for v in ws + Z):
        raise DimensionError("vector longer than the ambient dimension")
    if rank_of(ws) != n:
        raise TransversalityError("vectors are linearly dependent")
    if rank_of(ws + Z) != n + k:
        raise TransversalityError("span of the vectors meets Z")
    iota = _select(ws, Z, dim)
    _check_selection(ws, Z, iota)
    return iota


def _select(ws: list, Z: list, dim: int) -> tuple:
    iota = [0] * len(ws)
    active = (1 << dim) - 1
    for j in range(len(ws) - 1, -1, -1):
        w = ws[j]
        Q = ws[:j] + Z
        for i in range(dim):
            bit = 1 << i
            if (active & bit) and (w & bit) and not in_span(bit, Q):
                break
        else:
            raise TransversalityError(f"no admissible coordinate for vector {j + 1}")
        iota[j] = i
        active &= ~bit
        ws = [v & ~bit for v in ws]
        Z = [v & ~bit for v in Z]
    return tuple(iota)


def _check_selection(ws, Z, iota) -> None:
    if len(set(iota)) != len(iota):
        raise AssertionError("selection is not injective")
    for w, i in zip(ws, iota):
        if not (w >> i) & 1:
            raise AssertionError("selected coordinate does not appear")
    L = [1 << i for i in iota]
    if rank_of(L + list(Z)) != len(L) + rank_of(Z):
        raise AssertionError("selected span meets Z")


# -- pairing ------------------------------------------------------------------------

@dataclass(frozen=True)
class Pairing:
    f: tuple     # injective {0..n-1} -> {0..m-1}
    g: tuple     # bijection of {0..n-1}

    def one_based(self) -> dict:
        return {"f": [x + 1 for x in self.f], "g": [x + 1 for x in self.g]}


def _check_shapes(F: GF2Matrix, G: GF2Matrix) -> tuple:
    m, n = F.rows, F.cols
    if (G.rows, G.cols) != (n, m):
        raise DimensionError(f"F is {m}x{n} so G must be {n}x{m}, got {G.rows}x{G.cols}")
    return m, n


def pairing_from_maps(F: GF2Matrix, G: GF2Matrix) -> Pairing:
    """``f``, ``g`` with ``r_f(i)`` in ``F(v_i)`` and ``v_g(i)`` in ``G(r_f(i))``."""
    m, n = _check_shapes(F, G)
    if not (G @ F).is_invertible():
        raise NotAnIsomorphismError("G F is not invertible")
    f = transverse_selection(F.columns(), G.kernel_basis(), m)
    g = transverse_selection([G.column(f[i]) for i in range(n)], [], n)
    out = Pairing(f, g)
    if not verify_pairing(F, G, out):
        raise AssertionError("constructed pairing failed verification")
    return out


def verify_pairing(F: GF2Matrix, G: GF2Matrix, pairing: Pairing) -> bool:
    m, n = _check_shapes(F, G)
    f, g = pairing.f, pairing.g
    if len(f) != n or len(g) != n:
        return False
    if len(set(f)) != n or any(not 0 <= x < m for x in f):
        return False
    if sorted(g) != list(range(n)):
        return False
    for i in range(n):
        if not F.entry(f[i], i) or not G.entry(g[i], f[i]):
            return False
    return True


def exhaustive_pairings(F: GF2Matrix, G: GF2Matrix, first_only: bool = True) -> list:
    """All valid pairings by brute force over injective ``f`` and bijective ``g``."""
    m, n = _check_shapes(F, G)
    found = []
    for f in permutations(range(m), n):
        if not all(F.entry(f[i], i) for i in range(n)):
            continue
        for g in permutations(range(n)):
            if all(G.entry(g[i], f[i]) for i in range(n)):
                found.append(Pairing(tuple(f), tuple(g)))
                if first_only:
                    return found
    return found


def random_instance(rng: np.random.Generator, max_dim: int = 6) -> tuple:
    """``(F, G)`` with ``G F`` invertible, ``1 <= n <= m <= max_dim``."""
    n = int(rng.integers(1, max_dim + 1))
    m = int(rng.integers(n, max_dim + 1))
    while True:
        F = GF2Matrix.random(m, n, rng)
        G = GF2Matrix.random(n, m, rng)
        if (G @ F).is_invertible():
            return F, G


@dataclass
class CorpusReport:
    instances: int
    verified: int
    oracle_feasible: int
    failures: list

    @property
    def passed(self) -> bool:
        return self.verified == self.instances == self.oracle_feasible

    def as_row(self) -> dict:
        return {"instances": self.instances, "verified": self.verified,
                "oracle_feasible": self.oracle_feasible, "failures": self.failures[:10]}


def run_corpus(instances: int = 1000, seed: int = 0, max_dim: int = 6,
               oracle: bool = True) -> CorpusReport:
    rng = np.random.default_rng(seed)
    ok = feasible = 0
    failures = []
    for idx in range(instances):
        F, G = random_instance(rng, max_dim)
        try:
            p = pairing_from_maps(F, G)
            good = verify_pairing(F, G, p)
        except (AssertionError, TransversalityError) as err:
            good = False
            failures.append({"instance": idx, "error": str(err)})
        ok += good
        if oracle and exhaustive_pairings(F, G):
            feasible += 1
        elif oracle:
            failures.append({"instance": idx, "error": "oracle found no pairing"})
    return CorpusReport(instances, ok, feasible if oracle else instances, failures)


def check_instance(F: GF2Matrix, G: GF2Matrix) -> Optional[Pairing]:
    """Pairing if the precondition holds, else ``None``."""
    try:
        return pairing_from_maps(F, G)
    except NotAnIsomorphismError:
        return None
