"""Classical Garside structure of the braid group: normal forms and conjugacy.

Simple elements are permutation braids, stored as tuples ``p`` with
``p[i]`` the final position of the strand starting at position ``i``.  The
product "a then b" is ``(a * b)[i] = b[a[i]]``.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .braidword import BraidWord, cycle_type

Perm = tuple


# -- permutation braids --------------------------------------------------------

def identity(n: int) -> Perm:
    return tuple(range(n))


def half_twist(n: int) -> Perm:
    return tuple(range(n - 1, -1, -1))


def generator(n: int, i: int) -> Perm:
    """Transposition of positions ``i, i + 1`` (0-based)."""
    p = list(range(n))
    p[i], p[i + 1] = i + 1, i
    return tuple(p)


def mul(a: Perm, b: Perm) -> Perm:
    return tuple(b[x] for x in a)


def inv(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def tau(a: Perm, k: int = 1) -> Perm:
    """Conjugation by the half twist, applied ``k`` times (an involution)."""
    if k % 2 == 0:
        return a
    n = len(a)
    return tuple(n - 1 - a[n - 1 - i] for i in range(n))


def starting_set(a: Perm) -> set:
    """Generators that are prefixes of ``a``: strands at ``i, i+1`` cross."""
    return {i for i in range(len(a) - 1) if a[i] > a[i + 1]}


def finishing_set(a: Perm) -> set:
    """Generators that are suffixes of ``a``: strands ending at ``i, i+1`` crossed."""
    ai = inv(a)
    return {i for i in range(len(a) - 1) if ai[i] > ai[i + 1]}


def left_complement(a: Perm) -> Perm:
    """``x`` with ``x a = Delta``."""
    return mul(half_twist(len(a)), inv(a))


def right_complement(a: Perm) -> Perm:
    """``x`` with ``a x = Delta``."""
    return mul(inv(a), half_twist(len(a)))


def perm_word(a: Perm) -> tuple:
    """A positive word (1-based letters) for the permutation braid ``a``."""
    at = list(inv(a))          # strand that must end at each position
    pos = list(range(len(a)))  # current arrangement of strands by position
    out = []
    # bubble sort the current arrangement towards the target order
    target_rank = {s: a[s] for s in range(len(a))}
    changed = True
    while changed:
        changed = False
        for i in range(len(a) - 1):
            if target_rank[pos[i]] > target_rank[pos[i + 1]]:
                pos[i], pos[i + 1] = pos[i + 1], pos[i]
                out.append(i + 1)
                changed = True
    assert tuple(pos) == tuple(at)
    return tuple(out)


@lru_cache(maxsize=1 << 16)
def _left_weight(a: Perm, b: Perm) -> tuple:
    """Make the pair ``(a, b)`` left-weighted without changing the product."""
    n = len(a)
    while True:
        move = starting_set(b) - finishing_set(a)
        if not move:
            return a, b
        i = min(move)
        s = generator(n, i)
        a, b = mul(a, s), mul(s, b)


# -- normal forms --------------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    n: int
    inf: int
    factors: tuple = ()

    @property
    def sup(self) -> int:
        return self.inf + len(self.factors)

    @property
    def canonical_length(self) -> int:
        return len(self.factors)

    def word(self) -> BraidWord:
        delta = perm_word(half_twist(self.n))
        letters = list(delta * self.inf) if self.inf >= 0 else \
            [-x for x in reversed(delta)] * (-self.inf)
        for f in self.factors:
            letters.extend(perm_word(f))
        return BraidWord(self.n, tuple(letters))

    def __str__(self) -> str:
        parts = [f"D^{self.inf}"]
        parts += ["[" + " ".join(str(x + 1) for x in f) + "]" for f in self.factors]
        return " . ".join(parts)


def _normalize(n: int, inf: int, factors: list) -> NormalForm:
    """Left-greedy form of ``Delta^inf * F1 * ... * Fr`` (simple ``Fi``)."""
    delta, e = half_twist(n), identity(n)
    out: list = []
    for f in factors:
        out.append(f)
        j = len(out) - 2
        while j >= 0:
            a, b = _left_weight(out[j], out[j + 1])
            if (a, b) == (out[j], out[j + 1]):
                break
            out[j], out[j + 1] = a, b
            j -= 1
    # left-weighted: any Delta factors lead and identities trail
    k = 0
    while k < len(out) and out[k] == delta:
        k += 1
    # Delta^inf D^k F: moving D^k past nothing, just absorb
    out = out[k:]
    while out and out[-1] == e:
        out.pop()
    return NormalForm(n, inf + k, tuple(out))


def normal_form(word: BraidWord) -> NormalForm:
    n = word.n
    if n == 1:
        return NormalForm(1, 0, ())
    letters = word.letters
    # sigma_i^-1 = Delta^-1 X_i with X_i = Delta sigma_i^-1; every Delta^-1 is
    # pulled to the front, twisting the factors it passes by tau
    negatives_after = [0] * len(letters)
    count = 0
    for j in range(len(letters) - 1, -1, -1):
        negatives_after[j] = count
        if letters[j] < 0:
            count += 1
    factors = []
    for j, a in enumerate(letters):
        s = generator(n, abs(a) - 1)
        f = s if a > 0 else left_complement(s)
        factors.append(tau(f, negatives_after[j]))
    return _normalize(n, -count, factors)


def words_equal(w1: BraidWord, w2: BraidWord) -> bool:
    if w1.n != w2.n:
        raise ValueError("strand counts differ")
    return normal_form(w1) == normal_form(w2)


def reduce(word: BraidWord, cyclic: bool = False) -> BraidWord:
    """Free reduction (and, if ``cyclic``, cancellation across the wrap)."""
    stack: list = []
    for a in word.letters:
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    if cyclic:
        lo, hi = 0, len(stack)
        while hi - lo >= 2 and stack[lo] == -stack[hi - 1]:
            lo += 1
            hi -= 1
        stack = stack[lo:hi]
    return BraidWord(word.n, tuple(stack))


# -- conjugation moves --------------------------------------------------------------

def _conj_simple(nf: NormalForm, s: Perm) -> NormalForm:
    """``s^-1 (Delta^k F) s`` for a simple ``s``."""
    x = left_complement(s)   # s^-1 = Delta^-1 x
    return _normalize(nf.n, nf.inf - 1, [tau(x, nf.inf)] + list(nf.factors) + [s])


def cycling(nf: NormalForm) -> tuple:
    """Returns (cycled form, conjugator ``y`` as a simple) with result ``y^-1 nf y``."""
    if not nf.factors:
        return nf, identity(nf.n)
    y = tau(nf.factors[0], nf.inf)
    return _normalize(nf.n, nf.inf, list(nf.factors[1:]) + [y]), y


def decycling(nf: NormalForm) -> tuple:
    """Returns (decycled form, ``r``) with result ``r nf r^-1``, ``r`` the last factor."""
    if not nf.factors:
        return nf, identity(nf.n)
    r = nf.factors[-1]
    return _normalize(nf.n, nf.inf, [tau(r, nf.inf)] + list(nf.factors[:-1])), r


def _simple_word(p: Perm) -> BraidWord:
    return BraidWord(len(p), perm_word(p))


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass
class ConjugacyResult:
    verdict: Verdict
    witness: Optional[BraidWord] = None      # w2 = x^-1 w1 x
    invariant: Optional[str] = None
    operations: int = 0

    def __bool__(self) -> bool:
        return self.verdict is Verdict.YES


class _Budget:
    def __init__(self, limit: int):
        self.limit, self.used = limit, 0

    def spend(self, k: int = 1) -> None:
        self.used += k
        if self.used > self.limit:
            raise _OutOfBudget


class _OutOfBudget(Exception):
    pass


def super_summit(nf: NormalForm, budget: Optional[_Budget] = None) -> tuple:
    """Cycle then decycle into the super summit set; returns (form, conjugator word).

    The result equals ``c^-1 nf c`` for the returned word ``c``.
    """
    n = nf.n
    bound = n * (n - 1) // 2 + 1
    conj = BraidWord(n)
    improved = True
    while improved:
        improved = False
        tries = 0
        while tries < bound and nf.factors:
            new, y = cycling(nf)
            if budget:
                budget.spend()
            conj = conj * _simple_word(y)
            tries = 0 if new.inf > nf.inf else tries + 1
            improved |= new.inf > nf.inf
            nf = new
        tries = 0
        while tries < bound and nf.factors:
            new, r = decycling(nf)
            if budget:
                budget.spend()
            conj = conj * _simple_word(r).inverse()
            tries = 0 if new.sup < nf.sup else tries + 1
            improved |= new.sup < nf.sup
            nf = new
    return nf, conj


def _all_simples(n: int):
    from itertools import permutations
    e, d = identity(n), half_twist(n)
    for p in permutations(range(n)):
        if p != e and p != d:
            yield p


def are_conjugate(w1: BraidWord, w2: BraidWord, budget: int = 200_000) -> ConjugacyResult:
    """Three-valued conjugacy decision with a verified witness for ``yes``."""
    if w1.n != w2.n:
        raise ValueError("strand counts differ")
    n = w1.n
    if w1.exponent_sum != w2.exponent_sum:
        return ConjugacyResult(Verdict.NO, invariant=f"exponent sum {w1.exponent_sum} != {w2.exponent_sum}")
    if cycle_type(w1.permutation) != cycle_type(w2.permutation):
        return ConjugacyResult(Verdict.NO, invariant="permutation cycle types differ")
    b = _Budget(budget)
    try:
        s1, c1 = super_summit(normal_form(w1), b)
        s2, c2 = super_summit(normal_form(w2), b)
        if (s1.inf, s1.sup) != (s2.inf, s2.sup):
            return ConjugacyResult(Verdict.NO, invariant=f"summit inf/sup ({s1.inf},{s1.sup}) != ({s2.inf},{s2.sup})",
                                   operations=b.used)
        # breadth-first search of the super summit set of w1 for s2
        seen = {s1: BraidWord(n)}
        queue = deque([s1])
        simples = [(p, _simple_word(p)) for p in _all_simples(n)] + [(half_twist(n), _simple_word(half_twist(n)))]
        while queue:
            cur = queue.popleft()
            if cur == s2:
                witness = c1 * seen[cur] * c2.inverse()
                if not words_equal(w1.conjugate(witness), w2):
                    raise AssertionError("conjugacy witness failed verification")
                return ConjugacyResult(Verdict.YES, witness=reduce(witness), operations=b.used)
            for p, pw in simples:
                b.spend()
                nxt = _conj_simple(cur, p)
                if nxt.inf == s1.inf and nxt.sup == s1.sup and nxt not in seen:
                    seen[nxt] = seen[cur] * pw
                    queue.append(nxt)
        return ConjugacyResult(Verdict.NO, invariant=f"super summit sets disjoint ({len(seen)} elements searched)",
                               operations=b.used)
    except _OutOfBudget:
        return ConjugacyResult(Verdict.UNKNOWN, operations=b.used)
