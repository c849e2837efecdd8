"""Symbolic coding on m symbols, the periodic word Q and its braid demo.

Positions are 0-based.  For a periodic point whose symbol sequence is the
word read from ``position``, ``theta(k)`` is the symbol ``k`` steps away.
Membership conventions: ``V_j`` iff theta_0 = j, ``H_j`` iff theta_-1 = j,
``phi^n(H_j)`` iff theta_-2 = j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .braidword import BraidWord
from .entropy import GrowthEstimate, gamma_estimate
from .extract import GeometricBraid, braid_word_with_retry, check_collisions
from .hamiltonian import ConstructionError, Surface


def primitive_root(seq: Sequence[int]) -> tuple:
    seq = tuple(seq)
    n = len(seq)
    for p in range(1, n + 1):
        if n % p == 0 and seq == seq[:p] * (n // p):
            return seq[:p]
    return seq


@dataclass(frozen=True)
class SymbolWord:
    """Periodic point of the full shift on ``m`` symbols (1..m)."""

    m: int
    word: tuple

    def __post_init__(self):
        w = tuple(int(a) for a in self.word)
        if not w:
            raise ValueError("empty word")
        if any(a < 1 or a > self.m for a in w):
            raise ValueError(f"symbols must lie in 1..{self.m}")
        object.__setattr__(self, "word", primitive_root(w))

    @property
    def period(self) -> int:
        return len(self.word)

    def theta(self, k: int, position: int = 0) -> int:
        return self.word[(position + k) % self.period]

    def shift(self, k: int = 1) -> "SymbolWord":
        k %= self.period
        return SymbolWord(self.m, self.word[k:] + self.word[:k])

    def in_V(self, j: int, position: int = 0) -> bool:
        return self.theta(0, position) == j

    def in_H(self, j: int, position: int = 0) -> bool:
        return self.theta(-1, position) == j

    def in_image_H(self, j: int, position: int = 0) -> bool:
        """Membership in ``phi^n(H_j)``."""
        return self.theta(-2, position) == j


def shift_and_decode(word: SymbolWord, k: int, position: int = 0) -> dict:
    return {"theta": word.theta(k, position),
            "V": word.theta(0, position), "H": word.theta(-1, position),
            "image_H": word.theta(-2, position)}


def _check_m(m: int) -> None:
    if m < 3:
        raise ValueError("Q needs m >= 3 (the block range 2..m-1 must be non-empty)")


def q_blocks(m: int) -> list:
    _check_m(m)
    return [(m, j, 1, j, 1, j, m, j) for j in range(2, m)]


def build_Q(m: int) -> SymbolWord:
    return SymbolWord(m, tuple(a for block in q_blocks(m) for a in block))


def q_position(m: int, j: int, l: int) -> int:
    """Index of ``q_l^j`` in the word: block ``j`` starts at 8(j-2), q_1 at its third symbol."""
    return (8 * (j - 2) + l + 1) % (8 * (m - 2))


@dataclass
class QStructureReport:
    m: int
    period: int
    expected_period: int
    rows: list = field(default_factory=list)   # dicts: j, point, condition, ok

    @property
    def passed(self) -> bool:
        return self.period == self.expected_period and all(r["ok"] for r in self.rows)

    def format(self) -> str:
        lines = [f"m = {self.m}  period = {self.period} (expected {self.expected_period})"]
        for r in self.rows:
            lines.append(f"  j={r['j']:<3d} {r['point']:<5s} {r['condition']:<28s} {'ok' if r['ok'] else 'FAIL'}")
        return "\n".join(lines)


def verify_Q_structure(m: int, word: Optional[SymbolWord] = None) -> QStructureReport:
    """Symbolic evaluation of the membership pattern of the points of Q."""
    _check_m(m)
    word = build_Q(m) if word is None else word
    report = QStructureReport(m, word.period, 8 * (m - 2))
    odd = {1: ("V", 1, "image_H", m), 3: ("V", 1, "image_H", 1),
           5: ("V", m, "image_H", 1), 7: ("V", m, "image_H", m)}
    for j in range(2, m):
        for l, (_, v, _, hh) in odd.items():
            pos = q_position(m, j, l)
            ok = word.in_V(v, pos) and word.in_H(j, pos) and word.in_image_H(hh, pos)
            report.rows.append({"j": j, "point": f"q{l}", "ok": bool(ok),
                                "condition": f"V{v} & H{j} & phi(H{hh})"})
        for l in (2, 4, 6, 8):
            pos = q_position(m, j, l)
            ok = word.in_H(1, pos) or word.in_H(m, pos)
            report.rows.append({"j": j, "point": f"q{l}", "ok": bool(ok), "condition": f"H1 | H{m}"})
    return report


def full_shift_entropy(m: int) -> float:
    return math.log(m)


# -- realization on a polynomial Henon map ----------------------------------------------

MU_SCHEDULE = (20.0, 50.0, 100.0, 200.0, 500.0, 1000.0)


@dataclass
class HenonRealization:
    """Periodic orbit of ``(x, y) -> (y, -x + mu p(y))`` coded by a symbol word.

    ``p`` has ``m`` equally spaced roots in [-1, 1]; symbol ``j`` is the
    neighbourhood of the ``j``-th root.
    """

    m: int
    mu: float
    ys: np.ndarray
    residual: float
    coding_ok: bool

    def p(self, y):
        roots = np.linspace(-1.0, 1.0, self.m)
        return self.mu * np.prod([y - r for r in roots], axis=0)

    @property
    def points(self) -> np.ndarray:
        """Orbit points ``z_n = (y_{n-1}, y_n)``."""
        return np.stack([np.roll(self.ys, 1), self.ys], axis=-1)


def _newton_orbit(real: HenonRealization, y: np.ndarray, max_iter: int = 60) -> tuple:
    """Solve ``y_{n+1} + y_{n-1} = mu p(y_n)`` cyclically by Newton's method."""
    n = len(y)
    shift = np.roll(np.eye(n), 1, axis=1) + np.roll(np.eye(n), -1, axis=1)
    h = 1e-7
    res = math.inf
    for _ in range(max_iter):
        G = np.roll(y, -1) + np.roll(y, 1) - real.p(y)
        res = float(np.max(np.abs(G)))
        if res < 1e-12 or not np.isfinite(res):
            break
        dp = (real.p(y + h) - real.p(y - h)) / (2 * h)
        try:
            y = y - np.linalg.solve(shift - np.diag(dp), G)
        except np.linalg.LinAlgError:
            break
    return y, res


def henon_orbit(word: SymbolWord, mu: Optional[float] = None) -> HenonRealization:
    """Continue the anti-integrable orbit of ``word``; raises ConstructionError on failure."""
    m = word.m
    roots = np.linspace(-1.0, 1.0, m)
    code = np.array(word.word) - 1
    res = math.inf
    for mu_try in ([mu] if mu is not None else MU_SCHEDULE):
        real = HenonRealization(m, float(mu_try), roots[code].copy(), math.inf, False)
        ys, res = _newton_orbit(real, roots[code])
        nearest = np.argmin(np.abs(ys[:, None] - roots[None, :]), axis=1)
        ok = res < 1e-9 and bool(np.all(nearest == code))
        real = HenonRealization(m, float(mu_try), ys, res, ok)
        if ok:
            return real
    raise ConstructionError(f"no coded orbit for m = {m} (last residual {res:.2e})")


def henon_isotopy(real: HenonRealization, samples: int = 400) -> GeometricBraid:
    """Strands of the orbit under a shear then a quarter turn; the end is the Henon image."""
    z = real.points
    x0, y0 = z[:, 0], z[:, 1]
    s = np.linspace(0.0, 1.0, samples)
    shear = np.stack([x0[None] - s[:, None] * real.p(y0)[None], np.broadcast_to(y0, (samples, len(y0)))], -1)
    xs, ys = x0 - real.p(y0), y0
    a = -0.5 * np.pi * s[1:, None]
    turn = np.stack([np.cos(a) * xs - np.sin(a) * ys, np.sin(a) * xs + np.cos(a) * ys], -1)
    frames = np.concatenate([shear, turn], axis=0)          # (T, n, 2)
    strands = np.ascontiguousarray(frames.transpose(1, 0, 2))
    times = np.linspace(0.0, 1.0, strands.shape[1])
    check_collisions(strands, times, Surface.DISK, 1e-9)
    return GeometricBraid(times, strands, Surface.DISK, tuple((0, i) for i in range(len(z))))


@dataclass
class QDemoResult:
    m: int
    mu: float
    braid: BraidWord
    estimate: GrowthEstimate
    bound: float

    @property
    def holds(self) -> bool:
        return self.estimate.rate >= self.bound - 0.1

    def as_row(self) -> dict:
        return {"m": self.m, "mu": self.mu, "strands": self.braid.n, "letters": len(self.braid),
                "gamma": self.estimate.rate, "bound": self.bound,
                "iterations_used": self.estimate.iterations_used, "holds": self.holds}


def q_braid_gamma_demo(m: int, N: int = 12, projection_angle: float = 0.123) -> QDemoResult:
    """Braid of Q realized on a polynomial Henon map, and its growth estimate."""
    _check_m(m)
    if m > 6:
        raise ValueError("the demo supports m <= 6")
    real = henon_orbit(build_Q(m))
    braid = henon_isotopy(real)
    word = braid_word_with_retry(braid, projection_angle).word
    est = gamma_estimate(word, N)
    return QDemoResult(m, real.mu, word, est, math.log(m - 2))
