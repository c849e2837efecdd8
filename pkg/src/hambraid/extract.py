"""Geometric braids of orbit sets and their Artin words under planar projection."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .braidword import BraidWord
from .garside import ConjugacyResult, are_conjugate
from .hamiltonian import Surface

COLLISION_RADIUS = 1e-5
MAX_RETRIES = 8
RETRY_DELTA = 1e-3
ENDPOINT_TOL = 1e-6


class CollisionError(ValueError):
    def __init__(self, pair: tuple, t: float, distance: float):
        super().__init__(f"strands {pair[0]} and {pair[1]} come within {distance:.3e} at t = {t:.6f}")
        self.pair, self.t, self.distance = pair, t, distance


class GenericityError(ValueError):
    def __init__(self, t: float, reason: str):
        super().__init__(f"non-generic projection at t = {t:.6f}: {reason}")
        self.t, self.reason = t, reason


class UnsupportedSurfaceError(ValueError):
    pass


@dataclass(frozen=True)
class GeometricBraid:
    times: np.ndarray          # (M,) uniform samples of [0, 1]
    strands: np.ndarray        # (n, M, 2) lifted positions
    surface: Surface
    labels: tuple = ()         # (orbit index, slice index) per strand

    @property
    def n(self) -> int:
        return int(self.strands.shape[0])

    @property
    def samples(self) -> int:
        return int(self.strands.shape[1])

    @property
    def permutation(self) -> tuple:
        """Strand permutation: strand ``i`` ends where strand ``perm[i]`` starts."""
        start, end = self.strands[:, 0], self.strands[:, -1]
        perm = []
        for i in range(self.n):
            d = end[i][None] - start
            if self.surface is Surface.TORUS:
                d = d - np.round(d)
            dist = np.max(np.abs(d), axis=-1)
            j = int(np.argmin(dist))
            if dist[j] > ENDPOINT_TOL:
                raise ValueError(f"strand {i} does not end on a start point (gap {dist[j]:.2e})")
            perm.append(j)
        if sorted(perm) != list(range(self.n)):
            raise ValueError("strand endpoints are not a permutation of the start points")
        return tuple(perm)

    def csv_rows(self):
        for i in range(self.n):
            for t, p in zip(self.times, self.strands[i]):
                yield (i, float(t), float(p[0]), float(p[1]))


def _slice_strands(orbit, samples_per_period: int) -> list:
    traj = orbit.samples
    grid = np.linspace(0.0, 1.0, samples_per_period + 1)
    out = []
    for j in range(orbit.period):
        t = j + grid
        x = np.interp(t, traj.times, traj.lifts[:, 0])
        y = np.interp(t, traj.times, traj.lifts[:, 1])
        out.append(np.stack([x, y], axis=-1))
    return out


def suspend_orbits(orbits: Sequence, samples_per_period: int = 512,
                   collision_radius: float = COLLISION_RADIUS) -> GeometricBraid:
    """Strands ``{(t, gamma(t))}``; a period-k orbit contributes k strands."""
    orbits = list(orbits)
    if samples_per_period < 2:
        raise ValueError("need at least two samples per period")
    strands, labels = [], []
    surface = orbits[0].surface if orbits else Surface.DISK
    for a, orb in enumerate(orbits):
        for j, s in enumerate(_slice_strands(orb, samples_per_period)):
            strands.append(s)
            labels.append((a, j))
    times = np.linspace(0.0, 1.0, samples_per_period + 1)
    arr = np.array(strands).reshape(len(strands), len(times), 2)
    check_collisions(arr, times, surface, collision_radius, labels)
    return GeometricBraid(times, arr, surface, tuple(labels))


def flow_braid(H, points, samples: int = 512, step: float = 1e-4,
               collision_radius: float = COLLISION_RADIUS) -> GeometricBraid:
    """Strands of a finite set under the time-[0, 1] flow of ``H``.

    The set should be invariant under the time-1 map; the permutation check
    of the result enforces it, so ``step`` must resolve the flow to ~1e-7.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    res = H.flow(pts, 0.0, 1.0, step, record=True)
    times = np.linspace(0.0, 1.0, samples + 1)
    arr = np.empty((len(pts), len(times), 2))
    for i in range(len(pts)):
        for c in range(2):
            arr[i, :, c] = np.interp(times, res.times, res.path[:, i, c])
    labels = tuple((i, 0) for i in range(len(pts)))
    check_collisions(arr, times, H.surface, collision_radius, labels)
    return GeometricBraid(times, arr, H.surface, labels)


def check_collisions(strands: np.ndarray, times: np.ndarray, surface: Surface,
                     radius: float, labels: Optional[Sequence] = None) -> float:
    n = strands.shape[0]
    best = math.inf
    for i in range(n):
        for j in range(i + 1, n):
            d = strands[i] - strands[j]
            if surface is Surface.TORUS:
                d = d - np.round(d)
            dist = np.hypot(d[:, 0], d[:, 1])
            k = int(np.argmin(dist))
            best = min(best, float(dist[k]))
            if dist[k] <= radius:
                pair = (labels[i], labels[j]) if labels else (i, j)
                raise CollisionError(pair, float(times[k]), float(dist[k]))
    return best


def _project(braid: GeometricBraid, angle: float):
    c, s = math.cos(angle), math.sin(angle)
    x, y = braid.strands[..., 0], braid.strands[..., 1]
    return x * c + y * s, -x * s + y * c


def braid_word_from_geometric(braid: GeometricBraid, projection_angle: float = 0.05) -> BraidWord:
    """Crossing word of the projection onto the axis at ``projection_angle``.

    Raises :class:`GenericityError` on coincident projections, tangencies
    (sign changes that do not persist at the neighbouring samples) and
    crossings that are not between adjacent strands.
    """
    if braid.surface is not Surface.DISK:
        raise UnsupportedSurfaceError("braid words are only extracted on the disk; use torus_summary")
    n = braid.n
    if n <= 1:
        return BraidWord(max(n, 1))
    u, v = _project(braid, projection_angle)
    times = braid.times
    M = len(times)
    order = list(np.argsort(u[:, 0], kind="stable"))
    if np.any(np.diff(u[order, 0]) == 0):
        raise GenericityError(0.0, "coincident projections at the start")
    diff = u[:, None, :] - u[None, :, :]             # (n, n, M)
    iu, ju = np.triu_indices(n, 1)
    pd = diff[iu, ju]                                 # (pairs, M)
    hits = np.argwhere(pd[:, 1:] == 0.0)
    if len(hits):
        raise GenericityError(float(times[hits[0][1] + 1]), "two strands project to the same point")
    pos = pd > 0
    flips = pos[:, :-1] != pos[:, 1:]                 # (pairs, M - 1)
    letters = []
    for k in np.flatnonzero(flips.any(axis=0)):
        events = []
        for e in np.flatnonzero(flips[:, k]):
            p, q = int(iu[e]), int(ju[e])
            d0, d1 = pd[e, k], pd[e, k + 1]
            # persistence at the neighbouring samples rejects tangencies and jitter
            if (k > 0 and flips[e, k - 1]) or (k + 1 < M - 1 and flips[e, k + 1]):
                raise GenericityError(float(times[k]), f"strands {p}, {q} cross twice within two samples")
            events.append((d0 / (d0 - d1), p, q))
        events.sort()
        for e in range(1, len(events)):
            if events[e][0] == events[e - 1][0] and set(events[e][1:]) & set(events[e - 1][1:]):
                raise GenericityError(float(times[k]), "simultaneous crossings on a common strand")
        for lam, p, q in events:
            ip, iq = order.index(p), order.index(q)
            if abs(ip - iq) != 1:
                raise GenericityError(float(times[k] + lam * (times[k + 1] - times[k])),
                                      f"strands {p}, {q} cross while not adjacent")
            left, right = (p, q) if ip < iq else (q, p)
            i = min(ip, iq)
            vl = v[left, k] + lam * (v[left, k + 1] - v[left, k])
            vr = v[right, k] + lam * (v[right, k + 1] - v[right, k])
            if vl == vr:
                raise GenericityError(float(times[k]), f"strands {p}, {q} collide in the projection plane")
            letters.append((i + 1) if vr > vl else -(i + 1))
            order[i], order[i + 1] = order[i + 1], order[i]
    return BraidWord(n, tuple(letters))


def retry_angles(angle: float, retries: int = MAX_RETRIES, delta: float = RETRY_DELTA) -> list:
    """Deterministic schedule: ``angle, angle + d, angle - d, angle + 2d, ...``."""
    out = [angle]
    for k in range(1, retries + 1):
        m = (k + 1) // 2
        out.append(angle + (m if k % 2 else -m) * delta)
    return out


@dataclass(frozen=True)
class ExtractedWord:
    word: BraidWord
    angle: float
    retries: int


def braid_word_with_retry(braid: GeometricBraid, projection_angle: float = 0.05,
                          retries: int = MAX_RETRIES) -> ExtractedWord:
    last: Optional[GenericityError] = None
    for k, a in enumerate(retry_angles(projection_angle, retries)):
        try:
            return ExtractedWord(braid_word_from_geometric(braid, a), a, k)
        except GenericityError as err:
            last = err
    raise last


def position_permutation(braid: GeometricBraid, angle: float) -> tuple:
    """The strand permutation expressed on projection positions at ``angle``."""
    u, _ = _project(braid, angle)
    order = list(np.argsort(u[:, 0], kind="stable"))
    rank = {s: i for i, s in enumerate(order)}
    perm = braid.permutation
    return tuple(rank[perm[s]] for s in order)


def projection_invariance_check(braid: GeometricBraid, theta1: float, theta2: float,
                                budget: int = 200_000) -> bool:
    return projection_conjugacy(braid, theta1, theta2, budget).verdict.value == "yes"


def projection_conjugacy(braid: GeometricBraid, theta1: float, theta2: float,
                         budget: int = 200_000) -> ConjugacyResult:
    w1 = braid_word_with_retry(braid, theta1).word
    w2 = braid_word_with_retry(braid, theta2).word
    return are_conjugate(w1, w2, budget)


@dataclass(frozen=True)
class TorusBraidSummary:
    """Winding and permutation data of a torus braid (weaker than free isotopy)."""

    windings: tuple
    permutation: tuple
    pairwise_min_distance: float
    note: str = "torus braids compared by winding vectors and permutation only (weaker check)"


def torus_summary(braid: GeometricBraid) -> TorusBraidSummary:
    """Per-cycle winding vectors (summed lift displacement around each permutation cycle)."""
    disp = braid.strands[:, -1] - braid.strands[:, 0]
    perm = braid.permutation
    seen, windings = set(), []
    for i in range(braid.n):
        if i in seen:
            continue
        total, j = np.zeros(2), i
        while j not in seen:
            seen.add(j)
            total += disp[j]
            j = perm[j]
        windings.append((int(round(total[0])), int(round(total[1]))))
    windings = tuple(windings)
    dmin = check_collisions(braid.strands, braid.times, braid.surface, -1.0)
    return TorusBraidSummary(windings, braid.permutation, dmin)
