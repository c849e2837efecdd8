"""Periodic points of time-1 maps: Newton search, Floquet data, actions."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .hamiltonian import (
    Surface,
    SurfacePoint,
    TimePeriodicHamiltonian,
    Trajectory,
    reduce_torus,
    surface_grid,
)

log = logging.getLogger(__name__)

TOL_ORBIT = 1e-10
MERGE_RADIUS = 1e-4
TOL_EIG = 1e-6
COND_MAX = 1e8
TOL_ACTION = 1e-8

TRIVIAL = "trivial"

ISOLATION_SCOPE = ("isolation is certified only against the supplied orbit set, "
                   "not against all periodic orbits of the flow")


class UnsupportedClassError(ValueError):
    """Action requested for a non-contractible torus orbit."""


class ClassMismatchError(ValueError):
    """Orbits with different free homotopy classes were compared."""


class SamplingResolutionError(ValueError):
    """A lifted displacement is too far from an integer vector to read a winding."""


@dataclass
class PeriodicOrbit:
    seed: np.ndarray                 # lifted start point at t = 0
    period: int
    samples: Trajectory
    monodromy: np.ndarray
    multipliers: np.ndarray
    nondegenerate: bool
    residual: float
    surface: Surface
    action: Optional[float] = None
    homotopy_class: Union[str, tuple] = TRIVIAL
    kind: str = ""

    @property
    def point(self) -> SurfacePoint:
        if self.surface is Surface.TORUS:
            return SurfacePoint.on_torus(*self.seed)
        return SurfacePoint(float(self.seed[0]), float(self.seed[1]))

    def to_record(self) -> dict:
        seed = reduce_torus(self.seed) if self.surface is Surface.TORUS else self.seed
        return {
            "seed": [float(seed[0]), float(seed[1])],
            "period": self.period,
            "multipliers": [[float(m.real), float(m.imag)] for m in self.multipliers],
            "action": None if self.action is None else float(self.action),
            "class": self.homotopy_class if isinstance(self.homotopy_class, str)
            else list(self.homotopy_class),
            "residual": float(self.residual),
            "kind": self.kind,
        }


@dataclass
class OrbitSet:
    orbits: list
    surface: Surface
    period: int
    diagnostics: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.orbits)

    def __iter__(self):
        return iter(self.orbits)

    def __getitem__(self, i):
        return self.orbits[i]

    @property
    def shared_class(self) -> bool:
        return len({_class_key(o.homotopy_class) for o in self.orbits}) <= 1

    def subset(self, indices: Sequence[int]) -> "OrbitSet":
        return OrbitSet([self.orbits[i] for i in indices], self.surface, self.period,
                        dict(self.diagnostics, subset=list(indices)))


def _class_key(c):
    return c if isinstance(c, str) else tuple(int(v) for v in c)


def classify_multipliers(mult: np.ndarray, tol_eig: float = TOL_EIG) -> tuple[bool, str]:
    """Non-degeneracy and elliptic/hyperbolic/parabolic label from the multipliers.

    Besides the multiplier test, ``det(M - I) = (1 - l1)(1 - l2)`` must exceed
    ``tol_eig``: in a one-parameter family the multipliers sit at
    ``1 +- sqrt(residual)`` and would otherwise slip past the test.
    """
    tr = float(np.real(mult[0] + mult[1]))
    det_mi = float(np.real((1.0 - mult[0]) * (1.0 - mult[1])))
    nondeg = bool(np.all(np.abs(mult - 1.0) > tol_eig)) and abs(det_mi) > tol_eig
    if abs(abs(tr) - 2.0) <= tol_eig:
        kind = "parabolic"
    elif abs(tr) < 2.0:
        kind = "elliptic"
    else:
        kind = "hyperbolic"
    return nondeg, kind


def time_k_map_with_jacobian(H: TimePeriodicHamiltonian, p, k: int, step: float = 1e-3):
    """Endpoint of the k-fold time-1 map and its Jacobian (variational equations)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = p.as_array() if isinstance(p, SurfacePoint) else np.asarray(p, dtype=float)
    res = H.flow(pts, 0.0, float(k), step, jacobian=True)
    return res.end, res.jacobian


def seed_grid(surface: Surface, n: int) -> np.ndarray:
    xs, ys, mask = surface_grid(surface, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X, Y], axis=-1)[mask]
    if surface is Surface.DISK:
        # keep seeds off the boundary circle itself
        pts = pts[np.sum(pts ** 2, axis=-1) < 1.0 - 1e-9]
    return pts


def _torus_delta(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = a - b
    return d - np.round(d)


def _dedupe(points: np.ndarray, surface: Surface, radius: float) -> list[int]:
    keep: list[int] = []
    for i, p in enumerate(points):
        for j in keep:
            d = _torus_delta(p, points[j]) if surface is Surface.TORUS else p - points[j]
            if np.max(np.abs(d)) <= radius:
                break
        else:
            keep.append(i)
    return keep


def free_homotopy_class(orbit_or_traj, period: Optional[int] = None):
    """Winding vector of a torus orbit over one period; ``"trivial"`` on the disk."""
    traj = orbit_or_traj.samples if isinstance(orbit_or_traj, PeriodicOrbit) else orbit_or_traj
    if traj.surface is Surface.DISK:
        return TRIVIAL
    disp = traj.lifts[-1] - traj.lifts[0]
    w = np.round(disp)
    if np.max(np.abs(disp - w)) > 0.25:
        raise SamplingResolutionError(f"lift displacement {disp} is not near an integer vector")
    return (int(w[0]), int(w[1]))


def _is_contractible(cls) -> bool:
    return cls == TRIVIAL or tuple(cls) == (0, 0)


def loop_action(H: TimePeriodicHamiltonian, times: np.ndarray, lifts: np.ndarray, *,
                variational: bool = False) -> float:
    """``-(signed area) + int H dt`` for a closed sampled loop.

    The area is Green's integral ``1/2 int (x dy/dt - y dx/dt) dt`` with the
    velocity taken from the vector field itself; both integrals use the
    trapezoidal rule, which is spectrally accurate for smooth periodic
    integrands.

    With the sign of the vector field used here, orbits are not critical
    points of that functional.  ``variational=True`` flips the area term,
    giving ``+(signed area) + int H dt``, which is stationary at orbits (so it
    is constant along orbit families and moves by at most the Hofer norm of
    a perturbation).  Both agree on constant loops.
    """
    vel = H.vector_field(times, lifts)
    green = 0.5 * (lifts[:, 0] * vel[:, 1] - lifts[:, 1] * vel[:, 0])
    energy = H.value(times, lifts)
    area = float(np.trapezoid(green, times))
    return (area if variational else -area) + float(np.trapezoid(energy, times))


def orbit_action(H: TimePeriodicHamiltonian, orbit: PeriodicOrbit, *, variational: bool = False) -> float:
    """Action of a contractible k-periodic orbit (disk, or torus class (0, 0))."""
    if not _is_contractible(orbit.homotopy_class):
        raise UnsupportedClassError(
            f"orbit in class {orbit.homotopy_class} is not contractible; torus cappings are unsupported")
    return loop_action(H, orbit.samples.times, orbit.samples.lifts, variational=variational)


def build_orbits(H: TimePeriodicHamiltonian, seeds: np.ndarray, k: int, step: float,
                 tol_eig: float = TOL_EIG) -> list[PeriodicOrbit]:
    """Promote converged roots to orbits: one batched recorded flow over [0, k]."""
    seeds = np.asarray(seeds, dtype=float).reshape(-1, 2)
    if len(seeds) == 0:
        return []
    res = H.flow(seeds, 0.0, float(k), step, jacobian=True, record=True)
    out = []
    for i, seed in enumerate(seeds):
        disp = res.end[i] - seed
        if H.surface is Surface.TORUS:
            disp = disp - np.round(disp)
        traj = Trajectory(res.times, res.path[:, i], H.surface, step)
        mult = np.linalg.eigvals(res.jacobian[i])
        nondeg, kind = classify_multipliers(mult, tol_eig)
        orbit = PeriodicOrbit(seed.copy(), k, traj, res.jacobian[i], mult, nondeg,
                              float(np.max(np.abs(disp))), H.surface, kind=kind)
        orbit.homotopy_class = free_homotopy_class(traj)
        if _is_contractible(orbit.homotopy_class):
            orbit.action = orbit_action(H, orbit)
        out.append(orbit)
    return out


def build_orbit(H: TimePeriodicHamiltonian, seed: np.ndarray, k: int, step: float,
                tol_eig: float = TOL_EIG) -> PeriodicOrbit:
    return build_orbits(H, seed, k, step, tol_eig)[0]


def newton_refine(H: TimePeriodicHamiltonian, seeds: np.ndarray, k: int, *, step: float = 1e-3,
                  tol_orbit: float = TOL_ORBIT, max_iter: int = 40, cond_max: float = COND_MAX,
                  max_move: float = 0.1) -> dict:
    """Batched Newton iteration on ``G(p) = phi^k(p) - p`` (mod Z^2 on the torus).

    Returns index arrays into ``seeds`` for converged, degenerate and failed
    starts, together with the final iterates.
    """
    p = np.array(seeds, dtype=float).reshape(-1, 2)
    n = len(p)
    status = np.zeros(n, dtype=int)      # 0 active, 1 converged, 2 degenerate, 3 failed
    residual = np.full(n, np.inf)
    for _ in range(max_iter):
        act = np.flatnonzero(status == 0)
        if act.size == 0:
            break
        end, M = time_k_map_with_jacobian(H, p[act], k, step)
        G = end - p[act]
        if H.surface is Surface.TORUS:
            G = G - np.round(G)
        r = np.max(np.abs(G), axis=-1)
        residual[act] = r
        done = r <= tol_orbit
        status[act[done]] = 1
        A = M - np.eye(2)
        cond = np.linalg.cond(A)
        bad = ~done & ~(cond < cond_max)
        status[act[bad]] = 2
        go = ~done & ~bad
        if not np.any(go):
            continue
        delta = -np.linalg.solve(A[go], G[go][..., None])[..., 0]
        size = np.max(np.abs(delta), axis=-1)
        delta *= np.minimum(1.0, max_move / np.maximum(size, 1e-300))[:, None]
        idx = act[go]
        p[idx] += delta
        if H.surface is Surface.DISK:
            out = np.sum(p[idx] ** 2, axis=-1) >= 1.0
            status[idx[out]] = 3
    status[status == 0] = 3
    return {"points": p, "status": status, "residual": residual}


def find_periodic_points(H: TimePeriodicHamiltonian, k: int, seeds: Union[int, np.ndarray] = 32, *,
                         tol_orbit: float = TOL_ORBIT, merge_radius: float = MERGE_RADIUS,
                         step: float = 1e-3, tol_eig: float = TOL_EIG, max_iter: int = 40,
                         cond_max: float = COND_MAX,
                         symmetry: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                         symmetry_order: Optional[int] = None,
                         coarse_step: Optional[float] = None) -> OrbitSet:
    """Nondegenerate period-k points of the time-1 map found from a seed grid.

    ``symmetry`` is a map commuting with the k-fold map (for ``k > 1`` the
    time-1 map itself is used by default); images of converged roots under
    it, up to ``symmetry_order - 1`` iterates (default ``k``), are refined
    as extra seeds, so an orbit found at one of its points is found at all.
    With ``coarse_step`` the grid is first solved with that (cheaper) step
    and the distinct roots are then polished at ``step``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    pts = seed_grid(H.surface, seeds) if np.isscalar(seeds) else np.asarray(seeds, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("empty seed grid")
    n_grid = len(pts)
    if coarse_step is not None and coarse_step > step:
        pre = newton_refine(H, pts, k, step=coarse_step, tol_orbit=tol_orbit, max_iter=max_iter,
                            cond_max=cond_max)
        pts = pre["points"][pre["status"] == 1]
        pts = pts[_dedupe(pts, H.surface, merge_radius)] if len(pts) else pts
        if len(pts) == 0:
            pts = np.empty((0, 2))
    out = newton_refine(H, pts, k, step=step, tol_orbit=tol_orbit, max_iter=max_iter, cond_max=cond_max)
    status, roots = out["status"], out["points"]
    if symmetry is None and k > 1:
        def symmetry(q):
            return H.flow(q, 0.0, 1.0, step).end
    if symmetry is not None and (symmetry_order or k) > 1 and np.any(status == 1):
        found = roots[status == 1]
        found = found[_dedupe(found, H.surface, merge_radius)]
        images, extra = found, []
        for _ in range((symmetry_order or k) - 1):
            images = symmetry(images)
            extra.append(images)
        extra = np.concatenate(extra)
        more = newton_refine(H, extra, k, step=step, tol_orbit=tol_orbit, max_iter=max_iter, cond_max=cond_max)
        status = np.concatenate([status, more["status"]])
        roots = np.concatenate([roots, more["points"]])
    # roots stay on the lift they converged on: some torus presets are only
    # periodic on a covering cylinder, and the winding is read from the lift
    conv = roots[status == 1]
    keep = _dedupe(conv, H.surface, merge_radius) if len(conv) else []
    orbits = []
    degenerate_roots = []
    for orb in build_orbits(H, conv[keep], k, step, tol_eig):
        if orb.nondegenerate:
            orbits.append(orb)
        else:
            degenerate_roots.append(orb.seed.tolist())
    orbits.sort(key=lambda o: (round(float(o.seed[0]), 9), round(float(o.seed[1]), 9)))
    diag = {
        "seeds": int(n_grid),
        "refined": int(len(status)),
        "converged": int(np.sum(status == 1)),
        "degenerate_seeds": int(np.sum(status == 2)),
        "failed_seeds": int(np.sum(status == 3)),
        "degenerate_roots": len(degenerate_roots),
        "degenerate_examples": degenerate_roots[:8],
        "step": step,
        "scope": "non-degeneracy certified for the requested period only",
    }
    if not orbits:
        log.info("no nondegenerate period-%d orbit found for %s: %s", k, H.name, diag)
    return OrbitSet(orbits, H.surface, k, diag)


@dataclass(frozen=True)
class IsolationReport:
    gaps: np.ndarray
    isolated: bool
    epsilon: float
    min_nonzero_gap: float
    closed: bool = True         # zero-gap companions of the subset lie in it
    scope: str = ISOLATION_SCOPE


def action_gaps_and_isolation(actions: Sequence[float], epsilon: float, classes: Optional[Sequence] = None,
                              tol_action: float = TOL_ACTION,
                              subset: Optional[Sequence[int]] = None) -> IsolationReport:
    """Pairwise action gaps and the epsilon-isolation verdict.

    ``actions`` are those of every orbit found in the class; ``subset``
    selects the candidate collection (default: all of them).  The verdict
    needs every gap to be 0 or at least ``epsilon`` and, for the subset,
    every zero-gap companion to belong to it.  It is relative to the orbits
    supplied.
    """
    if classes is not None and len({_class_key(c) for c in classes}) > 1:
        raise ClassMismatchError("orbits lie in different free homotopy classes")
    a = np.asarray(actions, dtype=float)
    if np.any(~np.isfinite(a)):
        raise ValueError("all orbits need defined actions")
    gaps = np.abs(a[:, None] - a[None, :])
    zero = gaps <= tol_action
    separated = bool(np.all(zero | (gaps >= epsilon)))
    closed = True
    if subset is not None:
        inside = np.zeros(len(a), dtype=bool)
        inside[list(subset)] = True
        closed = bool(not np.any(zero[inside][:, ~inside]))
    nz = gaps[~zero]
    return IsolationReport(gaps, separated and closed, float(epsilon),
                           float(nz.min()) if nz.size else float("inf"), closed)


def minimal_period(orbit: PeriodicOrbit, radius: float = MERGE_RADIUS) -> PeriodicOrbit:
    """The orbit cut to its least period; multipliers stay those of the k-fold map."""
    tr = orbit.samples
    seed = np.asarray(orbit.seed, dtype=float)
    for d in range(1, orbit.period):
        if orbit.period % d:
            continue
        p = np.array([np.interp(d, tr.times, tr.lifts[:, 0]), np.interp(d, tr.times, tr.lifts[:, 1])])
        gap = _torus_delta(p, seed) if orbit.surface is Surface.TORUS else p - seed
        if np.max(np.abs(gap)) < radius:
            keep = tr.times <= d + 1e-12
            traj = Trajectory(tr.times[keep], tr.lifts[keep], tr.surface, tr.step)
            return PeriodicOrbit(orbit.seed, d, traj, orbit.monodromy, orbit.multipliers, orbit.nondegenerate,
                                 orbit.residual, orbit.surface, orbit.action, orbit.homotopy_class, orbit.kind)
    return orbit


def distinct_cycles(orbits: Sequence[PeriodicOrbit], radius: float = MERGE_RADIUS) -> list[int]:
    """One representative per cycle of the time-1 map.

    A period-k point and its images at integer times are separate roots of
    the k-fold map but give the same strands; later duplicates are dropped.
    """
    keep: list[int] = []
    starts: list[np.ndarray] = []
    for i, orb in enumerate(orbits):
        seed = np.asarray(orb.seed, dtype=float)
        dup = False
        for pts in starts:
            d = pts - seed
            if orb.surface is Surface.TORUS:
                d = _torus_delta(pts, seed)
            if np.any(np.max(np.abs(d), axis=-1) < radius):
                dup = True
                break
        if dup:
            continue
        keep.append(i)
        traj = orb.samples
        ts = np.arange(orb.period, dtype=float)
        starts.append(np.stack([np.interp(ts, traj.times, traj.lifts[:, 0]),
                                np.interp(ts, traj.times, traj.lifts[:, 1])], axis=-1))
    return keep


def orbit_set_actions(orbits: OrbitSet) -> tuple[list, list]:
    return [o.action for o in orbits], [o.homotopy_class for o in orbits]
