"""Time-periodic Hamiltonians on the disk and flat torus.

Conventions
-----------
Symplectic form ``dx ^ dy`` and ``i_X omega = dH``, so the Hamiltonian vector
field is ``X_H = (dH/dy, -dH/dx)``.  With this choice ``H = c r^2 / 2`` rotates
the plane *clockwise* with angular speed ``c``.

Time is reduced modulo 1 into ``[0, 1)`` before every evaluation.  Torus points
are carried on the universal cover (``R^2``) and reduced into ``[0, 1)^2`` on
demand, which keeps winding information available.

All evaluators are vectorised: ``value_fn(t, x, y)`` receives numpy arrays that
broadcast against each other and returns an array of the broadcast shape.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

ScalarField = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
GradientField = Callable[[np.ndarray, np.ndarray, np.ndarray], tuple]

DISK_TOL = 1e-9
H_GRAD = 1e-5
H_HESS = 1e-4
TOL_INNER = 1e-12
MAX_INNER = 50


class NumericDomainError(ValueError):
    """A Hamiltonian or its derivatives produced a non-finite value."""


class IntegratorError(RuntimeError):
    """The implicit midpoint inner solve did not converge."""

    def __init__(self, t: float, residual: float):
        super().__init__(f"inner solve failed at t={t:.6g} (residual {residual:.3e})")
        self.t = t
        self.residual = residual


class ConstructionError(ValueError):
    """A Hamiltonian could not be assembled from the given pieces."""


class Surface(str, enum.Enum):
    DISK = "disk"
    TORUS = "torus"


class Normalization(str, enum.Enum):
    NONE = "none"
    ZERO_MEAN = "zero-mean"
    COMPACT_SUPPORT = "vanish-near-boundary"
    ADMISSIBLE = "admissible-slope-c"


def reduce_time(t):
    return np.mod(t, 1.0)


def reduce_torus(p):
    """Reduce lifted torus coordinates into ``[0, 1)^2`` (idempotent)."""
    q = np.mod(np.asarray(p, dtype=float), 1.0)
    # np.mod can return exactly 1.0 for tiny negative inputs
    return np.where(q >= 1.0, 0.0, q)


@dataclass(frozen=True)
class SurfacePoint:
    x: float
    y: float
    surface: Surface = Surface.DISK
    lift: Optional[tuple] = None

    def __post_init__(self):
        if self.surface is Surface.DISK and self.x * self.x + self.y * self.y > 1.0 + DISK_TOL:
            raise ValueError(f"point ({self.x}, {self.y}) lies outside the unit disk")

    @classmethod
    def on_torus(cls, x: float, y: float) -> "SurfacePoint":
        rx, ry = reduce_torus([x, y])
        return cls(float(rx), float(ry), Surface.TORUS, (float(x), float(y)))

    def normalized(self) -> "SurfacePoint":
        if self.surface is Surface.DISK:
            return self
        rx, ry = reduce_torus([self.x, self.y])
        return SurfacePoint(float(rx), float(ry), Surface.TORUS, self.lift or (self.x, self.y))

    def as_array(self) -> np.ndarray:
        if self.lift is not None:
            return np.array(self.lift, dtype=float)
        return np.array([self.x, self.y], dtype=float)


def _as_points(p) -> np.ndarray:
    if isinstance(p, SurfacePoint):
        return p.as_array()
    return np.asarray(p, dtype=float)


def check_on_surface(surface: Surface, p: np.ndarray) -> None:
    if surface is Surface.DISK:
        r2 = np.sum(np.asarray(p) ** 2, axis=-1)
        if np.any(r2 > 1.0 + DISK_TOL):
            raise ValueError("point outside the unit disk")


@dataclass(frozen=True, eq=False)
class TimePeriodicHamiltonian:
    """A 1-periodic Hamiltonian ``H(t, x, y)`` on the disk or torus.

    ``gradient_fn`` and ``hessian_fn`` are optional; missing derivatives are
    taken by central differences (4th order with step ``H_GRAD`` for the
    gradient, 2nd order differences of the gradient for the Hessian).
    """

    surface: Surface
    value_fn: ScalarField
    gradient_fn: Optional[GradientField] = None
    hessian_fn: Optional[GradientField] = None
    normalization: Normalization = Normalization.NONE
    name: str = "custom"
    params: dict = field(default_factory=dict)
    slope: Optional[float] = None
    r0: Optional[float] = None
    # optional closed-form flow (t0, t1, points) -> (endpoints, jacobians)
    exact_flow: Optional[Callable] = None

    # -- evaluation -------------------------------------------------------
    def value(self, t, p) -> np.ndarray:
        p = _as_points(p)
        v = np.asarray(self.value_fn(reduce_time(np.asarray(t, dtype=float)), p[..., 0], p[..., 1]), dtype=float)
        return np.broadcast_to(v, np.broadcast_shapes(np.shape(t), p.shape[:-1])).copy()

    def __call__(self, t, p) -> np.ndarray:
        return self.value(t, p)

    def gradient(self, t, p) -> np.ndarray:
        p = _as_points(p)
        t = reduce_time(np.asarray(t, dtype=float))
        x, y = p[..., 0], p[..., 1]
        if self.gradient_fn is not None:
            gx, gy = self.gradient_fn(t, x, y)
        else:
            f, h = self.value_fn, H_GRAD
            gx = (-f(t, x + 2 * h, y) + 8 * f(t, x + h, y) - 8 * f(t, x - h, y) + f(t, x - 2 * h, y)) / (12 * h)
            gy = (-f(t, x, y + 2 * h) + 8 * f(t, x, y + h) - 8 * f(t, x, y - h) + f(t, x, y - 2 * h)) / (12 * h)
        shape = x.shape if np.ndim(t) == 0 else np.broadcast_shapes(np.shape(t), x.shape)
        g = np.empty(shape + (2,))
        g[..., 0] = gx
        g[..., 1] = gy
        if not np.isfinite(g).all():
            raise NumericDomainError(f"non-finite gradient of {self.name}")
        return g

    def hessian(self, t, p) -> np.ndarray:
        p = _as_points(p)
        if self.hessian_fn is not None:
            tt = reduce_time(np.asarray(t, dtype=float))
            hxx, hxy, hyy = self.hessian_fn(tt, p[..., 0], p[..., 1])
            shape = np.broadcast_shapes(np.shape(tt), p.shape[:-1])
            hxx, hxy, hyy = (np.broadcast_to(a, shape) for a in (hxx, hxy, hyy))
        else:
            h = H_HESS
            ex = np.array([h, 0.0])
            ey = np.array([0.0, h])
            dgx = (self.gradient(t, p + ex) - self.gradient(t, p - ex)) / (2 * h)
            dgy = (self.gradient(t, p + ey) - self.gradient(t, p - ey)) / (2 * h)
            hxx, hyy = dgx[..., 0], dgy[..., 1]
            hxy = 0.5 * (dgx[..., 1] + dgy[..., 0])
        out = np.empty(np.shape(hxx) + (2, 2))
        out[..., 0, 0] = hxx
        out[..., 0, 1] = hxy
        out[..., 1, 0] = hxy
        out[..., 1, 1] = hyy
        if not np.all(np.isfinite(out)):
            raise NumericDomainError(f"non-finite Hessian of {self.name}")
        return out

    def vector_field(self, t, p) -> np.ndarray:
        g = self.gradient(t, p)
        return np.stack([g[..., 1], -g[..., 0]], axis=-1)

    def vector_field_jacobian(self, t, p) -> np.ndarray:
        """``D X_H = J Hess H`` with ``J = [[0, 1], [-1, 0]]``."""
        hs = self.hessian(t, p)
        out = np.empty_like(hs)
        out[..., 0, :] = hs[..., 1, :]
        out[..., 1, :] = -hs[..., 0, :]
        return out

    # -- flow -------------------------------------------------------------
    def flow(self, p0, t0: float, t1: float, step: float, *, jacobian: bool = False,
             record: bool = False) -> "FlowResult":
        """Flow a batch of points from ``t0`` to ``t1`` with implicit midpoint."""
        return implicit_midpoint(self, p0, t0, t1, step, jacobian=jacobian, record=record)


@dataclass
class FlowResult:
    times: np.ndarray
    end: np.ndarray                      # (..., 2) lifted endpoint
    jacobian: Optional[np.ndarray]       # (..., 2, 2) or None
    path: Optional[np.ndarray] = None    # (M, ..., 2) lifted samples when recorded


def time_grid(t0: float, t1: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ValueError("step must be positive")
    span = t1 - t0
    n = max(1, int(math.ceil(abs(span) / step - 1e-9)))
    times = t0 + math.copysign(step, span) * np.arange(n + 1)
    times[-1] = t1
    return times


def _cayley(h: float, A: np.ndarray) -> np.ndarray:
    """``(I - hA/2)^{-1} (I + hA/2)`` for a batch of 2x2 matrices."""
    a, b, c, d = A[..., 0, 0], A[..., 0, 1], A[..., 1, 0], A[..., 1, 1]
    k = 0.5 * h
    # inverse of [[1 - k a, -k b], [-k c, 1 - k d]]
    det = (1 - k * a) * (1 - k * d) - k * k * b * c
    inv = np.empty_like(A)
    inv[..., 0, 0] = (1 - k * d) / det
    inv[..., 0, 1] = k * b / det
    inv[..., 1, 0] = k * c / det
    inv[..., 1, 1] = (1 - k * a) / det
    plus = np.empty_like(A)
    plus[..., 0, 0] = 1 + k * a
    plus[..., 0, 1] = k * b
    plus[..., 1, 0] = k * c
    plus[..., 1, 1] = 1 + k * d
    return inv @ plus


def midpoint_step(H: TimePeriodicHamiltonian, z: np.ndarray, t: float, h: float, *,
                  tol: float = TOL_INNER, max_iter: int = MAX_INNER) -> np.ndarray:
    """One implicit midpoint step ``z+ = z + h X(t + h/2, (z + z+)/2)``.

    Fixed-point sweeps first; Newton on ``I - h/2 DX`` if they stall.
    """
    tm = t + 0.5 * h
    z_new = z + h * H.vector_field(tm, z)
    scale = 1.0 + np.abs(z)
    res = np.inf
    for _ in range(max_iter):
        z_next = z + h * H.vector_field(tm, 0.5 * (z + z_new))
        res = float(np.max(np.abs(z_next - z_new) / scale)) if z.size else 0.0
        z_new = z_next
        if res <= tol:
            return z_new
    for _ in range(max_iter):
        zm = 0.5 * (z + z_new)
        F = z_new - z - h * H.vector_field(tm, zm)
        J = np.eye(2) - 0.5 * h * H.vector_field_jacobian(tm, zm)
        z_new = z_new - np.linalg.solve(J, F[..., None])[..., 0]
        res = float(np.max(np.abs(F) / scale))
        if res <= tol:
            return z_new
    raise IntegratorError(float(t), res)


def implicit_midpoint(H: TimePeriodicHamiltonian, p0, t0: float, t1: float, step: float, *,
                      jacobian: bool = False, record: bool = False,
                      tol: float = TOL_INNER, max_iter: int = MAX_INNER) -> FlowResult:
    """Integrate a batch of points with the implicit midpoint rule.

    The Jacobian of the discrete map is propagated alongside as the Cayley
    transform of ``h DX`` at the converged midpoint, which is exactly the
    derivative of the numerical map (and has determinant 1 because
    ``DX`` is trace free).
    """
    z = np.array(_as_points(p0), dtype=float)
    times = time_grid(t0, t1, step)
    M = np.broadcast_to(np.eye(2), z.shape[:-1] + (2, 2)).copy() if jacobian else None
    path = [z.copy()] if record else None
    for k in range(len(times) - 1):
        h = times[k + 1] - times[k]
        z_new = midpoint_step(H, z, times[k], h, tol=tol, max_iter=max_iter)
        if jacobian:
            A = H.vector_field_jacobian(times[k] + 0.5 * h, 0.5 * (z + z_new))
            M = _cayley(h, A) @ M
        z = z_new
        if record:
            path.append(z.copy())
    return FlowResult(times, z, M, np.array(path) if record else None)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    lifts: np.ndarray      # (M, 2) unwrapped coordinates
    surface: Surface
    step: float

    @property
    def points(self) -> np.ndarray:
        if self.surface is Surface.TORUS:
            return reduce_torus(self.lifts)
        return self.lifts

    def __len__(self) -> int:
        return len(self.times)

    def csv_rows(self):
        pts = self.points
        for t, p, q in zip(self.times, pts, self.lifts):
            yield (float(t), float(p[0]), float(p[1]), float(q[0]), float(q[1]))


def hamiltonian_vector_field(H: TimePeriodicHamiltonian, t: float, p) -> np.ndarray:
    pts = _as_points(p)
    check_on_surface(H.surface, pts)
    return H.vector_field(t, pts)


def integrate_flow(H: TimePeriodicHamiltonian, p0, t0: float, t1: float, step: float) -> Trajectory:
    """Sampled trajectory of a single point under the implicit midpoint rule."""
    z0 = _as_points(p0)
    if z0.shape != (2,):
        raise ValueError("integrate_flow takes a single point; use H.flow for batches")
    check_on_surface(H.surface, z0)
    if t1 == t0:
        raise ValueError("empty time interval")
    res = implicit_midpoint(H, z0, t0, t1, step, record=True)
    return Trajectory(res.times, res.path, H.surface, step)


# -- Hofer norm -----------------------------------------------------------

@dataclass(frozen=True)
class HoferEstimate:
    value: float
    t_grid: int
    space_grid: int
    oscillation: np.ndarray = field(repr=False)   # max - min at each time sample

    def __float__(self) -> float:
        return self.value


def surface_grid(surface: Surface, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Square sample grid; returns (xs, ys, mask) with mask marking in-domain nodes."""
    if surface is Surface.DISK:
        xs = np.linspace(-1.0, 1.0, n)
        X, Y = np.meshgrid(xs, xs, indexing="ij")
        return xs, xs, X * X + Y * Y <= 1.0
    xs = np.arange(n) / n
    return xs, xs, np.ones((n, n), dtype=bool)


def _refine_extremum(F, t, surface, xs, ys, vals, mask, idx, sign):
    """One parabolic refinement step around a grid extremum (per axis)."""
    i, j = idx
    best = sign * vals[i, j]
    n = len(xs)
    cand = []
    for axis in (0, 1):
        lo = (i - 1, j) if axis == 0 else (i, j - 1)
        hi = (i + 1, j) if axis == 0 else (i, j + 1)
        if surface is Surface.TORUS:
            lo, hi = (lo[0] % n, lo[1] % n), (hi[0] % n, hi[1] % n)
        elif min(lo) < 0 or max(hi) >= n or not (mask[lo] and mask[hi]):
            continue
        f0, fm, fp = vals[i, j], vals[lo], vals[hi]
        denom = fm - 2 * f0 + fp
        if denom == 0:
            continue
        s = 0.5 * (fm - fp) / denom
        if abs(s) > 1:
            continue
        dx = xs[1] - xs[0]
        p = np.array([xs[i], ys[j]])
        p[axis] += s * dx
        if surface is Surface.DISK and p @ p > 1.0:
            continue
        cand.append(p)
    if cand:
        more = sign * F.value(t, np.array(cand))
        best = max(best, float(np.max(more)))
    return sign * best


def hofer_norm(F: TimePeriodicHamiltonian, t_grid: int = 256, space_grid: int = 65) -> HoferEstimate:
    """Quadrature of ``int_0^1 (max F_t - min F_t) dt``.

    Extrema come from a grid scan plus one parabolic refinement per axis, so
    each oscillation is a lower estimate of the true one.  The time integral
    uses the periodic rectangle rule on ``t_grid`` nodes.
    """
    if t_grid < 2 or space_grid < 2:
        raise ValueError("grids need at least two samples")
    xs, ys, mask = surface_grid(F.surface, space_grid)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X, Y], axis=-1)
    osc = np.empty(t_grid)
    for k in range(t_grid):
        t = k / t_grid
        vals = F.value(t, pts)
        if not np.all(np.isfinite(vals[mask])):
            raise NumericDomainError("non-finite value in Hofer quadrature")
        masked_hi = np.where(mask, vals, -np.inf)
        masked_lo = np.where(mask, vals, np.inf)
        imax = np.unravel_index(np.argmax(masked_hi), vals.shape)
        imin = np.unravel_index(np.argmin(masked_lo), vals.shape)
        vmax = _refine_extremum(F, t, F.surface, xs, ys, vals, mask, imax, 1.0)
        vmin = _refine_extremum(F, t, F.surface, xs, ys, vals, mask, imin, -1.0)
        osc[k] = vmax - vmin
    return HoferEstimate(float(np.mean(osc)), t_grid, space_grid, osc)


# -- constructors -----------------------------------------------------------

def make_admissible_disk_hamiltonian(c: float, interior: ScalarField, r0: float, *,
                                     interior_gradient: Optional[GradientField] = None,
                                     interior_hessian: Optional[GradientField] = None,
                                     tol: float = 1e-8, name: str = "admissible",
                                     params: Optional[dict] = None) -> TimePeriodicHamiltonian:
    """Disk Hamiltonian equal to ``c (r^2 - 1) / 2`` for ``r >= r0``.

    ``interior`` must agree with the boundary profile to first order on the
    gluing circle; this is checked on 64 ring samples at a few times.
    """
    if not 0 < r0 < 1:
        raise ConstructionError("need 0 < r0 < 1")

    def outer(t, x, y):
        return 0.5 * c * (x * x + y * y - 1.0)

    inner_H = TimePeriodicHamiltonian(Surface.DISK, interior, interior_gradient, interior_hessian)
    theta = 2 * np.pi * np.arange(64) / 64
    ring = r0 * np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    for t in (0.0, 0.25, 0.5, 0.75):
        dv = np.max(np.abs(inner_H.value(t, ring) - outer(t, ring[:, 0], ring[:, 1])))
        dg = np.max(np.abs(inner_H.gradient(t, ring) - c * ring))
        if dv > tol or dg > max(tol, 1e-7 if interior_gradient is None else tol):
            raise ConstructionError(f"interior does not match slope-{c} profile at r0={r0} "
                                    f"(value gap {dv:.2e}, gradient gap {dg:.2e})")
    r0sq = r0 * r0

    def value(t, x, y):
        r2 = x * x + y * y
        return np.where(r2 >= r0sq, 0.5 * c * (r2 - 1.0), interior(t, x, y))

    def gradient(t, x, y):
        if interior_gradient is not None:
            gx, gy = interior_gradient(t, x, y)
        else:
            x, y = np.broadcast_arrays(x, y)
            g = inner_H.gradient(t, np.stack([x, y], axis=-1))
            gx, gy = g[..., 0], g[..., 1]
        out = x * x + y * y >= r0sq
        return np.where(out, c * x, gx), np.where(out, c * y, gy)

    def hessian(t, x, y):
        x, y = np.broadcast_arrays(x, y)
        hs = inner_H.hessian(t, np.stack([x, y], axis=-1))
        out = x * x + y * y >= r0sq
        return (np.where(out, c, hs[..., 0, 0]), np.where(out, 0.0, hs[..., 0, 1]),
                np.where(out, c, hs[..., 1, 1]))

    return TimePeriodicHamiltonian(Surface.DISK, value, gradient, hessian, Normalization.ADMISSIBLE,
                                   name, dict(params or {}, c=c, r0=r0), slope=c, r0=r0)
