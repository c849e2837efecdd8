"""Named Hamiltonian presets used by scenarios and tests."""

from __future__ import annotations

import math

import numpy as np

from .hamiltonian import (
    Normalization,
    Surface,
    TimePeriodicHamiltonian,
    make_admissible_disk_hamiltonian,
)

TWO_PI = 2.0 * math.pi


def zero(surface: Surface = Surface.DISK) -> TimePeriodicHamiltonian:
    return constant(0.0, surface)


def constant(value: float, surface: Surface = Surface.DISK) -> TimePeriodicHamiltonian:
    return TimePeriodicHamiltonian(
        surface,
        lambda t, x, y: np.full(np.broadcast_shapes(np.shape(t), np.shape(x)), value),
        lambda t, x, y: (np.zeros_like(x), np.zeros_like(y)),
        lambda t, x, y: (np.zeros_like(x), np.zeros_like(x), np.zeros_like(x)),
        name="constant", params={"value": value},
    )


def rotation(c: float = TWO_PI, *, admissible: bool = False) -> TimePeriodicHamiltonian:
    """``c r^2 / 2`` (or ``c (r^2 - 1) / 2``): clockwise rigid rotation at speed ``c``."""
    shift = 1.0 if admissible else 0.0
    return TimePeriodicHamiltonian(
        Surface.DISK,
        lambda t, x, y: 0.5 * c * (x * x + y * y - shift),
        lambda t, x, y: (c * x, c * y),
        lambda t, x, y: (np.full_like(x, c), np.zeros_like(x), np.full_like(x, c)),
        Normalization.ADMISSIBLE if admissible else Normalization.NONE,
        name="rotation", params={"c": c, "admissible": admissible},
        slope=c, r0=0.5 if admissible else None, exact_flow=_rotation_flow(c),
    )


def _rotation_flow(c: float):
    def flow(t0, t1, p):
        a = -c * (np.asarray(t1, dtype=float) - np.asarray(t0, dtype=float))
        ca, sa = np.cos(a), np.sin(a)
        p = np.asarray(p, dtype=float)
        end = np.stack([ca * p[..., 0] - sa * p[..., 1], sa * p[..., 0] + ca * p[..., 1]], axis=-1)
        jac = np.empty(end.shape[:-1] + (2, 2))
        jac[..., 0, 0] = ca
        jac[..., 0, 1] = -sa
        jac[..., 1, 0] = sa
        jac[..., 1, 1] = ca
        return end, jac
    return flow


def shear(amplitude: float = 1.0) -> TimePeriodicHamiltonian:
    """Torus shear ``a cos(2 pi y) / (2 pi)``: horizontal drift ``-a sin(2 pi y)``."""
    a = amplitude
    return TimePeriodicHamiltonian(
        Surface.TORUS,
        lambda t, x, y: a * np.cos(TWO_PI * y) / TWO_PI + 0 * x,
        lambda t, x, y: (np.zeros_like(x + y), -a * np.sin(TWO_PI * y) + 0 * x),
        lambda t, x, y: (np.zeros_like(x + y), np.zeros_like(x + y), -TWO_PI * a * np.cos(TWO_PI * y) + 0 * x),
        Normalization.ZERO_MEAN, name="shear", params={"amplitude": a},
    )


def pendulum() -> TimePeriodicHamiltonian:
    """``y^2/2 + (cos(2 pi x) - 1)/(2 pi)^2``, evaluated on the lift in ``y``."""
    k = 1.0 / TWO_PI ** 2
    return TimePeriodicHamiltonian(
        Surface.TORUS,
        lambda t, x, y: 0.5 * y * y + k * (np.cos(TWO_PI * x) - 1.0),
        lambda t, x, y: (-np.sin(TWO_PI * x) / TWO_PI + 0 * y, y + 0 * x),
        lambda t, x, y: (-np.cos(TWO_PI * x) + 0 * y, np.zeros_like(x + y), np.ones_like(x + y)),
        name="pendulum",
    )


def forced_pendulum(forcing: float = 0.2) -> TimePeriodicHamiltonian:
    """Pendulum with a travelling-wave forcing ``f cos(2 pi (x - t)) / (2 pi)^2``."""
    k = 1.0 / TWO_PI ** 2
    f = forcing

    def value(t, x, y):
        return 0.5 * y * y + k * (np.cos(TWO_PI * x) - 1.0) + f * k * np.cos(TWO_PI * (x - t))

    def gradient(t, x, y):
        gx = -np.sin(TWO_PI * x) / TWO_PI - f * np.sin(TWO_PI * (x - t)) / TWO_PI
        return gx + 0 * y, y + 0 * x

    def hessian(t, x, y):
        hxx = -np.cos(TWO_PI * x) - f * np.cos(TWO_PI * (x - t))
        return hxx + 0 * y, np.zeros_like(hxx + y), np.ones_like(hxx + y)

    return TimePeriodicHamiltonian(Surface.TORUS, value, gradient, hessian,
                                   name="forced-pendulum", params={"forcing": f})


def bump(center=(0.3, 0.0), radius: float = 0.2, amplitude: float = 1.0,
         profile: str = "pulse") -> TimePeriodicHamiltonian:
    """Compactly supported disk bump ``a chi(t) (1 - s^2)^4``, ``s = |p - center| / radius``.

    ``profile`` selects the time factor ``chi``: ``"const"`` (1), ``"pulse"``
    (``2 sin^2(pi t)``, mean 1, vanishing at integer times) or ``"sine"``
    (``sin(2 pi t)``).
    """
    cx, cy = center
    rho2 = radius * radius
    if math.hypot(cx, cy) + radius >= 1.0:
        raise ValueError("bump support must stay inside the open disk")
    chi, _ = _time_profile(profile)

    def value(t, x, y):
        q = 1.0 - ((x - cx) ** 2 + (y - cy) ** 2) / rho2
        return amplitude * chi(t) * np.where(q > 0, q, 0.0) ** 4

    def gradient(t, x, y):
        q = 1.0 - ((x - cx) ** 2 + (y - cy) ** 2) / rho2
        w = amplitude * chi(t) * -8.0 * np.where(q > 0, q, 0.0) ** 3 / rho2
        return w * (x - cx), w * (y - cy)

    def hessian(t, x, y):
        q = 1.0 - ((x - cx) ** 2 + (y - cy) ** 2) / rho2
        qp = np.where(q > 0, q, 0.0)
        a = amplitude * chi(t)
        dx, dy = x - cx, y - cy
        base = -8.0 * qp ** 3 / rho2
        curv = 48.0 * qp ** 2 / (rho2 * rho2)
        return a * (base + curv * dx * dx), a * curv * dx * dy, a * (base + curv * dy * dy)

    return TimePeriodicHamiltonian(Surface.DISK, value, gradient, hessian, Normalization.COMPACT_SUPPORT,
                                   name="bump", params={"center": [cx, cy], "radius": radius,
                                                        "amplitude": amplitude, "profile": profile})


def _time_profile(name: str):
    if name == "const":
        return (lambda t: np.ones_like(np.asarray(t, dtype=float))), 1.0
    if name == "pulse":
        return (lambda t: 2.0 * np.sin(math.pi * np.asarray(t)) ** 2), 1.0
    if name == "sine":
        return (lambda t: np.sin(TWO_PI * np.asarray(t))), 2.0 / math.pi
    raise ValueError(f"unknown time profile {name!r}")


def _smootherstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u ** 3 * (u * (6 * u - 15) + 10)


def _smootherstep_second(u):
    inside = (u > 0) & (u < 1)
    return np.where(inside, 60.0 * u * (u - 1.0) * (2.0 * u - 1.0), 0.0)


def _smootherstep_prime(u):
    inside = (u > 0) & (u < 1)
    u = np.clip(u, 0.0, 1.0)
    return np.where(inside, 30 * u * u * (u - 1) ** 2, 0.0)


def resonant_twist(c: float = 1.0, b: float = 7.2, r0: float = 0.8, kick: float = 0.05,
                   cutoff=(0.62, 0.75)) -> TimePeriodicHamiltonian:
    """Admissible twist map with a 3-fold resonant kick.

    Radial part ``G(r^2)`` with clockwise angular speed ``c + b (r0^2 - r^2)^2``
    inside ``r0`` and slope ``c`` outside.  The kick
    ``kick * 2 sin^2(pi t) * psi(r) * Re(z^3)`` is cut off smoothly between the
    two ``cutoff`` radii, so the Hamiltonian is admissible near the boundary.
    """
    s0 = r0 * r0
    r1, r2 = cutoff
    if not r2 < r0:
        raise ValueError("kick cutoff must lie inside r0")

    def radial(s):
        d = np.where(s < s0, s0 - s, 0.0)
        return 0.5 * c * (s - 1.0) - (b / 6.0) * d ** 3

    def radial_prime(s):
        d = np.where(s < s0, s0 - s, 0.0)
        return 0.5 * c + 0.5 * b * d ** 2

    def value(t, x, y):
        s = x * x + y * y
        r = np.sqrt(s)
        psi = 1.0 - _smootherstep((r - r1) / (r2 - r1))
        chi = 2.0 * np.sin(math.pi * t) ** 2
        return radial(s) + kick * chi * psi * (x ** 3 - 3 * x * y * y)

    def gradient(t, x, y):
        s = x * x + y * y
        r = np.sqrt(s)
        psi = 1.0 - _smootherstep((r - r1) / (r2 - r1))
        dpsi = -_smootherstep_prime((r - r1) / (r2 - r1)) / (r2 - r1)
        rr = np.where(r > 0, r, 1.0)
        chi = 2.0 * np.sin(math.pi * t) ** 2
        cube = x ** 3 - 3 * x * y * y
        gp = 2.0 * radial_prime(s)
        gx = gp * x + kick * chi * (psi * (3 * x * x - 3 * y * y) + dpsi * cube * x / rr)
        gy = gp * y + kick * chi * (psi * (-6 * x * y) + dpsi * cube * y / rr)
        return gx, gy

    def hessian(t, x, y):
        s = x * x + y * y
        r = np.sqrt(s)
        w = r2 - r1
        u = (r - r1) / w
        psi = 1.0 - _smootherstep(u)
        dpsi = -_smootherstep_prime(u) / w
        ddpsi = -_smootherstep_second(u) / (w * w)
        rr = np.where(r > 0, r, 1.0)
        chi = 2.0 * np.sin(math.pi * t) ** 2
        d = np.where(s < s0, s0 - s, 0.0)
        g1 = 2.0 * radial_prime(s)
        g2 = 4.0 * (-b * d)
        cube = x ** 3 - 3 * x * y * y
        cx, cy = 3 * x * x - 3 * y * y, -6 * x * y
        px, py = dpsi * x / rr, dpsi * y / rr
        a, bb = ddpsi / (rr * rr) - dpsi / rr ** 3, dpsi / rr
        hxx = g1 + g2 * x * x + kick * chi * (psi * 6 * x + 2 * px * cx + cube * (a * x * x + bb))
        hxy = g2 * x * y + kick * chi * (psi * -6 * y + px * cy + py * cx + cube * a * x * y)
        hyy = g1 + g2 * y * y + kick * chi * (psi * -6 * x + 2 * py * cy + cube * (a * y * y + bb))
        return hxx, hxy, hyy

    return make_admissible_disk_hamiltonian(c, value, r0, interior_gradient=gradient,
                                            interior_hessian=hessian,
                                            name="resonant-twist",
                                            params={"b": b, "kick": kick, "cutoff": list(cutoff)})


def bump_perturbed(c: float = 1.0, center=(0.35, 0.2), radius: float = 0.25,
                   amplitude: float = 0.05) -> TimePeriodicHamiltonian:
    """Admissible rotation plus an off-centre bump, as a single Hamiltonian."""
    rot = rotation(c, admissible=True)
    B = bump(center, radius, amplitude, "pulse")

    def value(t, x, y):
        return rot.value_fn(t, x, y) + B.value_fn(t, x, y)

    def gradient(t, x, y):
        ax, ay = rot.gradient_fn(t, x, y)
        bx, by = B.gradient_fn(t, x, y)
        return ax + bx, ay + by

    def hessian(t, x, y):
        return tuple(a + b for a, b in zip(rot.hessian_fn(t, x, y), B.hessian_fn(t, x, y)))

    return TimePeriodicHamiltonian(Surface.DISK, value, gradient, hessian, Normalization.ADMISSIBLE,
                                   name="bump-perturbed",
                                   params={"c": c, "center": list(center), "radius": radius,
                                           "amplitude": amplitude}, slope=c)


PRESETS = {
    "zero": lambda surface="disk": zero(Surface(surface)),
    "rotation": rotation,
    "shear": shear,
    "pendulum": pendulum,
    "forced-pendulum": forced_pendulum,
    "bump": bump,
    "bump-perturbed": bump_perturbed,
    "resonant-twist": resonant_twist,
}


def from_config(name: str, **params) -> TimePeriodicHamiltonian:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown Hamiltonian preset {name!r}; known: {sorted(PRESETS)}") from None
    return factory(**params)
