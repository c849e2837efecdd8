"""Hofer-small perturbations, k-th power Hamiltonians and braid persistence runs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .braidword import BraidWord
from .entropy import gamma_estimate
from .extract import CollisionError, GenericityError, braid_word_with_retry, suspend_orbits
from .garside import Verdict, are_conjugate
from .hamiltonian import (
    FlowResult,
    Surface,
    TimePeriodicHamiltonian,
    Trajectory,
    _as_points,
    hofer_norm,
    implicit_midpoint,
    midpoint_step,
)
from .orbits import (
    TOL_ACTION,
    PeriodicOrbit,
    _dedupe,
    action_gaps_and_isolation,
    build_orbits,
    find_periodic_points,
    newton_refine,
    orbit_action,
)
from .presets import bump, from_config

H_BACK = 1.0 / 128     # nominal step of the backward RK4 pass used for pointwise evaluation


# -- k-th power ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class KthPowerHamiltonian(TimePeriodicHamiltonian):
    """``K(t, p) = k G(kt mod 1, p)``; its time-1 map is the k-th power of G's."""

    base: Optional[TimePeriodicHamiltonian] = None
    k: int = 1

    def flow(self, p0, t0, t1, step, *, jacobian=False, record=False) -> FlowResult:
        # the reparametrized flow is the base flow at k-fold speed
        res = self.base.flow(p0, self.k * t0, self.k * t1, self.k * step, jacobian=jacobian, record=record)
        return FlowResult(res.times / self.k, res.end, res.jacobian, res.path)


def kth_power_hamiltonian(G: TimePeriodicHamiltonian, k: int) -> TimePeriodicHamiltonian:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return G

    def value(t, x, y):
        return k * G.value_fn((k * t) % 1.0, x, y)

    def gradient(t, x, y):
        x, y = np.broadcast_arrays(x, y)
        g = G.gradient((k * np.asarray(t)) % 1.0, np.stack([x, y], axis=-1))
        return k * g[..., 0], k * g[..., 1]

    def hessian(t, x, y):
        x, y = np.broadcast_arrays(x, y)
        hs = G.hessian((k * np.asarray(t)) % 1.0, np.stack([x, y], axis=-1))
        return k * hs[..., 0, 0], k * hs[..., 0, 1], k * hs[..., 1, 1]

    exact = None
    if G.exact_flow is not None:
        def exact(t0, t1, p):
            return G.exact_flow(k * np.asarray(t0), k * np.asarray(t1), p)

    return KthPowerHamiltonian(G.surface, value, gradient, hessian, G.normalization,
                               f"{G.name}^{k}", dict(G.params, power=k),
                               None if G.slope is None else k * G.slope, G.r0, exact, base=G, k=k)


# -- composition H_+ # F ----------------------------------------------------------

def _rk4_backward(H: TimePeriodicHamiltonian, t: np.ndarray, p: np.ndarray, h_back: float,
                  variational: bool):
    """Flow of ``H`` from time ``t`` back to 0, per point, with RK4.

    Every point takes the same number of steps, of size ``t_i / n``, so the
    batch stays in lockstep.  Returns the endpoints and (optionally) the
    Jacobians of the backward map.
    """
    t = np.broadcast_to(np.asarray(t, dtype=float), p.shape[:-1])
    n = max(1, int(math.ceil(float(np.max(t, initial=0.0)) / h_back)))
    dt = -(t / n)[..., None]
    z = p.copy()
    M = None
    if variational:
        M = np.broadcast_to(np.eye(2), p.shape[:-1] + (2, 2)).copy()
    s = t.copy()
    dtm = dt[..., 0]

    def rhs(s_, z_, M_):
        X = H.vector_field(s_, z_)
        if M_ is None:
            return X, None
        return X, H.vector_field_jacobian(s_, z_) @ M_

    for _ in range(n):
        k1, m1 = rhs(s, z, M)
        k2, m2 = rhs(s + 0.5 * dtm, z + 0.5 * dt * k1, None if M is None else M + 0.5 * dt[..., None] * m1)
        k3, m3 = rhs(s + 0.5 * dtm, z + 0.5 * dt * k2, None if M is None else M + 0.5 * dt[..., None] * m2)
        k4, m4 = rhs(s + dtm, z + dt * k3, None if M is None else M + dt[..., None] * m3)
        z = z + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if M is not None:
            M = M + dt[..., None] / 6.0 * (m1 + 2 * m2 + 2 * m3 + m4)
        s = s + dtm
    return z, M


def inverse_flow(H: TimePeriodicHamiltonian, t, p, *, h_back: float = H_BACK, jacobian: bool = False):
    """``(phi_H^t)^{-1}(p)`` for ``t`` in [0, 1), with its Jacobian if requested."""
    p = _as_points(p)
    if H.exact_flow is not None:
        end, jac = H.exact_flow(np.asarray(t, dtype=float), 0.0, p)
        return end, (jac if jacobian else None)
    return _rk4_backward(H, np.asarray(t, dtype=float), p, h_back, jacobian)


@dataclass(frozen=True, eq=False)
class PerturbedHamiltonian(TimePeriodicHamiltonian):
    """``H(t, p) = H_+(t, p) + F_t((phi_+^t)^{-1}(p))``, generating ``phi_+^t o phi_F^t``.

    Pointwise evaluation integrates the base flow backwards (RK4 with
    variational equations for the gradient).  ``flow`` from an integer start
    time uses the factorization instead, which is exact for the composed
    Hamiltonian and far cheaper.
    """

    base: Optional[TimePeriodicHamiltonian] = None
    perturbation: Optional[TimePeriodicHamiltonian] = None
    h_back: float = H_BACK

    def flow(self, p0, t0, t1, step, *, jacobian=False, record=False) -> FlowResult:
        if t1 < t0 or abs(t0 - round(t0)) > 1e-12:
            return implicit_midpoint(self, p0, t0, t1, step, jacobian=jacobian, record=record)
        z = np.array(_as_points(p0), dtype=float)
        span = t1 - t0
        full = int(math.floor(span + 1e-12))
        segments = [1.0] * full
        rest = span - full
        if rest > 1e-12:
            segments.append(rest)
        M = np.broadcast_to(np.eye(2), z.shape[:-1] + (2, 2)).copy() if jacobian else None
        times = [np.array([float(t0)])]
        path = [z[None].copy()] if record else None
        start = float(t0)
        z_rec = z.copy()
        for s in segments:
            zF = self.perturbation.flow(z, 0.0, s, step, jacobian=jacobian)
            zH = self.base.flow(zF.end, 0.0, s, step, jacobian=jacobian)
            if jacobian:
                M = zH.jacobian @ (zF.jacobian @ M)
            if record:
                grid, seg_path = self._diagonal(z_rec, s, step)
                times.append(start + grid[1:])
                path.append(seg_path[1:])
                z_rec = seg_path[-1]
            z = zH.end
            start += s
        if record:
            # the recorded path and the direct endpoint agree to rounding
            path = np.concatenate(path, axis=0)
        return FlowResult(np.concatenate(times), z, M, path)

    def _diagonal(self, z0: np.ndarray, s_end: float, step: float):
        """Samples of ``phi_+^s(phi_F^s(z0))`` on the step grid of ``[0, s_end]``.

        The perturbation path is recorded once; then all its samples are
        pushed through the base flow together, sample ``j`` retiring after
        ``j`` steps so that every output point used the same step grid as
        a direct call would.
        """
        u = self.perturbation.flow(z0, 0.0, s_end, step, record=True)
        grid = u.times
        pts = u.path                       # (M, ..., 2)
        out = np.empty_like(pts)
        out[0] = pts[0]
        active = pts.copy()
        for i in range(len(grid) - 1):
            h = grid[i + 1] - grid[i]
            active[i + 1:] = midpoint_step(self.base, active[i + 1:], grid[i], h)
            out[i + 1] = active[i + 1]
        return grid, out


def compose_perturbed_hamiltonian(H_plus: TimePeriodicHamiltonian, F: TimePeriodicHamiltonian, *,
                                  h_back: float = H_BACK) -> TimePeriodicHamiltonian:
    """Hamiltonian whose flow is ``phi_+^t o phi_F^t`` (time-1 map ``phi_+ o phi_F``)."""
    if F.surface is not H_plus.surface:
        raise ValueError("perturbation lives on a different surface")

    def value(t, x, y):
        x, y = np.broadcast_arrays(x, y)
        p = np.stack([x, y], axis=-1)
        q, _ = inverse_flow(H_plus, t, p, h_back=h_back)
        return H_plus.value_fn(t, x, y) + F.value(t, q)

    def gradient(t, x, y):
        x, y = np.broadcast_arrays(x, y)
        p = np.stack([x, y], axis=-1)
        q, D = inverse_flow(H_plus, t, p, h_back=h_back, jacobian=True)
        gF = F.gradient(t, q)
        g = H_plus.gradient(t, p) + np.einsum("...ji,...j->...i", D, gF)
        return g[..., 0], g[..., 1]

    return PerturbedHamiltonian(H_plus.surface, value, gradient, None, H_plus.normalization,
                                f"{H_plus.name}#{F.name}", {"base": H_plus.params, "perturbation": F.params},
                                H_plus.slope, H_plus.r0, None, base=H_plus, perturbation=F, h_back=h_back)


# -- persistence experiment ---------------------------------------------------------

CAVEAT = ("isolation quantifies over all orbits; the found set is plausibly complete "
          "for this preset but completeness is not certified")
ACTION_TOL = 1e-4      # quadrature slack on action windows and drift


@dataclass(frozen=True)
class PerturbationSpec:
    """``amplitude * profile`` with its Hofer norm ``epsilon`` (quadrature estimate)."""

    profile: TimePeriodicHamiltonian
    amplitude: float
    epsilon: float

    @classmethod
    def build(cls, profile_factory, amplitude: float, t_grid: int = 64, space_grid: int = 129) -> "PerturbationSpec":
        F = profile_factory(amplitude)
        return cls(F, float(amplitude), float(hofer_norm(F, t_grid, space_grid)) if amplitude else 0.0)


@dataclass
class StabilityConfig:
    hamiltonian: str = "resonant-twist"
    hamiltonian_params: dict = field(default_factory=dict)
    k: int = 3
    grid: int = 20
    step: float = 2e-3              # base step; the k-th power uses step / k
    coarse_step: Optional[float] = 8e-3   # base step of the grid pre-solve
    target_period: int = 3
    target_kind: str = "hyperbolic"
    bump_center: tuple = (0.4, 0.1)
    bump_radius: float = 0.25
    bump_profile: str = "pulse"
    amplitudes: tuple = (0.0, 5e-6, 1e-5, 2e-5, 3e-5, 1e-4, 1e-3, 5e-3, 1e-2, 3e-2)
    isolation_factor: float = 100.0
    epsilon: Optional[float] = None  # isolation scale; default min gap / isolation_factor
    require_nonzero_action: bool = False
    perturbed_grid: int = 0          # extra seed grid for the perturbed search (0: continuation only)
    entropy_iterations: int = 12
    conjugacy_budget: int = 200_000
    samples_per_period: int = 256
    projection_angle: float = 0.05


@dataclass
class AmplitudeRow:
    amplitude: float
    hofer: float                    # Hofer norm of the perturbation at the k-th power level
    hypothesis_met: bool
    found: int
    matched_window: int
    matched_continuation: int
    discrepancies: list
    max_action_drift: float
    word_k: str
    word_h: str
    verdict_k: str
    verdict_h: str
    verdict: str
    gamma_h: float
    gamma_k: float
    status: str
    orbits: list = field(default_factory=list)

    def csv_row(self) -> dict:
        return {k: getattr(self, k) for k in (
            "amplitude", "hofer", "hypothesis_met", "found", "matched_window", "matched_continuation",
            "max_action_drift", "word_k", "word_h", "verdict_k", "verdict_h", "verdict",
            "gamma_h", "gamma_k", "status")}


@dataclass
class StabilityReport:
    config: dict
    base_orbits: list
    target: list
    min_gap: float
    epsilon: float
    isolation: dict
    base_word_k: str
    base_word_h: str
    h_oracle_verdict: str
    gamma_h: float
    gamma_k: float
    rows: list
    caveat: str = CAVEAT

    @property
    def falsified(self) -> bool:
        return any(r.status == "falsified" for r in self.rows)

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("config", "base_orbits", "target", "min_gap", "epsilon",
                                            "isolation", "base_word_k", "base_word_h", "h_oracle_verdict",
                                            "gamma_h", "gamma_k", "caveat")}
        d["rows"] = [dict(r.csv_row(), discrepancies=r.discrepancies, orbits=r.orbits) for r in self.rows]
        d["falsified"] = self.falsified
        return d


def _group_orbits(points: np.ndarray, time1, radius: float = 1e-5) -> list:
    """Partition fixed points of the k-th power into orbits of the time-1 map."""
    if len(points) == 0:
        return []
    images = time1(points)
    nxt = []
    for q in images:
        d = np.max(np.abs(points - q), axis=-1)
        j = int(np.argmin(d))
        nxt.append(j if d[j] < radius else -1)
    groups, seen = [], set()
    for i in range(len(points)):
        if i in seen:
            continue
        cyc, j = [], i
        while j >= 0 and j not in seen:
            seen.add(j)
            cyc.append(j)
            j = nxt[j]
        groups.append(cyc)
    return groups


def _as_period_orbit(orbit, k: int):
    """A fixed point of the k-th power Hamiltonian seen as a period-k orbit of the base."""
    tr = orbit.samples
    traj = Trajectory(tr.times * k, tr.lifts, tr.surface, tr.step * k)
    return PeriodicOrbit(orbit.seed, k, traj, orbit.monodromy, orbit.multipliers, orbit.nondegenerate,
                         orbit.residual, orbit.surface, orbit.action, orbit.homotopy_class, orbit.kind)


def _braid_words(orbits: list, k: int, cfg: StabilityConfig) -> tuple:
    """(k-level pure braid word of the fixed points, base-level word of the first orbit's cycle)."""
    bk = suspend_orbits(orbits, cfg.samples_per_period)
    wk = braid_word_with_retry(bk, cfg.projection_angle).word
    bh = suspend_orbits([_as_period_orbit(orbits[0], k)], cfg.samples_per_period)
    wh = braid_word_with_retry(bh, cfg.projection_angle).word
    return wk, wh


def run_stability_experiment(cfg: StabilityConfig, log=None) -> StabilityReport:
    say = log or (lambda *_: None)
    G = from_config(cfg.hamiltonian, **cfg.hamiltonian_params)
    k = cfg.k
    K = kth_power_hamiltonian(G, k)
    kstep = cfg.step / k

    def time1(q):
        return G.flow(q, 0.0, 1.0, cfg.step).end

    base = find_periodic_points(K, 1, cfg.grid, step=kstep, symmetry=time1, symmetry_order=k,
                                coarse_step=None if cfg.coarse_step is None else cfg.coarse_step / k)
    say(f"base search: {len(base)} fixed points of the {k}-th power")
    pts = np.array([o.seed for o in base.orbits]).reshape(-1, 2)
    groups = _group_orbits(pts, time1)
    candidates = [g for g in groups if len(g) == cfg.target_period
                  and all(base[i].kind == cfg.target_kind for i in g)]
    if not candidates:
        raise ValueError(f"no {cfg.target_kind} orbit of period {cfg.target_period} found")
    target = sorted(candidates[0], key=lambda i: (round(float(pts[i][0]), 9), round(float(pts[i][1]), 9)))
    # start the cycle at the first target point, in dynamical order
    cycle = candidates[0]
    start = cycle.index(target[0])
    cycle = cycle[start:] + cycle[:start]

    # gaps, windows and drift use the functional that is stationary at orbits
    actions = [orbit_action(K, o, variational=True) for o in base]
    gaps = action_gaps_and_isolation(actions, 0.0).gaps
    nz = gaps[gaps > TOL_ACTION]
    min_gap = float(nz.min()) if nz.size else math.inf
    epsilon = cfg.epsilon if cfg.epsilon is not None else min_gap / cfg.isolation_factor
    iso = action_gaps_and_isolation(actions, cfg.isolation_factor * epsilon, subset=cycle)
    nonzero_ok = all(abs(actions[i]) > TOL_ACTION for i in cycle)
    base_ok = iso.isolated and (nonzero_ok or not cfg.require_nonzero_action)

    Y0 = [base[i] for i in cycle]
    wk0, wh0 = _braid_words(Y0, k, cfg)
    oracle = are_conjugate(wh0, BraidWord(3, (1, 2)) if cfg.target_period == 3 else wh0, cfg.conjugacy_budget)
    if cfg.target_period == 3 and not oracle:
        alt = are_conjugate(wh0, BraidWord(3, (-2, -1)), cfg.conjugacy_budget)
        oracle = alt if alt.verdict is not Verdict.NO else oracle
    g_h0 = gamma_estimate(wh0, cfg.entropy_iterations).rate
    g_k0 = gamma_estimate(wk0, cfg.entropy_iterations).rate
    say(f"target cycle {cycle}: words {wk0} / {wh0}; min gap {min_gap:.6g}")

    def profile(a):
        return bump(tuple(cfg.bump_center), cfg.bump_radius, a, cfg.bump_profile)

    rows = []
    for amp in cfg.amplitudes:
        spec = PerturbationSpec.build(profile, amp)
        hofer_k = k * spec.epsilon
        Hm = compose_perturbed_hamiltonian(G, spec.profile)
        Km = kth_power_hamiltonian(Hm, k)
        met = base_ok and hofer_k <= 0.5 * epsilon
        rows.append(_perturbed_row(Km, base, cycle, actions, amp, hofer_k, met, wk0, wh0, k, kstep, cfg))
        say(f"amplitude {amp:g}: {rows[-1].status} ({rows[-1].verdict})")
    return StabilityReport(
        config=_config_dict(cfg),
        base_orbits=[dict(o.to_record(), variational_action=a) for o, a in zip(base, actions)],
        target=[int(i) for i in cycle],
        min_gap=min_gap, epsilon=float(epsilon),
        isolation={"isolated": iso.isolated, "closed": iso.closed, "factor": cfg.isolation_factor,
                   "nonzero_actions": nonzero_ok, "scope": iso.scope},
        base_word_k=str(wk0), base_word_h=str(wh0), h_oracle_verdict=oracle.verdict.value,
        gamma_h=g_h0, gamma_k=g_k0, rows=rows)


def _config_dict(cfg: StabilityConfig) -> dict:
    d = dict(cfg.__dict__)
    d["bump_center"] = list(cfg.bump_center)
    d["amplitudes"] = list(cfg.amplitudes)
    return d


def _perturbed_row(Km, base, cycle, actions, amp, hofer_k, met, wk0, wh0, k, kstep, cfg) -> AmplitudeRow:
    seeds = np.array([base[i].seed for i in cycle])
    ref = newton_refine(Km, seeds, 1, step=kstep)
    cont_ok = bool(np.all(ref["status"] == 1))
    found_pts = ref["points"][ref["status"] == 1]
    if cfg.perturbed_grid:
        extra = find_periodic_points(Km, 1, cfg.perturbed_grid, step=kstep,
                                     coarse_step=None if cfg.coarse_step is None else cfg.coarse_step / k)
        found_extra = len(extra)
    else:
        found_extra = 0
    row = dict(amplitude=float(amp), hofer=float(hofer_k), hypothesis_met=bool(met),
               found=int(len(found_pts)) + found_extra, matched_window=0, matched_continuation=0,
               discrepancies=[], max_action_drift=math.nan, word_k="", word_h="",
               verdict_k=Verdict.UNKNOWN.value, verdict_h=Verdict.UNKNOWN.value,
               verdict=Verdict.UNKNOWN.value, gamma_h=math.nan, gamma_k=math.nan)
    distinct = cont_ok and len(_dedupe(found_pts, Surface.DISK, 1e-6)) == len(cycle)
    if not distinct:
        row["status"] = "inconclusive: continuation lost an orbit"
        return AmplitudeRow(**row)
    Y1 = build_orbits(Km, found_pts, 1, kstep)
    window = 2.0 * hofer_k + ACTION_TOL
    drift, mw, recs = 0.0, 0, []
    for i, o in zip(cycle, Y1):
        kappa = actions[i]
        a_new = orbit_action(Km, o, variational=True)
        hits = [j for j, a in enumerate(actions) if abs(a_new - a) < window]
        if i in hits:
            mw += 1
        else:
            row["discrepancies"].append({"orbit": int(i), "window_matches": [int(h) for h in hits]})
        drift = max(drift, abs(a_new - kappa))
        recs.append(dict(o.to_record(), variational_action=a_new))
    row.update(matched_window=mw, matched_continuation=len(Y1), max_action_drift=float(drift), orbits=recs)
    try:
        wk, wh = _braid_words(Y1, k, cfg)
    except (CollisionError, GenericityError) as err:
        row["status"] = f"inconclusive: {err}"
        return AmplitudeRow(**row)
    ck = are_conjugate(wk0, wk, cfg.conjugacy_budget)
    ch = are_conjugate(wh0, wh, cfg.conjugacy_budget)
    verdicts = {ck.verdict, ch.verdict}
    verdict = Verdict.NO if Verdict.NO in verdicts else (
        Verdict.UNKNOWN if Verdict.UNKNOWN in verdicts else Verdict.YES)
    row.update(word_k=str(wk), word_h=str(wh), verdict_k=ck.verdict.value, verdict_h=ch.verdict.value,
               verdict=verdict.value, gamma_h=gamma_estimate(wh, cfg.entropy_iterations).rate,
               gamma_k=gamma_estimate(wk, cfg.entropy_iterations).rate)
    if verdict is Verdict.NO:
        row["status"] = "falsified" if met else "braid changed (outside hypotheses)"
    elif verdict is Verdict.UNKNOWN:
        row["status"] = "inconclusive: conjugacy budget exhausted"
    else:
        row["status"] = "persisted" if met else "persisted (outside hypotheses)"
    return AmplitudeRow(**row)
