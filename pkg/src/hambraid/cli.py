"""Command-line runner: ``hambraid COMMAND --scenario FILE --out DIR``.

Exit codes: 0 success (hypothesis failures appear as labeled rows), 1 a
stability row met the hypotheses but the braid changed, 2 bad scenario.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Optional

import numpy as np

from . import gf2, presets, symbolic
from .braidword import BraidWord
from .entropy import gamma_estimate
from .extract import (
    UnsupportedSurfaceError,
    braid_word_with_retry,
    projection_conjugacy,
    suspend_orbits,
    torus_summary,
)
from .hamiltonian import Surface
from .orbits import action_gaps_and_isolation, distinct_cycles, find_periodic_points, minimal_period
from .report import Bundle, Table, emit_report
from .scenario import Scenario, ScenarioError, load_scenario, validate
from .stability import StabilityConfig, run_stability_experiment

COMMANDS = ("orbits", "braid", "entropy", "stability", "gf2-corpus", "symbolic-check")
THREADS_ENV = "HAMBRAID_THREADS"

ORBIT_COLUMNS = ["index", "x", "y", "period", "kind", "nondegenerate", "mult1_re", "mult1_im",
                 "mult2_re", "mult2_im", "action", "residual", "class"]


def _orbit_rows(orbits) -> list:
    rows = []
    for i, o in enumerate(orbits):
        rec = o.to_record()
        (m1r, m1i), (m2r, m2i) = rec["multipliers"]
        rows.append({"index": i, "x": rec["seed"][0], "y": rec["seed"][1], "period": rec["period"],
                     "kind": rec["kind"], "nondegenerate": bool(o.nondegenerate), "mult1_re": m1r,
                     "mult1_im": m1i, "mult2_re": m2r, "mult2_im": m2i, "action": rec["action"],
                     "residual": rec["residual"], "class": rec["class"]})
    return rows


def _hamiltonian(sc: Scenario):
    hs = sc.require("hamiltonian")
    if hs["preset"] not in presets.PRESETS:
        raise ScenarioError("scenario.hamiltonian.preset", f"unknown preset {hs['preset']!r}")
    try:
        return presets.from_config(hs["preset"], **hs.get("params", {}))
    except (TypeError, ValueError) as err:
        raise ScenarioError("scenario.hamiltonian.params", str(err)) from None


def _search(sc: Scenario):
    H = _hamiltonian(sc)
    o = sc.section("orbits")
    S = find_periodic_points(H, o.get("k", 1), o.get("grid", 32), step=o.get("step", 1e-3),
                             coarse_step=o.get("coarse_step"), tol_orbit=o.get("tol_orbit", 1e-10),
                             merge_radius=o.get("merge_radius", 1e-4), tol_eig=o.get("tol_eig", 1e-6))
    return H, S, o


def cmd_orbits(sc: Scenario, say) -> Bundle:
    H, S, o = _search(sc)
    b = Bundle("orbits")
    b.tables["orbits"] = Table(ORBIT_COLUMNS, _orbit_rows(S))
    for i, orb in enumerate(S):
        rows = [dict(zip(("t", "x", "y", "lift_x", "lift_y"), r)) for r in orb.samples.csv_rows()]
        b.tables[f"trajectory_{i:03d}"] = Table(["t", "x", "y", "lift_x", "lift_y"], rows)
    doc = {"hamiltonian": H.name, "params": H.params, "k": S.period, "count": len(S),
           "diagnostics": S.diagnostics}
    eps = o.get("epsilon")
    acts = [x.action for x in S if x.action is not None]
    if eps is not None and acts:
        rep = action_gaps_and_isolation(acts, eps)
        doc["isolation"] = {"epsilon": eps, "isolated": rep.isolated, "min_nonzero_gap": rep.min_nonzero_gap,
                            "gaps": rep.gaps, "scope": rep.scope}
    b.documents["orbits_report"] = doc
    say(f"{len(S)} nondegenerate period-{S.period} orbits of {H.name}")
    for r in b.tables["orbits"].rows:
        say(f"  [{r['index']}] ({r['x']:.9f}, {r['y']:.9f}) {r['kind']:<10s} action {r['action']}")
    return b


def cmd_braid(sc: Scenario, say) -> Bundle:
    H, S, _ = _search(sc)
    bs = sc.section("braid")
    idx = bs.get("orbit_indices", distinct_cycles(S))
    orbits = [minimal_period(S[i]) for i in idx if i < len(S)]
    b = Bundle("braid")
    b.tables["orbits"] = Table(ORBIT_COLUMNS, _orbit_rows(orbits))
    strands_cols = ["strand", "t", "x", "y"]
    if not orbits:
        b.tables["braid"] = Table(["n", "word", "angle", "retries", "permutation"], [])
        b.tables["strands"] = Table(strands_cols, [])
        say("no orbits: empty braid")
        return b
    braid = suspend_orbits(orbits, bs.get("samples_per_period", 512))
    b.tables["strands"] = Table(strands_cols, [dict(zip(strands_cols, r)) for r in braid.csv_rows()])
    if H.surface is Surface.TORUS:
        summ = torus_summary(braid)
        b.documents["torus_braid"] = {"windings": summ.windings, "permutation": summ.permutation,
                                      "pairwise_min_distance": summ.pairwise_min_distance, "note": summ.note}
        say(f"torus braid on {braid.n} strands: windings {summ.windings} ({summ.note})")
        return b
    angle = bs.get("projection_angle", 0.05)
    ex = braid_word_with_retry(braid, angle)
    b.tables["braid"] = Table(["n", "word", "angle", "retries", "permutation"],
                              [{"n": braid.n, "word": str(ex.word), "angle": ex.angle, "retries": ex.retries,
                                "permutation": list(braid.permutation)}])
    sweep = []
    for th in bs.get("invariance_angles", list(np.linspace(0.1, 3.0, 16))):
        res = projection_conjugacy(braid, angle, float(th), bs.get("conjugacy_budget", 200_000))
        sweep.append({"angle": float(th), "verdict": res.verdict.value,
                      "witness": "" if res.witness is None else str(res.witness), "invariant": res.invariant})
    b.tables["projection_sweep"] = Table(["angle", "verdict", "witness", "invariant"], sweep)
    est = gamma_estimate(ex.word, 12) if braid.n >= 2 else None
    b.documents["braid_report"] = {"n": braid.n, "word": str(ex.word), "gamma": None if est is None else est.as_row()}
    say(f"braid on {braid.n} strands: {ex.word or '(trivial)'}")
    say(f"projection sweep: {sum(r['verdict'] == 'yes' for r in sweep)}/{len(sweep)} conjugate")
    return b


def cmd_entropy(sc: Scenario, say) -> Bundle:
    es = sc.require("entropy")
    N = es.get("N", 18)
    cap = es.get("cap")
    cols = ["word", "n", "N", "iterations_used", "rate", "saturated", "label"]
    rows, docs = [], []
    for item in es.get("words", []):
        w = BraidWord.parse(item["word"], item["n"])
        est = gamma_estimate(w, N) if cap is None else gamma_estimate(w, N, cap=cap)
        rows.append({"word": str(w), "n": w.n, "N": N, "iterations_used": est.iterations_used,
                     "rate": est.rate, "saturated": est.saturated, "label": est.label})
        docs.append({"word": str(w), "n": w.n, "rate": est.rate, "fit_window": est.fit_window,
                     "loop_lengths": {f"{i + 1},{j + 1}": v for (i, j), v in est.loop_lengths.items()},
                     "generator_lengths": {f"x{g + 1}": v for g, v in est.generator_lengths.items()},
                     "notes": est.notes})
        say(f"gamma({w}) = {est.rate:.6f}  ({est.iterations_used} iterations)")
    b = Bundle("entropy")
    b.tables["entropy"] = Table(cols, rows)
    b.documents["entropy_report"] = {"estimates": docs}
    return b


def cmd_stability(sc: Scenario, say) -> Bundle:
    ss = sc.require("stability")
    if "bump_center" in ss:
        ss["bump_center"] = tuple(ss["bump_center"])
    if "amplitudes" in ss:
        ss["amplitudes"] = tuple(float(a) for a in ss["amplitudes"])
    try:
        rep = run_stability_experiment(StabilityConfig(**ss), log=say)
    except ValueError as err:
        # unknown preset, bad parameters or no orbit of the requested kind
        raise ScenarioError("scenario.stability", str(err)) from None
    b = Bundle("stability")
    rows = [r.csv_row() for r in rep.rows]
    cols = list(rows[0]) if rows else list(StabilityConfig.__dataclass_fields__)[:0]
    b.tables["stability"] = Table(cols, rows)
    b.documents["stability_report"] = rep.as_dict()
    b.exit_code = 1 if rep.falsified else 0
    say(f"caveat: {rep.caveat}")
    if rep.falsified:
        say("FALSIFICATION: hypotheses met but the braid changed")
    return b


def cmd_gf2(sc: Scenario, say) -> Bundle:
    gs = sc.section("gf2")
    rep = gf2.run_corpus(gs.get("instances", 1000), sc.seed, gs.get("max_dim", 6), gs.get("oracle", True))
    b = Bundle("gf2-corpus")
    b.tables["gf2_corpus"] = Table(["instances", "verified", "oracle_feasible", "passed"],
                                   [dict(rep.as_row(), passed=rep.passed)])
    b.documents["gf2_failures"] = rep.failures
    say(f"pairing verified {rep.verified}/{rep.instances}; oracle feasible {rep.oracle_feasible}/{rep.instances}: "
        f"{'PASS' if rep.passed else 'FAIL'}")
    return b


def cmd_symbolic(sc: Scenario, say) -> Bundle:
    ys = sc.section("symbolic")
    b = Bundle("symbolic-check")
    checks, summary = [], []
    for m in ys.get("m_values", [4]):
        rep = symbolic.verify_Q_structure(m)
        summary.append({"m": m, "period": rep.period, "expected": rep.expected_period, "passed": rep.passed,
                        "word": list(symbolic.build_Q(m).word), "full_shift_entropy": symbolic.full_shift_entropy(m)})
        checks += [dict(r, m=m) for r in rep.rows]
        say(rep.format())
    b.tables["q_summary"] = Table(["m", "period", "expected", "passed", "full_shift_entropy", "word"], summary)
    b.tables["q_checks"] = Table(["m", "j", "point", "condition", "ok"], checks)
    demos = []
    for m in ys.get("demo", []):
        d = symbolic.q_braid_gamma_demo(m, ys.get("N", 12))
        demos.append(dict(d.as_row(), word=str(d.braid)))
        say(f"demo m={m}: gamma {d.estimate.rate:.6f} vs bound {d.bound:.6f} ({'ok' if d.holds else 'BELOW'})")
    if demos:
        b.tables["q_demo"] = Table(["m", "mu", "strands", "letters", "gamma", "bound", "iterations_used",
                                    "holds", "word"], demos)
    return b


HANDLERS = {"orbits": cmd_orbits, "braid": cmd_braid, "entropy": cmd_entropy, "stability": cmd_stability,
            "gf2-corpus": cmd_gf2, "symbolic-check": cmd_symbolic}


def _set_threads(n: Optional[int]) -> None:
    if n is None:
        env = os.environ.get(THREADS_ENV)
        n = int(env) if env else None
    if n:
        import numba
        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hambraid", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scenario", help="scenario file (.json or .toml)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--seed", type=int, default=None, help="seed for randomized corpora (overrides scenario)")
    p.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV})")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")
    p.add_argument("--quiet", action="store_true")
    return p


def run(command: str, scenario: Scenario, out_dir, fmt: str = "both", say=print) -> int:
    t0 = time.perf_counter()
    bundle = HANDLERS[command](scenario, say)
    emit_report(bundle, out_dir, fmt, scenario=scenario, seed=scenario.seed,
                timings={"total_seconds": time.perf_counter() - t0})
    return bundle.exit_code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    say = (lambda *_: None) if args.quiet else (lambda m: print(m, flush=True))
    try:
        sc = load_scenario(args.scenario) if args.scenario else validate({})
        if args.seed is not None:
            if not 0 <= args.seed < 2 ** 64:
                raise ScenarioError("--seed", "must be an unsigned 64-bit integer")
            sc.data["seed"] = args.seed
        _set_threads(args.threads)
        return run(args.command, sc, args.out, args.format, say)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except UnsupportedSurfaceError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
