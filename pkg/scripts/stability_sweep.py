"""Run the period-3 persistence sweep and print one line per amplitude.

Takes several minutes on one core.  Pass --quick for three amplitudes.
"""
import argparse
import json

from hambraid.stability import StabilityConfig, run_stability_experiment


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--json", help="write the full report here")
    args = ap.parse_args()
    cfg = StabilityConfig(amplitudes=(0.0, 2e-5, 3e-2)) if args.quick else StabilityConfig()
    rep = run_stability_experiment(cfg, log=print)
    print(f"min gap {rep.min_gap:.6g}  epsilon {rep.epsilon:.3g}  base word {rep.base_word_h!r}")
    for r in rep.rows:
        print(f"{r.amplitude:8.1e}  hofer {r.hofer:9.3e}  hyp {str(r.hypothesis_met):5}  "
              f"drift {r.max_action_drift:9.3e}  {r.verdict:7}  {r.status}")
    print("falsified" if rep.falsified else "no counterexample")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rep.as_dict(), fh, indent=1, default=str)
    raise SystemExit(1 if rep.falsified else 0)


if __name__ == "__main__":
    main()
