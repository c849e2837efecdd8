"""Random pairing corpus, cross-checked by exhaustive search."""
import argparse

from hambraid.gf2 import run_corpus

ap = argparse.ArgumentParser()
ap.add_argument("--instances", type=int, default=1000)
ap.add_argument("--seed", type=int, default=0)
ap.add_argument("--max-dim", type=int, default=6)
args = ap.parse_args()

rep = run_corpus(args.instances, args.seed, args.max_dim)
print(rep.as_row())
raise SystemExit(0 if rep.passed else 1)
