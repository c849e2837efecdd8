"""Growth-rate table for a handful of braid words, against known dilatations."""
import argparse
import math

from hambraid.braidword import BraidWord
from hambraid.entropy import gamma_estimate

WORDS = [
    (3, "1 -2", math.log((3 + math.sqrt(5)) / 2)),
    (3, "1 2", 0.0),
    (3, "1 1 -2", None),
    (4, "1 -2 3", None),
    (4, "1 2 3", 0.0),
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("-N", type=int, default=18)
    args = ap.parse_args()
    print(f"{'word':>10} {'n':>2} {'rate':>9} {'known':>9}  iters  saturated")
    for n, w, known in WORDS:
        est = gamma_estimate(BraidWord.parse(w, n), args.N)
        ref = "" if known is None else f"{known:.4f}"
        print(f"{w:>10} {n:>2} {est.rate:9.4f} {ref:>9}  {est.iterations_used:5d}  {est.saturated}")


if __name__ == "__main__":
    main()
