"""Word Q structure checks and the Henon braid growth demo."""
import argparse

from hambraid import symbolic

ap = argparse.ArgumentParser()
ap.add_argument("m", type=int, nargs="*", default=[4, 5])
ap.add_argument("-N", type=int, default=12)
args = ap.parse_args()

for m in args.m:
    rep = symbolic.verify_Q_structure(m)
    print(f"m={m}: |Q|={len(symbolic.build_Q(m).word)} structure ok={rep.passed}")
    d = symbolic.q_braid_gamma_demo(m, args.N)
    print(f"  mu={d.mu:g} strands={d.braid.n} gamma={d.estimate.rate:.4f} "
          f"log(m-2)={d.bound:.4f} holds={d.holds}")
