"""Sweep sup <= reduced <= l1 over groups, coefficient algebras and p; print slack statistics."""
import argparse
import json

import numpy as np

from lpcrossed import crossed as cr
from lpcrossed.ledger import DEFAULT_SEED, standard_actions, standard_groups


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--p", type=float, nargs="+", default=[1, 1.5, 2, 3])
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    rows = []
    for gname, G in standard_groups().items():
        for aname, (act, diag) in standard_actions(G).items():
            for p in args.p:
                lo, hi, ratio = [], [], []
                for _ in range(args.trials):
                    a = cr.random_element(act, rng, diagonal=diag)
                    red = cr.reduced_norm(a, p).value
                    l1 = cr.l1_norm(a, p)
                    lo.append(red - cr.sup_norm(a, p))
                    hi.append(l1 - red)
                    ratio.append(red / l1)
                rows.append({"group": gname, "algebra": aname, "p": p,
                             "min_gap_below": min(lo), "min_gap_above": min(hi),
                             "mean_ratio_to_l1": float(np.mean(ratio))})
                print(json.dumps(rows[-1]))


if __name__ == "__main__":
    main()
