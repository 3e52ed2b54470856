"""K_0 and K_1 of O_d from the Pimsner-Voiculescu computation, with the oracle cross-check."""
import argparse

from lpcrossed.ktheory import mvn_unit_relation, od_ktheory_report, pv_cokernel_oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dmax", type=int, default=12)
    args = ap.parse_args()
    print(f"{'d':>3} {'K0':>8} {'oracle':>7} {'K1':>4} {'(d-1)[1]=0':>11}")
    for d in range(2, args.dmax + 1):
        r = od_ktheory_report(d)
        k0 = "0" if r.K0.order == 1 else f"Z/{r.K0.order}"
        k1 = "0" if r.K1_order == 1 else "?"
        print(f"{d:>3} {k0:>8} {pv_cokernel_oracle(1 - d, d):>7} {k1:>4} {str(mvn_unit_relation(d).ok):>11}")


if __name__ == "__main__":
    main()
