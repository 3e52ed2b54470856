"""Window lower bounds for a few elements of O_d^p, as p varies."""
import argparse
import json

from lpcrossed.leavitt import LeavittElement as L, norm_estimate


def examples(d):
    return {
        "s0 + s1": L.s(d, 0) + L.s(d, 1),
        "s0 + t1": L.s(d, 0) + L.t(d, 1),
        "1 + s0 t1": L.one(d) + L.monomial(d, (0,), (1,)),
        "s0 s1 - 2 t0": L.s(d, 0, 1) - L.t(d, 0, c=2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--windows", type=int, nargs="+", default=[8, 16, 32, 64])
    ap.add_argument("--p", type=float, nargs="+", default=[1, 1.5, 2, 3, 4])
    args = ap.parse_args()
    for name, x in examples(args.d).items():
        for p in args.p:
            rep = norm_estimate(x, p, args.windows)
            print(json.dumps({"element": name, "p": p, **rep.to_json()}))


if __name__ == "__main__":
    main()
