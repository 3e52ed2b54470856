"""Command-line interface: every module as a subcommand, JSON on stdout.

Exit codes: 0 success, 1 verification failure, 2 invalid input (with a
JSON body {"error": ...} naming the offending field).
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import crossed as cr
from . import freeaction as fa
from . import ktheory as kt
from . import leavitt as lv
from . import ledger
from . import stabilized as st
from . import serialize as sz
from .opnorm import opnorm, opnorm_oracle
from .spatial import lamperti_verdict

DEFAULT_SEED = ledger.DEFAULT_SEED


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    c = argparse.ArgumentParser(add_help=False)
    c.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                   help=f"seed for all randomness (default {DEFAULT_SEED})")
    c.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="tolerance override")
    c.add_argument("--json-indent", type=int, default=argparse.SUPPRESS, help="indent JSON output")
    c.add_argument("--quick", action="store_true", default=argparse.SUPPRESS, help="reduced trial counts")
    return c


def _ints(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    P = _Parser(prog="lpcrossed", description=__doc__, parents=[common])
    sub = P.add_subparsers(dest="command", parser_class=_Parser)

    def leaf(parent, name, help_):
        return parent.add_parser(name, help=help_, parents=[common])

    p = leaf(sub, "opnorm", "p -> p operator norm of a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")

    sp = sub.add_parser("spatial", help="spatial isometries").add_subparsers(dest="subcommand", parser_class=_Parser)
    p = leaf(sp, "lamperti", "is the matrix an isometric bijection of l^p?")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=float, required=True)

    cs = sub.add_parser("crossed", help="crossed products by finite groups and Z").add_subparsers(
        dest="subcommand", parser_class=_Parser)
    for name, help_ in (("norm", "reduced norm relative to pi0, with sandwich bounds"),
                        ("condexp", "coefficient E_g read back from the regular representation"),
                        ("dual", "dual action by a character")):
        p = leaf(cs, name, help_)
        p.add_argument("--action", required=True, help="action JSON (group, carrier, implementers)")
        p.add_argument("--element", required=True, help="element JSON {g: matrix}")
        p.add_argument("--p", type=float, default=2.0)
        p.add_argument("--pi0", choices=cr.PI0_CHOICES, default="twisted")
        if name == "condexp":
            p.add_argument("--g", default=None, help="group element label (default: identity)")
        if name == "dual":
            p.add_argument("--character", type=int, default=1, help="index into the character list")
    p = leaf(cs, "zwindow", "finite-section lower bounds for a crossed product by Z")
    p.add_argument("--element", required=True,
                   help="JSON {carrier, generator (isometry, optional), coeffs: {n: matrix}}")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--windows", type=_ints, default=[2, 4, 8, 16])

    fs = sub.add_parser("free", help="free actions").add_subparsers(dest="subcommand", parser_class=_Parser)
    p = leaf(fs, "synth", "vanishing family for G acting on itself (or on --space)")
    p.add_argument("--group", required=True, help="name (Z4, Z2xZ2, S3) or JSON file")
    p.add_argument("--space", default=None, help="JSON {points, act}; default: G acting on itself")
    p = leaf(fs, "trace", "tau_mu of an element of C(X) x G")
    p.add_argument("--group", required=True)
    p.add_argument("--space", default=None)
    p.add_argument("--measure", default=None, help="JSON list of point masses; default uniform")
    p.add_argument("--element", required=True, help="element JSON {g: matrix} with diagonal coefficients")

    ls = sub.add_parser("leavitt", help="Leavitt algebra").add_subparsers(dest="subcommand", parser_class=_Parser)
    p = leaf(ls, "norm", "window lower bounds and l1 upper bound for an element of O_d^p")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--windows", type=_ints, default=[8, 16, 32])
    p.add_argument("--perm", type=_ints, default=None, help="digit permutation, e.g. 1,0")

    ss = sub.add_parser("stab", help="stabilized crossed product").add_subparsers(dest="subcommand",
                                                                                  parser_class=_Parser)
    p = leaf(ss, "verify", "run the exact identity ledger")
    p.add_argument("--d", type=int, required=True)
    p = leaf(ss, "realize", "compressed matrix of an element (or of sigma(x) for a Leavitt x)")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--element", help="crossed element JSON {d, coeffs: {n: [{head, tail, c}]}}")
    g.add_argument("--sigma", help="Leavitt element JSON, realized through sigma")
    p.add_argument("--d", type=int, default=None, help="needed with --sigma")
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--norm", action="store_true", help="also report the opnorm lower bound")

    ks = sub.add_parser("ktheory", help="K-theory").add_subparsers(dest="subcommand", parser_class=_Parser)
    p = leaf(ks, "od", "K_*(O_d) from the Pimsner-Voiculescu sequence")
    p.add_argument("--d", type=int, required=True)

    p = leaf(sub, "verify-all", "run the complete invariant ledger")
    p.add_argument("--module", action="append", default=None, help="restrict to a module (repeatable)")
    return P


# ---------------------------------------------------------------------------
# handlers: each returns (payload, exit_code)

def _opts(args):
    return {"seed": getattr(args, "seed", DEFAULT_SEED), "tol": getattr(args, "tol", None),
            "quick": getattr(args, "quick", False)}


def _power_kwargs(p, o):
    if p in (1, 2):
        return {}
    kw = {"seed": o["seed"]}
    if o["tol"] is not None:
        kw["tol"] = o["tol"]
    return kw


def cmd_opnorm(args, o):
    A = sz.operator_from_json(sz.load_json(args.matrix, "matrix"), "matrix")
    est = opnorm(A, args.p, **_power_kwargs(args.p, o))
    out = est.to_json()
    if args.oracle:
        out["oracle"] = opnorm_oracle(A, args.p, seed=o["seed"])
    return out, 0


def cmd_lamperti(args, o):
    A = sz.operator_from_json(sz.load_json(args.matrix, "matrix"), "matrix")
    kw = {} if o["tol"] is None else {"tol": o["tol"]}
    return lamperti_verdict(A, args.p, **kw).to_json(), 0


def _crossed_inputs(args):
    act = sz.action_from_json(sz.load_json(args.action, "action"), "action")
    a = sz.element_from_json(sz.load_json(args.element, "element"), act, "element")
    return act, a


def cmd_crossed_norm(args, o):
    act, a = _crossed_inputs(args)
    est = cr.reduced_norm(a, args.p, args.pi0, **_power_kwargs(args.p, o))
    return {"reduced_norm": est.value, "relative_to_pi0": args.pi0,
            "certified_lower_bound": True, "exact": args.p in (1, 2),
            "sup_norm": cr.sup_norm(a, args.p), "l1_norm": cr.l1_norm(a, args.p)}, 0


def cmd_crossed_condexp(args, o):
    act, a = _crossed_inputs(args)
    G = act.group
    if args.g is None:
        g = G.identity
    else:
        labels = {str(sz.atom_to_json(e)): i for i, e in enumerate(G.elements)}
        if args.g not in labels:
            raise sz.SchemaError("--g", f"unknown group element {args.g!r}")
        g = labels[args.g]
    R = cr.regular_representation(a, args.p, args.pi0)
    kw = {} if o["tol"] is None else {"tol": o["tol"]}
    c = cr.coefficient(R, g, args.pi0, act, **kw)
    return {"g": sz.atom_to_json(G.elements[g]),
            "coefficient": [[sz.complex_to_json(z) for z in row] for row in c]}, 0


def cmd_crossed_dual(args, o):
    act, a = _crossed_inputs(args)
    G = act.group
    if not G.is_abelian():
        raise sz.SchemaError("action.group", "dual action needs an abelian group")
    chars = G.characters()
    if not 0 <= args.character < len(chars):
        raise sz.SchemaError("--character", f"index must lie in [0, {len(chars) - 1}]")
    tau = chars[args.character]
    b = cr.dual_action(a, tau)
    kw = _power_kwargs(args.p, o)
    na, nb = cr.reduced_norm(a, args.p, args.pi0, **kw).value, cr.reduced_norm(b, args.p, args.pi0, **kw).value
    w = cr.dual_implementer(act, tau, args.pi0).entries
    R = cr.regular_representation(a, args.p, args.pi0).entries
    conj_err = float(np.abs(cr.regular_representation(b, args.p, args.pi0).entries - w @ R @ w.conj()).max())
    return {"character": [sz.complex_to_json(z) for z in tau], "element": sz.element_to_json(b),
            "norm_before": na, "norm_after": nb, "conjugation_error": conj_err}, 0


def cmd_crossed_zwindow(args, o):
    obj = sz.load_json(args.element, "element")
    X = sz.space_from_json(sz._need(obj, "carrier", "element"), "element.carrier")
    gen = obj.get("generator")
    W = cr.ZAction(X, sz.isometry_from_json(gen, X, "element.generator")) if gen else cr.ZAction.trivial(X)
    coeffs = {}
    for key, rows in sz._need(obj, "coeffs", "element").items():
        try:
            n = int(key)
        except ValueError as exc:
            raise sz.SchemaError(f"element.coeffs.{key}", "key must be an integer") from exc
        m = sz.matrix_from_json(rows, f"element.coeffs.{key}")
        if m.shape != (X.dim, X.dim):
            raise sz.SchemaError(f"element.coeffs.{key}", f"expected a {X.dim}x{X.dim} matrix")
        coeffs[n] = m
    a = cr.CcElement(W, coeffs)
    return cr.windowed_z_norm(a, args.p, args.windows).to_json(), 0


def _gspace(args):
    G = sz.group_from_json(args.group if not args.group.endswith(".json") else sz.load_json(args.group, "group"))
    if args.space is None:
        return fa.GSpace.regular(G)
    obj = sz.load_json(args.space, "space")
    points = sz._need(obj, "points", "space")
    act = sz._need(obj, "act", "space")
    try:
        return fa.GSpace(G, tuple(points), np.asarray(act, dtype=int))
    except (ValueError, TypeError) as exc:
        raise sz.SchemaError("space.act", str(exc)) from exc


def cmd_free_synth(args, o):
    X = _gspace(args)
    fam = fa.synth_vanishing_family(X)
    G = X.group
    per_g = {str(sz.atom_to_json(G.elements[g])): float(np.abs(fa.correlation(fam.functions, X, g)).max())
             for g in range(G.order) if g != G.identity}
    return {"size": fam.size, "functions": [[sz.complex_to_json(z) for z in s] for s in fam.functions],
            "max_correlation": per_g, "verified": fam.verify()}, 0


def cmd_free_trace(args, o):
    X = _gspace(args)
    act = X.diagonal_action()
    a = sz.element_from_json(sz.load_json(args.element, "element"), act, "element")
    if args.measure is None:
        mu = fa.InvariantMeasure.uniform(X)
    else:
        prob = sz.load_json(args.measure, "measure")
        if not isinstance(prob, list) or len(prob) != len(X.points):
            raise sz.SchemaError("measure", f"expected a list of {len(X.points)} masses")
        try:
            mu = fa.InvariantMeasure(X, np.asarray(prob, dtype=float))
        except ValueError as exc:
            raise sz.SchemaError("measure", str(exc)) from exc
    return {"trace": sz.complex_to_json(fa.trace_from_measure(mu, a))}, 0


def cmd_leavitt_norm(args, o):
    x = sz.leavitt_from_json(sz.load_json(args.element, "element"), args.d, "element")
    return lv.norm_estimate(x, args.p, args.windows, args.perm).to_json(), 0


def cmd_stab_verify(args, o):
    if args.d < 2:
        raise sz.SchemaError("--d", "d must be at least 2")
    rng = ledger.derived_rng(o["seed"], "stabilized", f"cli_d{args.d}")
    res = ledger.stabilized_identities(args.d, rng, o["quick"])
    out = {"d": args.d, "identities": [{"name": n, "passed": ok, "detail": det} for n, ok, det in res]}
    out["all_passed"] = all(ok for _, ok, _ in res)
    return out, 0 if out["all_passed"] else 1


def cmd_stab_realize(args, o):
    if args.element:
        x = sz.crossed_from_json(sz.load_json(args.element, "element"), "element")
    else:
        if args.d is None:
            raise sz.SchemaError("--d", "required with --sigma")
        x = st.sigma(sz.leavitt_from_json(sz.load_json(args.sigma, "sigma"), args.d, "sigma"))
    try:
        R = st.concrete_realize(x, args.M, args.N, args.p)
    except ValueError as exc:
        raise sz.SchemaError("--M/--N", str(exc)) from exc
    out = {"matrix": sz.operator_to_json(R)}
    if args.norm:
        out["norm_lower_bound"] = opnorm(R, args.p, **_power_kwargs(args.p, o)).value
    return out, 0


def cmd_ktheory_od(args, o):
    if args.d < 2:
        raise sz.SchemaError("--d", "d must be at least 2")
    return kt.od_ktheory_report(args.d).to_json(), 0


def cmd_verify_all(args, o):
    known = {m for m, _, _ in ledger.REGISTRY}
    for m in args.module or []:
        if m not in known:
            raise sz.SchemaError("--module", f"unknown module {m!r}; choose from {sorted(known)}")
    results = ledger.run_all(o["seed"], o["quick"], args.module)
    counts = {}
    for r in results:
        c = counts.setdefault(r.module, {"passed": 0, "failed": 0})
        c["passed" if r.passed else "failed"] += 1
    failed = [r for r in results if not r.passed]
    out = {"seed": o["seed"], "quick": o["quick"], "modules": counts,
           "checks": [r.to_json() for r in results]}
    if failed:
        out["failure"] = failed[0].to_json()
    return out, 1 if failed else 0


HANDLERS = {
    ("opnorm", None): cmd_opnorm,
    ("spatial", "lamperti"): cmd_lamperti,
    ("crossed", "norm"): cmd_crossed_norm,
    ("crossed", "condexp"): cmd_crossed_condexp,
    ("crossed", "dual"): cmd_crossed_dual,
    ("crossed", "zwindow"): cmd_crossed_zwindow,
    ("free", "synth"): cmd_free_synth,
    ("free", "trace"): cmd_free_trace,
    ("leavitt", "norm"): cmd_leavitt_norm,
    ("stab", "verify"): cmd_stab_verify,
    ("stab", "realize"): cmd_stab_realize,
    ("ktheory", "od"): cmd_ktheory_od,
    ("verify-all", None): cmd_verify_all,
}


def _clean(x):
    """Replace non-finite floats so the output is strict JSON."""
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return _clean(x.item())
    return x


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    indent = None
    try:
        args = build_parser().parse_args(argv)
        indent = getattr(args, "json_indent", None)
        key = (args.command, getattr(args, "subcommand", None))
        if args.command is None or key not in HANDLERS:
            raise UsageError("missing subcommand (try --help)")
        payload, code = HANDLERS[key](args, _opts(args))
    except UsageError as exc:
        payload, code = {"error": str(exc)}, 2
    except (sz.SchemaError, ValueError) as exc:
        payload, code = {"error": str(exc)}, 2
    out.write(json.dumps(_clean(payload), indent=indent, allow_nan=False) + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
