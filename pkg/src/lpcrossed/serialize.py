"""JSON encoding: complex numbers as [re, im], spaces, operators, groups, actions, elements.

Decoders raise SchemaError whose message starts with a path to the offending
field, e.g. ``matrix.entries[1][0]: expected [re, im]``.
"""
from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .crossed import CcElement, IsometricAction
from .gaussian import QQi
from .groups import FiniteGroup
from .leavitt import LeavittElement
from .lpcore import OperatorMatrix, WeightedSpace
from .spatial import SpatialPartialIsometry
from .stabilized import BElement, BWord, CrossedElement


class SchemaError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


def _need(obj, key, path):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}", "missing field")
    return obj[key]


# ---------------------------------------------------------------------------
# scalars

def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(x, path="value") -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool)
                                                   for t in x):
        return complex(x[0], x[1])
    raise SchemaError(path, f"expected [re, im], got {x!r}")


def exact_from_json(x, path="value") -> QQi:
    """[re, im] with ints, decimal strings or 'a/b' strings, read exactly."""
    def part(t, sub):
        if isinstance(t, bool):
            raise SchemaError(sub, "expected a number")
        try:
            return Fraction(t)
        except (TypeError, ValueError) as exc:
            raise SchemaError(sub, f"expected a number, got {t!r}") from exc
    if isinstance(x, list) and len(x) == 2:
        return QQi(part(x[0], f"{path}[0]"), part(x[1], f"{path}[1]"))
    return QQi(part(x, path), 0)


def exact_to_json(c) -> list:
    if isinstance(c, QQi):
        return [_num(c.re), _num(c.im)]
    if isinstance(c, (int, Fraction)):
        return [_num(Fraction(c)), 0]
    return complex_to_json(c)


def _num(f: Fraction):
    return f.numerator if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def atom_to_json(a):
    return a if isinstance(a, (str, int)) else str(a)


# ---------------------------------------------------------------------------
# spaces and operators

def space_to_json(X: WeightedSpace) -> dict:
    return {"atoms": [atom_to_json(a) for a in X.atoms], "weights": [float(w) for w in X.weights]}


def space_from_json(obj, path="space") -> WeightedSpace:
    atoms = _need(obj, "atoms", path)
    weights = _need(obj, "weights", path)
    if not isinstance(atoms, list):
        raise SchemaError(f"{path}.atoms", "expected a list")
    if not isinstance(weights, list) or len(weights) != len(atoms):
        raise SchemaError(f"{path}.weights", f"expected a list of {len(atoms)} numbers")
    for i, w in enumerate(weights):
        if not isinstance(w, (int, float)) or isinstance(w, bool) or not w > 0:
            raise SchemaError(f"{path}.weights[{i}]", f"expected a positive number, got {w!r}")
    try:
        return WeightedSpace(tuple(atoms), np.asarray(weights, dtype=float))
    except ValueError as exc:
        raise SchemaError(f"{path}.atoms", str(exc)) from exc


def matrix_from_json(rows, path="entries") -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise SchemaError(path, "expected a nonempty list of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            raise SchemaError(f"{path}[{i}]", "expected a row list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise SchemaError(f"{path}[{i}]", f"row has length {len(row)}, expected {width}")
        out.append([complex_from_json(z, f"{path}[{i}][{j}]") for j, z in enumerate(row)])
    return np.array(out, dtype=complex)


def operator_to_json(A: OperatorMatrix) -> dict:
    return {"domain": space_to_json(A.domain), "codomain": space_to_json(A.codomain),
            "entries": [[complex_to_json(z) for z in row] for row in A.entries]}


def operator_from_json(obj, path="matrix") -> OperatorMatrix:
    """Full schema; domain/codomain default to counting measure when omitted."""
    entries = matrix_from_json(_need(obj, "entries", path), f"{path}.entries")
    m, n = entries.shape
    dom = space_from_json(obj["domain"], f"{path}.domain") if "domain" in obj else WeightedSpace.counting(n)
    cod = space_from_json(obj["codomain"], f"{path}.codomain") if "codomain" in obj else (
        dom if m == n and "domain" in obj else WeightedSpace.counting(m))
    if cod.dim != m:
        raise SchemaError(f"{path}.entries", f"has {m} rows but the codomain has {cod.dim} atoms")
    if dom.dim != n:
        raise SchemaError(f"{path}.entries", f"has {n} columns but the domain has {dom.dim} atoms")
    return OperatorMatrix(dom, cod, entries)


# ---------------------------------------------------------------------------
# groups, isometries, actions, crossed-product elements

def group_to_json(G: FiniteGroup) -> dict:
    labels = [atom_to_json(e) for e in G.elements]
    return {"elements": labels, "table": [[labels[G.mul(g, h)] for h in range(G.order)]
                                          for g in range(G.order)]}


def group_from_json(obj, path="group") -> FiniteGroup:
    if isinstance(obj, str):
        return named_group(obj, path)
    elements = _need(obj, "elements", path)
    table = _need(obj, "table", path)
    if not isinstance(elements, list) or not elements:
        raise SchemaError(f"{path}.elements", "expected a nonempty list")
    for i, e in enumerate(elements):
        if not isinstance(e, (str, int)) or isinstance(e, bool):
            raise SchemaError(f"{path}.elements[{i}]", "labels must be strings or integers")
    lookup = {e: i for i, e in enumerate(elements)}
    if len(lookup) != len(elements):
        raise SchemaError(f"{path}.elements", "labels must be distinct")
    if not isinstance(table, list) or len(table) != len(elements):
        raise SchemaError(f"{path}.table", f"expected {len(elements)} rows")
    idx = []
    for i, row in enumerate(table):
        if not isinstance(row, list) or len(row) != len(elements):
            raise SchemaError(f"{path}.table[{i}]", f"expected {len(elements)} entries")
        r = []
        for j, x in enumerate(row):
            if x not in lookup:
                raise SchemaError(f"{path}.table[{i}][{j}]", f"unknown element {x!r}")
            r.append(lookup[x])
        idx.append(r)
    try:
        return FiniteGroup.from_table(tuple(elements), idx, name=obj.get("name", "G"))
    except ValueError as exc:
        raise SchemaError(f"{path}.table", str(exc)) from exc


def named_group(name: str, path="group") -> FiniteGroup:
    """'Z4', 'Z2xZ2', 'S3' and products like 'Z2xZ3'."""
    try:
        parts = name.split("x")
        groups = []
        for part in parts:
            if part[0] == "Z":
                groups.append(FiniteGroup.cyclic(int(part[1:])))
            elif part[0] == "S":
                groups.append(FiniteGroup.symmetric(int(part[1:])))
            else:
                raise ValueError(part)
    except (ValueError, IndexError) as exc:
        raise SchemaError(path, f"unknown group name {name!r} (use e.g. Z4, Z2xZ2, S3)") from exc
    G = groups[0]
    for H in groups[1:]:
        G = FiniteGroup.direct_product(G, H)
    return G


def isometry_to_json(s: SpatialPartialIsometry) -> dict:
    return {"map": {str(atom_to_json(x)): atom_to_json(y) for x, y in s.map.items()},
            "phases": {str(atom_to_json(x)): complex_to_json(c) for x, c in s.phases.items()}}


def isometry_from_json(obj, X: WeightedSpace, path="isometry") -> SpatialPartialIsometry:
    mp = _need(obj, "map", path)
    if not isinstance(mp, dict):
        raise SchemaError(f"{path}.map", "expected an object atom -> atom")
    by_label = {str(atom_to_json(a)): a for a in X.atoms}
    out = {}
    for k, v in mp.items():
        if k not in by_label:
            raise SchemaError(f"{path}.map.{k}", "unknown atom")
        if str(v) not in by_label:
            raise SchemaError(f"{path}.map.{k}", f"unknown target atom {v!r}")
        out[by_label[k]] = by_label[str(v)]
    phases = {}
    for k, v in (obj.get("phases") or {}).items():
        if k not in by_label:
            raise SchemaError(f"{path}.phases.{k}", "unknown atom")
        phases[by_label[k]] = complex_from_json(v, f"{path}.phases.{k}")
    for a in out:
        phases.setdefault(a, 1.0)
    try:
        return SpatialPartialIsometry(X, X, out, phases)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def action_to_json(act: IsometricAction) -> dict:
    return {"group": group_to_json(act.group), "carrier": space_to_json(act.carrier),
            "implementers": {str(atom_to_json(act.group.elements[g])): isometry_to_json(w)
                             for g, w in enumerate(act.implementers)}}


def action_from_json(obj, path="action") -> IsometricAction:
    G = group_from_json(_need(obj, "group", path), f"{path}.group")
    X = space_from_json(_need(obj, "carrier", path), f"{path}.carrier")
    imps_obj = obj.get("implementers")
    if imps_obj is None:
        return IsometricAction.trivial(G, X)
    if not isinstance(imps_obj, dict):
        raise SchemaError(f"{path}.implementers", "expected an object keyed by group element")
    labels = [atom_to_json(e) for e in G.elements]
    imps = []
    for g, lab in enumerate(labels):
        key = str(lab)
        if key not in imps_obj:
            raise SchemaError(f"{path}.implementers.{key}", "missing implementer")
        imps.append(isometry_from_json(imps_obj[key], X, f"{path}.implementers.{key}"))
    try:
        return IsometricAction(G, X, tuple(imps))
    except ValueError as exc:
        raise SchemaError(f"{path}.implementers", str(exc)) from exc


def element_to_json(a: CcElement) -> dict:
    G = a.action.group
    return {str(atom_to_json(G.elements[g])): [[complex_to_json(z) for z in row] for row in c]
            for g, c in sorted(a.coeffs.items())}


def element_from_json(obj, action: IsometricAction, path="element") -> CcElement:
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object keyed by group element")
    G = action.group
    labels = {str(atom_to_json(e)): g for g, e in enumerate(G.elements)}
    n = action.carrier.dim
    coeffs = {}
    for key, rows in obj.items():
        if key not in labels:
            raise SchemaError(f"{path}.{key}", "unknown group element")
        m = matrix_from_json(rows, f"{path}.{key}")
        if m.shape != (n, n):
            raise SchemaError(f"{path}.{key}", f"expected a {n}x{n} matrix, got {m.shape}")
        coeffs[labels[key]] = m
    return CcElement(action, coeffs)


# ---------------------------------------------------------------------------
# Leavitt and stabilized elements

def leavitt_from_json(data, d: int, path="element") -> LeavittElement:
    if not isinstance(data, list):
        raise SchemaError(path, "expected a list of {mu, nu, c} terms")
    try:
        return LeavittElement.from_json(d, data)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def belement_to_json(b: BElement) -> list:
    return [{"head": list(w.head), "tail": [list(t) for t in w.tail], "c": exact_to_json(c)}
            for w, c in sorted(b.terms.items())]


def belement_from_json(data, d: int, path="b") -> BElement:
    if not isinstance(data, list):
        raise SchemaError(path, "expected a list of {head, tail, c} terms")
    terms = {}
    for i, item in enumerate(data):
        sub = f"{path}[{i}]"
        head = _need(item, "head", sub)
        if not (isinstance(head, list) and len(head) == 2 and all(isinstance(h, int) for h in head)):
            raise SchemaError(f"{sub}.head", "expected [j, k]")
        tail = item.get("tail", [])
        if not isinstance(tail, list) or any(not (isinstance(t, list) and len(t) == 2) for t in tail):
            raise SchemaError(f"{sub}.tail", "expected a list of [l, m] pairs")
        w = BWord(tuple(head), tuple(tuple(t) for t in tail))
        c = exact_from_json(item.get("c", 1), f"{sub}.c")
        terms[w] = terms.get(w, 0) + c
    try:
        return BElement(d, terms)
    except ValueError as exc:
        raise SchemaError(path, str(exc)) from exc


def crossed_to_json(x: CrossedElement) -> dict:
    return {"d": x.d, "coeffs": {str(n): belement_to_json(b) for n, b in sorted(x.coeffs.items())}}


def crossed_from_json(obj, path="element") -> CrossedElement:
    d = _need(obj, "d", path)
    if not isinstance(d, int) or d < 2:
        raise SchemaError(f"{path}.d", "expected an integer >= 2")
    coeffs = _need(obj, "coeffs", path)
    if not isinstance(coeffs, dict):
        raise SchemaError(f"{path}.coeffs", "expected an object keyed by integer n")
    out = {}
    for key, terms in coeffs.items():
        try:
            n = int(key)
        except ValueError as exc:
            raise SchemaError(f"{path}.coeffs.{key}", "key must be an integer") from exc
        out[n] = belement_from_json(terms, d, f"{path}.coeffs.{key}")
    return CrossedElement(d, out)


def load_json(path: str, what: str = "input"):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SchemaError(what, f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(what, f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
