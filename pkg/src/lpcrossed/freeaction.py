"""Free actions of finite groups on finite sets.

The key object is a family s_1, ..., s_n of unimodular functions whose
translate correlations (1/n) sum_k s_k(x) conj(s_k(g^{-1} x)) vanish for
the group elements g in a forbidden set. Conjugating a crossed-product
element by the s_k and averaging then kills every u_g term with g in that
set, leaving the conditional expectation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crossed import CcElement, IsometricAction, conditional_expectation, single
from .groups import FiniteGroup
from .lpcore import WeightedSpace
from .spatial import SpatialPartialIsometry


@dataclass(frozen=True, eq=False)
class GSpace:
    group: FiniteGroup
    points: tuple
    act: np.ndarray      # act[g, x] = index of g . x

    def __post_init__(self):
        G = self.group
        a = np.asarray(self.act, dtype=int)
        n = len(self.points)
        if a.shape != (G.order, n):
            raise ValueError("action table has the wrong shape")
        if not np.array_equal(a[G.identity], np.arange(n)):
            raise ValueError("identity does not act trivially")
        for g in range(G.order):
            for h in range(G.order):
                if not np.array_equal(a[G.mul(g, h)], a[g][a[h]]):
                    raise ValueError("action is not compatible with the group law")
        object.__setattr__(self, "act", a)

    @classmethod
    def regular(cls, G: FiniteGroup) -> "GSpace":
        return cls(G, G.elements, np.array(G.table))

    def is_free(self) -> bool:
        G = self.group
        return all(not np.any(self.act[g] == np.arange(len(self.points)))
                   for g in range(G.order) if g != G.identity)

    def transversal(self) -> list:
        seen, reps = set(), []
        for x in range(len(self.points)):
            if x not in seen:
                reps.append(x)
                seen.update(int(y) for y in self.act[:, x])
        return reps

    def diagonal_action(self, weights=None) -> IsometricAction:
        """The induced action on C(X), realized inside L(L^p(X)) by permutations."""
        n = len(self.points)
        X = WeightedSpace(self.points, np.ones(n) if weights is None else weights)
        imps = tuple(SpatialPartialIsometry.from_permutation(X, list(self.act[g]))
                     for g in range(self.group.order))
        return IsometricAction(self.group, X, imps)


def correlation(functions: np.ndarray, gspace: GSpace, g: int) -> np.ndarray:
    """Per point x: (1/n) sum_k s_k(x) conj(s_k(g^{-1} x))."""
    ginv_x = gspace.act[gspace.group.inv(g)]
    s = np.asarray(functions)
    return (s * np.conj(s[:, ginv_x])).mean(axis=0)


@dataclass(frozen=True, eq=False)
class VanishingFamily:
    gspace: GSpace
    functions: np.ndarray     # shape (n, |X|)
    forbidden: frozenset      # group indices whose correlations vanish

    def __post_init__(self):
        s = np.atleast_2d(np.asarray(self.functions, dtype=complex))
        if np.any(np.abs(np.abs(s) - 1) > 1e-12):
            raise ValueError("functions must be unimodular")
        if self.gspace.group.identity in self.forbidden:
            raise ValueError("the identity cannot be forbidden")
        object.__setattr__(self, "functions", s)
        object.__setattr__(self, "forbidden", frozenset(self.forbidden))

    @property
    def size(self) -> int:
        return self.functions.shape[0]

    def max_correlation(self, elements=None) -> float:
        elements = self.forbidden if elements is None else elements
        return max((float(np.abs(correlation(self.functions, self.gspace, g)).max())
                    for g in elements), default=0.0)

    def verify(self, tol: float = 1e-10) -> bool:
        return self.max_correlation() <= tol


def synth_vanishing_family(gspace: GSpace, forbidden=None) -> VanishingFamily:
    """n = |G| functions vanishing for every g != 1.

    On the orbit of a transversal point t, s_k(h t) = exp(2 pi i k lab(h) / |G|)
    with lab the index labeling of G; freeness makes h -> h t injective.
    """
    G = gspace.group
    if not gspace.is_free():
        raise ValueError("action is not free")
    all_g = frozenset(g for g in range(G.order) if g != G.identity)
    forbidden = all_g if forbidden is None else frozenset(forbidden)
    if G.identity in forbidden:
        raise ValueError("the identity cannot be forbidden")
    n = G.order
    s = np.zeros((n, len(gspace.points)), dtype=complex)
    k = np.arange(n)
    for t in gspace.transversal():
        for h in range(n):
            s[:, gspace.act[h, t]] = np.exp(2j * np.pi * k * h / n)
    return VanishingFamily(gspace, s, all_g)


def pair_family(gspace: GSpace, g: int, x: int) -> VanishingFamily:
    """Two functions, 1 and a +-1 function, whose correlation vanishes at (x, g)."""
    G = gspace.group
    if g == G.identity:
        raise ValueError("g must not be the identity")
    y = int(gspace.act[G.inv(g), x])
    if y == x:
        raise ValueError("g fixes x; the action is not free there")
    s2 = np.ones(len(gspace.points), dtype=complex)
    s2[y] = -1.0
    fam = np.vstack([np.ones_like(s2), s2])
    return PointFamily(gspace, fam, frozenset(), frozenset({(g, x)}))


@dataclass(frozen=True, eq=False)
class PointFamily(VanishingFamily):
    """A family known to vanish only at specific (g, x) pairs."""
    locus: frozenset = frozenset()

    def verify(self, tol: float = 1e-10) -> bool:
        return all(abs(correlation(self.functions, self.gspace, g)[x]) <= tol for g, x in self.locus)


def combine_product(fam1: VanishingFamily, fam2: VanishingFamily) -> VanishingFamily:
    """All products r_j s_k; the correlation is the product of the two correlations."""
    if fam1.gspace is not fam2.gspace:
        raise ValueError("families live on different G-spaces")
    prods = (fam1.functions[:, None, :] * fam2.functions[None, :, :]).reshape(-1, fam1.functions.shape[1])
    loc1 = getattr(fam1, "locus", frozenset())
    loc2 = getattr(fam2, "locus", frozenset())
    forb = fam1.forbidden | fam2.forbidden
    if loc1 or loc2:
        return PointFamily(fam1.gspace, prods, forb, loc1 | loc2)
    return VanishingFamily(fam1.gspace, prods, forb)


def _check_diagonal_action(fam: VanishingFamily, a: CcElement):
    act = a.action
    gs = fam.gspace
    if not isinstance(act, IsometricAction) or act.group is not gs.group or act.carrier.dim != len(gs.points):
        raise ValueError("element does not belong to the diagonal action of this G-space")
    for g in range(gs.group.order):
        if act.implementers[g].map != {act.carrier.atoms[x]: act.carrier.atoms[int(gs.act[g, x])]
                                       for x in range(len(gs.points))}:
            raise ValueError("element does not belong to the diagonal action of this G-space")


def averaging_operator(fam: VanishingFamily, a: CcElement) -> CcElement:
    """P(a) = (1/n) sum_k s_k a conj(s_k), the s_k acting as diagonal multipliers."""
    _check_diagonal_action(fam, a)
    act = a.action
    out = None
    for s in fam.functions:
        left = single(act, np.diag(s))
        right = single(act, np.diag(np.conj(s)))
        term = left @ a @ right
        out = term if out is None else out + term
    return out * (1.0 / fam.size)


@dataclass(frozen=True, eq=False)
class InvariantMeasure:
    gspace: GSpace
    prob: np.ndarray

    def __post_init__(self):
        pr = np.asarray(self.prob, dtype=float)
        if not check_invariance(self.gspace, pr):
            raise ValueError("measure is not G-invariant")
        object.__setattr__(self, "prob", pr)

    @classmethod
    def uniform(cls, gspace: GSpace) -> "InvariantMeasure":
        n = len(gspace.points)
        return cls(gspace, np.full(n, 1.0 / n))

    @classmethod
    def orbit_average(cls, gspace: GSpace, prob) -> "InvariantMeasure":
        prob = np.asarray(prob, dtype=float)
        G = gspace.group
        avg = np.zeros_like(prob)
        for g in range(G.order):
            avg[gspace.act[g]] += prob
        return cls(gspace, avg / G.order)


def check_invariance(gspace: GSpace, prob, tol: float = 1e-12) -> bool:
    prob = np.asarray(prob, dtype=float)
    if np.any(prob < 0):
        raise ValueError("negative mass")
    if abs(prob.sum() - 1) > tol:
        raise ValueError(f"masses sum to {prob.sum()}, not 1")
    return all(np.allclose(prob[gspace.act[g]], prob, atol=tol, rtol=0)
               for g in range(gspace.group.order))


def trace_from_measure(mu: InvariantMeasure, a: CcElement) -> complex:
    """tau_mu(a) = sum_x mu(x) E(a)(x, x)."""
    return complex(np.sum(mu.prob * np.diag(conditional_expectation(a))))


def orbit_sum(a_diag: np.ndarray, action: IsometricAction) -> np.ndarray:
    """sum_g alpha_g(f): u_g f u_g^{-1} summed over G, for a diagonal f."""
    return sum(action.alpha(g, a_diag) for g in range(action.group.order))
