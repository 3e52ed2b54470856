"""Finite groups given by multiplication tables."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FiniteGroup:
    elements: tuple
    table: np.ndarray          # table[i, j] = index of elements[i] * elements[j]
    identity: int
    inverse: tuple
    name: str = "G"

    @classmethod
    def from_table(cls, elements, table, name="G") -> "FiniteGroup":
        elements = tuple(elements)
        t = np.asarray(table, dtype=int)
        n = len(elements)
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise ValueError("multiplication table has the wrong shape or entries")
        ids = [e for e in range(n) if np.all(t[e] == np.arange(n)) and np.all(t[:, e] == np.arange(n))]
        if len(ids) != 1:
            raise ValueError("table has no two-sided identity")
        e = ids[0]
        inv = []
        for g in range(n):
            hs = [h for h in range(n) if t[g, h] == e and t[h, g] == e]
            if len(hs) != 1:
                raise ValueError(f"element {elements[g]!r} has no unique inverse")
            inv.append(hs[0])
        # associativity, exhaustively
        lhs = t[t[:, :, None], np.arange(n)[None, None, :]]        # (gh)k
        rhs = t[np.arange(n)[:, None, None], t[None, :, :]]         # g(hk)
        if not np.array_equal(lhs, rhs):
            raise ValueError("table is not associative")
        t.setflags(write=False)
        return cls(elements, t, e, tuple(inv), name)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        idx = np.arange(n)
        return cls.from_table(range(n), (idx[:, None] + idx[None, :]) % n, name=f"Z{n}")

    @classmethod
    def direct_product(cls, G: "FiniteGroup", H: "FiniteGroup") -> "FiniteGroup":
        pairs = list(itertools.product(range(G.order), range(H.order)))
        pos = {ab: i for i, ab in enumerate(pairs)}
        t = [[pos[(G.table[a, c], H.table[b, d])] for (c, d) in pairs] for (a, b) in pairs]
        elems = [(G.elements[a], H.elements[b]) for a, b in pairs]
        return cls.from_table(elems, t, name=f"{G.name}x{H.name}")

    @classmethod
    def from_permutations(cls, generators, name="G") -> "FiniteGroup":
        """Closure of the given permutations (tuples of images) under composition."""
        gens = [tuple(g) for g in generators]
        n = len(gens[0])
        ident = tuple(range(n))
        elems, frontier = [ident], [ident]
        seen = {ident}
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = tuple(g[x[i]] for i in range(n))
                    if y not in seen:
                        seen.add(y)
                        elems.append(y)
                        new.append(y)
            frontier = new
        elems.sort()
        pos = {e: i for i, e in enumerate(elems)}
        # (a*b)(i) = a(b(i))
        t = [[pos[tuple(a[b[i]] for i in range(n))] for b in elems] for a in elems]
        return cls.from_table(elems, t, name=name)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        if n == 1:
            return cls.from_permutations([(0,)], name="S1")
        swap = (1, 0) + tuple(range(2, n))
        cyc = tuple(range(1, n)) + (0,)
        return cls.from_permutations([swap, cyc], name=f"S{n}")

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, g: int, h: int) -> int:
        return int(self.table[g, h])

    def inv(self, g: int) -> int:
        return self.inverse[g]

    def index(self, element) -> int:
        return self.elements.index(element)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def generators(self) -> list:
        """A small generating set, chosen greedily."""
        gens, span = [], {self.identity}
        for g in range(self.order):
            if g in span:
                continue
            gens.append(g)
            span = self._closure(gens)
            if len(span) == self.order:
                break
        return gens

    def _closure(self, gens) -> set:
        span, frontier = {self.identity}, [self.identity]
        while frontier:
            new = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    if y not in span:
                        span.add(y)
                        new.append(y)
            frontier = new
        return span

    def characters(self) -> list:
        """All homomorphisms to the unit circle (abelian groups), as value arrays."""
        if not self.is_abelian():
            raise ValueError("characters are enumerated only for abelian groups")
        n = self.order
        gens = self.generators()
        roots = np.exp(2j * np.pi * np.arange(n) / n)
        found = []
        for choice in itertools.product(range(n), repeat=len(gens)):
            vals = {self.identity: 1.0 + 0j}
            frontier = [self.identity]
            ok = True
            while frontier and ok:
                new = []
                for x in frontier:
                    for g, c in zip(gens, choice):
                        y = self.mul(x, g)
                        z = vals[x] * roots[c]
                        if y in vals:
                            if abs(vals[y] - z) > 1e-9:
                                ok = False
                                break
                        else:
                            vals[y] = z
                            new.append(y)
                    if not ok:
                        break
                frontier = new
            if ok and is_character(self, [vals[g] for g in range(n)]):
                found.append(np.array([vals[g] for g in range(n)]))
        return found


def is_character(G: FiniteGroup, tau, tol: float = 1e-9) -> bool:
    tau = np.asarray(tau, dtype=complex)
    if np.any(np.abs(np.abs(tau) - 1) > tol):
        return False
    return bool(np.all(np.abs(tau[G.table] - tau[:, None] * tau[None, :]) <= tol))
