"""Finite weighted measure spaces, vectors and operators between them.

Every norm in the package is a weighted L^p norm on a finite atomic space.
Matrices are indexed by atom position; atom labels are opaque hashables
(strings, ints, tuples) and only their order matters for layout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np


def _check_p(p: float) -> float:
    p = float(p)
    if not np.isfinite(p) or p < 1:
        raise ValueError(f"p must lie in [1, inf), got {p}")
    return p


@dataclass(frozen=True)
class WeightedSpace:
    atoms: tuple
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(atoms) != w.size:
            raise ValueError(f"{len(atoms)} atoms but {w.size} weights")
        if len(set(atoms)) != len(atoms):
            raise ValueError("atom labels must be pairwise distinct")
        if not np.all(w > 0):
            raise ValueError("weights must be strictly positive")
        w.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", w)

    @classmethod
    def counting(cls, n_or_atoms) -> "WeightedSpace":
        atoms = range(n_or_atoms) if isinstance(n_or_atoms, int) else n_or_atoms
        atoms = tuple(atoms)
        return cls(atoms, np.ones(len(atoms)))

    @classmethod
    def normalized(cls, n_or_atoms) -> "WeightedSpace":
        """Normalized counting measure (total mass one)."""
        atoms = range(n_or_atoms) if isinstance(n_or_atoms, int) else n_or_atoms
        atoms = tuple(atoms)
        return cls(atoms, np.full(len(atoms), 1.0 / len(atoms)))

    @property
    def dim(self) -> int:
        return len(self.atoms)

    def index(self, atom: Hashable) -> int:
        try:
            return self._index_map[atom]
        except AttributeError:
            object.__setattr__(self, "_index_map", {a: i for i, a in enumerate(self.atoms)})
            return self._index_map[atom]

    def __eq__(self, other):
        if not isinstance(other, WeightedSpace):
            return NotImplemented
        return self.atoms == other.atoms and np.array_equal(self.weights, other.weights)

    def __hash__(self):
        return hash((self.atoms, self.weights.tobytes()))


@dataclass(frozen=True)
class LpVector:
    space: WeightedSpace
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex).reshape(-1)
        if c.size != self.space.dim:
            raise ValueError(f"vector has {c.size} coords, space has {self.space.dim} atoms")
        object.__setattr__(self, "coords", c)


@dataclass(frozen=True)
class OperatorMatrix:
    domain: WeightedSpace
    codomain: WeightedSpace
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (self.codomain.dim, self.domain.dim):
            raise ValueError(
                f"entries have shape {e.shape}, expected "
                f"({self.codomain.dim}, {self.domain.dim})"
            )
        object.__setattr__(self, "entries", e)

    @classmethod
    def identity(cls, space: WeightedSpace) -> "OperatorMatrix":
        return cls(space, space, np.eye(space.dim, dtype=complex))

    @classmethod
    def matrix_unit(cls, space: WeightedSpace, j: int, k: int) -> "OperatorMatrix":
        e = np.zeros((space.dim, space.dim), dtype=complex)
        e[j, k] = 1.0
        return cls(space, space, e)

    @property
    def shape(self):
        return self.entries.shape

    def __matmul__(self, other):
        if isinstance(other, OperatorMatrix):
            if other.codomain != self.domain:
                raise ValueError("operator spaces do not compose")
            return OperatorMatrix(other.domain, self.codomain, self.entries @ other.entries)
        if isinstance(other, LpVector):
            if other.space != self.domain:
                raise ValueError("vector is not in the operator's domain")
            return LpVector(self.codomain, self.entries @ other.coords)
        return NotImplemented

    def _same(self, other):
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ValueError("operators act between different spaces")

    def __add__(self, other):
        self._same(other)
        return OperatorMatrix(self.domain, self.codomain, self.entries + other.entries)

    def __sub__(self, other):
        self._same(other)
        return OperatorMatrix(self.domain, self.codomain, self.entries - other.entries)

    def __neg__(self):
        return OperatorMatrix(self.domain, self.codomain, -self.entries)

    def __mul__(self, scalar):
        return OperatorMatrix(self.domain, self.codomain, scalar * self.entries)

    __rmul__ = __mul__


def p_norm(v: LpVector, p: float) -> float:
    p = _check_p(p)
    if v.coords.size != v.space.dim:
        raise ValueError("coords do not match the space")
    return float(np.sum(v.space.weights * np.abs(v.coords) ** p) ** (1.0 / p))


def weighted_p_norm(coords, weights, p: float) -> float:
    """Array-level version of :func:`p_norm`, used in inner loops."""
    return float(np.sum(weights * np.abs(coords) ** p) ** (1.0 / p))


def tensor_space(X: WeightedSpace, Y: WeightedSpace) -> WeightedSpace:
    atoms = [(x, y) for x in X.atoms for y in Y.atoms]
    return WeightedSpace(atoms, np.kron(X.weights, Y.weights))


def tensor_operator(a: OperatorMatrix, b: OperatorMatrix) -> OperatorMatrix:
    return OperatorMatrix(
        tensor_space(a.domain, b.domain),
        tensor_space(a.codomain, b.codomain),
        np.kron(a.entries, b.entries),
    )


@dataclass(frozen=True)
class DisjointUnion:
    space: WeightedSpace
    parts: tuple
    offsets: tuple

    def embed(self, k: int, v: LpVector) -> LpVector:
        if v.space != self.parts[k]:
            raise ValueError(f"vector does not live on part {k}")
        c = np.zeros(self.space.dim, dtype=complex)
        c[self.offsets[k]:self.offsets[k] + v.space.dim] = v.coords
        return LpVector(self.space, c)

    def extract(self, k: int, v: LpVector) -> LpVector:
        lo = self.offsets[k]
        return LpVector(self.parts[k], v.coords[lo:lo + self.parts[k].dim])

    def embed_matrix(self, k: int) -> OperatorMatrix:
        e = np.zeros((self.space.dim, self.parts[k].dim), dtype=complex)
        lo = self.offsets[k]
        e[lo:lo + self.parts[k].dim, :] = np.eye(self.parts[k].dim)
        return OperatorMatrix(self.parts[k], self.space, e)

    def extract_matrix(self, k: int) -> OperatorMatrix:
        m = self.embed_matrix(k)
        return OperatorMatrix(self.space, self.parts[k], m.entries.T.copy())


def disjoint_union(spaces: Sequence[WeightedSpace]) -> DisjointUnion:
    spaces = tuple(spaces)
    if not spaces:
        raise ValueError("disjoint union of an empty list")
    if len(spaces) == 1:
        return DisjointUnion(spaces[0], spaces, (0,))
    atoms, weights, offsets = [], [], []
    for k, s in enumerate(spaces):
        offsets.append(len(atoms))
        atoms.extend((k, a) for a in s.atoms)
        weights.append(s.weights)
    return DisjointUnion(WeightedSpace(atoms, np.concatenate(weights)), spaces, tuple(offsets))


@dataclass(frozen=True)
class Renormalization:
    space: WeightedSpace
    forward: OperatorMatrix
    backward: OperatorMatrix

    def conjugate(self, a: OperatorMatrix) -> OperatorMatrix:
        """a -> u a u^{-1}, for a acting on the original space."""
        return self.forward @ a @ self.backward


def renormalize_weights(X: WeightedSpace, c: float, p: float) -> Renormalization:
    """Scale all weights by c; u xi = c^{-1/p} xi is then an isometry onto the new space."""
    if not c > 0:
        raise ValueError(f"scale must be positive, got {c}")
    p = _check_p(p)
    Xc = WeightedSpace(X.atoms, c * X.weights)
    s = c ** (-1.0 / p)
    eye = np.eye(X.dim, dtype=complex)
    return Renormalization(Xc, OperatorMatrix(X, Xc, s * eye), OperatorMatrix(Xc, X, eye / s))


def unweighted_form(a: OperatorMatrix, p: float) -> np.ndarray:
    """D_cod^{1/p} A D_dom^{-1/p}: the same operator viewed on counting measure."""
    p = _check_p(p)
    left = a.codomain.weights ** (1.0 / p)
    right = a.domain.weights ** (-1.0 / p)
    return left[:, None] * a.entries * right[None, :]
