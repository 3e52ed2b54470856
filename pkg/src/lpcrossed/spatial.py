"""Spatial partial isometries: a point bijection between supports plus phases.

The exponent p only enters when an isometry is realized as a matrix, through
the weight correction (w(x) / w(map(x)))^{1/p}.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lpcore import OperatorMatrix, WeightedSpace, _check_p, tensor_space
from .opnorm import opnorm

PHASE_TOL = 1e-12


@dataclass(frozen=True)
class SpatialPartialIsometry:
    domain_space: WeightedSpace
    codomain_space: WeightedSpace
    map: dict            # domain atom -> codomain atom
    phases: dict         # domain atom -> unimodular complex

    def __post_init__(self):
        m = dict(self.map)
        ph = {x: complex(self.phases.get(x, 1.0)) for x in m}
        dom, cod = set(self.domain_space.atoms), set(self.codomain_space.atoms)
        if not set(m) <= dom:
            raise ValueError("map is defined off the domain space")
        if not set(m.values()) <= cod:
            raise ValueError("map leaves the codomain space")
        if len(set(m.values())) != len(m):
            raise ValueError("map is not injective")
        for x, z in ph.items():
            if abs(abs(z) - 1) > PHASE_TOL:
                raise ValueError(f"phase at {x!r} is not unimodular: {z}")
        object.__setattr__(self, "map", m)
        object.__setattr__(self, "phases", ph)

    @property
    def domain_support(self) -> frozenset:
        return frozenset(self.map)

    @property
    def range_support(self) -> frozenset:
        return frozenset(self.map.values())

    @classmethod
    def identity(cls, X: WeightedSpace) -> "SpatialPartialIsometry":
        return cls(X, X, {x: x for x in X.atoms}, {})

    @classmethod
    def from_permutation(cls, X: WeightedSpace, perm, phases=None) -> "SpatialPartialIsometry":
        """perm[i] is the index of the image of atom i; phases indexed likewise."""
        atoms = X.atoms
        m = {atoms[i]: atoms[perm[i]] for i in range(X.dim)}
        ph = {} if phases is None else {atoms[i]: phases[i] for i in range(X.dim)}
        return cls(X, X, m, ph)

    def __eq__(self, other):
        if not isinstance(other, SpatialPartialIsometry):
            return NotImplemented
        return (self.domain_space == other.domain_space
                and self.codomain_space == other.codomain_space
                and self.map == other.map and self.phases == other.phases)

    def __hash__(self):
        return hash((self.domain_space, self.codomain_space, tuple(sorted(map(repr, self.map.items())))))


def realize(s: SpatialPartialIsometry, p: float) -> OperatorMatrix:
    p = _check_p(p)
    X, Y = s.domain_space, s.codomain_space
    e = np.zeros((Y.dim, X.dim), dtype=complex)
    for x, y in s.map.items():
        i, j = Y.index(y), X.index(x)
        e[i, j] = s.phases[x] * (X.weights[j] / Y.weights[i]) ** (1.0 / p)
    return OperatorMatrix(X, Y, e)


def reverse(s: SpatialPartialIsometry) -> SpatialPartialIsometry:
    inv = {y: x for x, y in s.map.items()}
    ph = {y: s.phases[x].conjugate() for x, y in s.map.items()}
    return SpatialPartialIsometry(s.codomain_space, s.domain_space, inv, ph)


def compose(s: SpatialPartialIsometry, t: SpatialPartialIsometry) -> SpatialPartialIsometry:
    """s after t."""
    if t.codomain_space != s.domain_space:
        raise ValueError("cannot compose: codomain of t is not the domain of s")
    m, ph = {}, {}
    for x, y in t.map.items():
        if y in s.map:
            m[x] = s.map[y]
            ph[x] = t.phases[x] * s.phases[y]
    return SpatialPartialIsometry(t.domain_space, s.codomain_space, m, ph)


def tensor(s: SpatialPartialIsometry, t: SpatialPartialIsometry) -> SpatialPartialIsometry:
    m, ph = {}, {}
    for x1, y1 in s.map.items():
        for x2, y2 in t.map.items():
            m[(x1, x2)] = (y1, y2)
            ph[(x1, x2)] = s.phases[x1] * t.phases[x2]
    return SpatialPartialIsometry(
        tensor_space(s.domain_space, t.domain_space),
        tensor_space(s.codomain_space, t.codomain_space), m, ph)


def support_idempotent(s: SpatialPartialIsometry, p: float) -> OperatorMatrix:
    """Multiplication by the indicator of the domain support."""
    X = s.domain_space
    e = np.zeros((X.dim, X.dim), dtype=complex)
    for x in s.map:
        e[X.index(x), X.index(x)] = 1.0
    return OperatorMatrix(X, X, e)


@dataclass(frozen=True)
class PermutationDecomposition:
    permutation: tuple   # permutation[j] = row of the nonzero entry in column j
    phases: tuple

    def matrix(self) -> np.ndarray:
        n = len(self.permutation)
        m = np.zeros((n, n), dtype=complex)
        for j, i in enumerate(self.permutation):
            m[i, j] = self.phases[j]
        return m


def is_complex_permutation(A: OperatorMatrix, tol: float = 1e-9):
    """PermutationDecomposition if A is a phase times a permutation, else None."""
    e = A.entries
    n, m = e.shape
    if n != m:
        return None
    big = np.abs(e) >= tol
    if not (np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1)):
        return None
    perm = tuple(int(np.argmax(big[:, j])) for j in range(n))
    phases = tuple(complex(e[perm[j], j]) for j in range(n))
    if any(abs(abs(z) - 1) > tol for z in phases):
        return None
    return PermutationDecomposition(perm, phases)


@dataclass(frozen=True)
class LampertiVerdict:
    is_isometric_bijection: bool
    decomposition: PermutationDecomposition | None
    norm_gap: float
    norm: float
    inverse_norm: float | None

    def to_json(self) -> dict:
        out = {
            "is_isometric_bijection": self.is_isometric_bijection,
            "norm_gap": self.norm_gap,
            "norm": self.norm,
            "inverse_norm": self.inverse_norm,
        }
        if self.decomposition is not None:
            out["permutation"] = list(self.decomposition.permutation)
            out["phases"] = [[z.real, z.imag] for z in self.decomposition.phases]
        return out


def lamperti_verdict(A: OperatorMatrix, p: float, tol: float = 1e-9) -> LampertiVerdict:
    """Check whether A is an isometric bijection of l^p, p != 2.

    Complex permutation matrices are isometric bijections; for any other
    matrix the verdict reports the gap max(||A||, ||A^{-1}||) - 1, which is
    positive exactly when A fails to be an isometric bijection.
    """
    p = _check_p(p)
    if p == 2:
        raise ValueError("p = 2 is excluded: every unitary is an isometry of l^2")
    if A.domain.dim != A.codomain.dim:
        raise ValueError("matrix must be square")
    if not np.allclose(A.domain.weights, A.domain.weights[0]) or A.domain != A.codomain:
        raise ValueError("domain and codomain must be the same equal-weight space")
    dec = is_complex_permutation(A, tol)
    nA = opnorm(A, p).value
    try:
        inv = np.linalg.inv(A.entries)
    except np.linalg.LinAlgError:
        inv = None
    if inv is None or not np.all(np.isfinite(inv)):
        return LampertiVerdict(False, None, float("inf"), nA, None)
    nI = opnorm(OperatorMatrix(A.codomain, A.domain, inv), p).value
    gap = max(nA, nI) - 1.0
    if dec is not None:
        if abs(nA - 1) > tol or abs(nI - 1) > tol:
            raise AssertionError(f"complex permutation with norms {nA}, {nI}")
        return LampertiVerdict(True, dec, gap, nA, nI)
    return LampertiVerdict(False, None, gap, nA, nI)
