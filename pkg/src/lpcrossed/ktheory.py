"""K_0 bookkeeping in Z[1/d] and the Pimsner-Voiculescu computation for O_d."""
from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .crossed import IntegrityError
from .leavitt import LeavittElement
from .lpcore import OperatorMatrix


@dataclass(frozen=True)
class LocalizedInt:
    """numerator / d^exponent, canonical: d does not divide the numerator unless exponent = 0."""
    numerator: int
    exponent: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if self.exponent < 0:
            raise ValueError("exponent must be nonnegative")
        n, e = int(self.numerator), int(self.exponent)
        while e > 0 and n % self.d == 0:
            n //= self.d
            e -= 1
        if n == 0:
            e = 0
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "exponent", e)

    @classmethod
    def of(cls, n: int, d: int) -> "LocalizedInt":
        return cls(n, 0, d)

    def _lift(self, other):
        if isinstance(other, int):
            return LocalizedInt(other, 0, self.d)
        if not isinstance(other, LocalizedInt):
            return NotImplemented
        if other.d != self.d:
            raise ValueError(f"base mismatch: {self.d} vs {other.d}")
        return other

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        e = max(self.exponent, o.exponent)
        n = self.numerator * self.d ** (e - self.exponent) + o.numerator * self.d ** (e - o.exponent)
        return LocalizedInt(n, e, self.d)

    __radd__ = __add__

    def __neg__(self):
        return LocalizedInt(-self.numerator, self.exponent, self.d)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return LocalizedInt(self.numerator * o.numerator, self.exponent + o.exponent, self.d)

    __rmul__ = __mul__

    def as_fraction(self):
        from fractions import Fraction
        return Fraction(self.numerator, self.d ** self.exponent)

    def __str__(self):
        return str(self.numerator) if self.exponent == 0 else f"{self.numerator}/{self.d}^{self.exponent}"


def idempotent_rank(e, tol: float = 1e-8) -> int:
    E = np.asarray(e.entries if isinstance(e, OperatorMatrix) else e, dtype=complex)
    if E.ndim != 2 or E.shape[0] != E.shape[1]:
        raise ValueError("idempotent must be a square matrix")
    if np.abs(E @ E - E).max(initial=0.0) >= tol:
        raise ValueError("matrix is not idempotent")
    tr = np.trace(E)
    r = int(round(tr.real))
    if abs(tr - r) >= tol:
        raise IntegrityError(f"trace {tr} is not an integer")
    nr = np.linalg.matrix_rank(E, tol=max(tol, 1e-10) * max(1.0, np.abs(E).max(initial=1.0))) if E.size else 0
    if nr != r:
        raise IntegrityError(f"trace {r} disagrees with numerical rank {nr}")
    return r


@dataclass(frozen=True)
class K0Class:
    value: LocalizedInt
    level: tuple       # (n, r): matrix slots, UHF depth

    def raised(self) -> "K0Class":
        """Image under e -> e (x) 1_d: the class is unchanged."""
        n, r = self.level
        return K0Class(self.value, (n, r + 1))


def k0_class(e, level, d: int, tol: float = 1e-8) -> K0Class:
    """[e] = rank(e) / d^r for an idempotent on an (M-slot) (x) D_r realization."""
    n, r = level
    return K0Class(LocalizedInt(idempotent_rank(e, tol), r, d), (n, r))


def class_from_rank(rank: int, level, d: int) -> K0Class:
    return K0Class(LocalizedInt(rank, level[1], d), tuple(level))


def raise_rank(rank: int, level, d: int):
    """Rank and level of e (x) 1_d."""
    return rank * d, (level[0], level[1] + 1)


@dataclass(frozen=True)
class CyclicResult:
    order: int            # 0 means the whole (non-finite) group
    generator_image: str

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("order must be nonnegative")

    def to_json(self) -> dict:
        return {"order": self.order, "generator": self.generator_image}


def strip_d(m: int, d: int) -> int:
    """|m| with every prime factor shared with d divided out."""
    m = abs(m)
    g = gcd(m, d)
    while g > 1:
        m //= g
        g = gcd(m, d)
    return m


def pv_cokernel(m: int, d: int) -> CyclicResult:
    """coker(m: Z[1/d] -> Z[1/d]) = Z/m' with m' = strip_d(m, d)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if m == 0:
        raise ValueError("m = 0: the cokernel is all of Z[1/d] (free, not cyclic of finite order)")
    mm = strip_d(m, d)
    gen = "0" if mm == 1 else f"1 + {mm}Z"
    return CyclicResult(mm, gen)


def pv_cokernel_oracle(m: int, d: int) -> int:
    """Brute force: Z[1/d]/mZ[1/d] = Z/m modulo the residues killed by powers of d.

    An x mod |m| dies in the cokernel iff d^K x = 0 mod |m| for large K; the
    cokernel order is |m| divided by the number of such residues.
    """
    m = abs(m)
    K = m.bit_length() + 1
    dead = sum(1 for x in range(m) if (pow(d, K, m) * x) % m == 0)
    return m // dead


def pv_kernel(m: int, d: int) -> int:
    """Order of ker(m: Z[1/d] -> Z[1/d]): 1 for m != 0, and 0 (the whole group) for m = 0."""
    if d < 2:
        raise ValueError("d must be at least 2")
    return 0 if m == 0 else 1


@dataclass(frozen=True)
class ODReport:
    d: int
    K0: CyclicResult
    K1_order: int
    unit_class: str

    def to_json(self) -> dict:
        return {"d": self.d, "K0": self.K0.to_json(), "K1": {"order": self.K1_order},
                "unit_class": self.unit_class}


def od_ktheory_report(d: int) -> ODReport:
    """K_*(O_d) from the PV sequence with (beta^{-1})_* = d on K_0(B) = Z[1/d].

    K_1(B) = 0, so K_0 = coker(1 - d) and K_1 = ker(1 - d); [1] maps to [f_0],
    which is the class of 1 in Z[1/d].
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    co = pv_cokernel(1 - d, d)
    gen = "[1]" if co.order > 1 else "0"
    return ODReport(d, CyclicResult(co.order, gen), pv_kernel(1 - d, d),
                    "[1] -> [f_0] -> 1 + (d-1)Z")


@dataclass(frozen=True)
class MvnWitness:
    d: int
    isometries_ok: bool       # t_j s_j = 1 for all j
    orthogonal_ok: bool       # (s_j t_j)(s_k t_k) = 0 for j != k
    sum_ok: bool              # sum_j s_j t_j = 1
    exponent: int             # certified: exponent * [1] = 0

    @property
    def ok(self) -> bool:
        return self.isometries_ok and self.orthogonal_ok and self.sum_ok


def mvn_unit_relation(d: int) -> MvnWitness:
    """[1] = [s_j t_j] for each j and 1 = sum_j s_j t_j orthogonally, so (d-1)[1] = 0."""
    one = LeavittElement.one(d)
    s = [LeavittElement.s(d, j) for j in range(d)]
    t = [LeavittElement.t(d, j) for j in range(d)]
    iso = all(t[j] * s[j] == one for j in range(d))
    p = [s[j] * t[j] for j in range(d)]
    orth = all((p[j] * p[k]).is_zero() for j in range(d) for k in range(d) if j != k)
    total = LeavittElement.zero(d)
    for q in p:
        total = total + q
    return MvnWitness(d, iso, orth, total == one, d - 1)
