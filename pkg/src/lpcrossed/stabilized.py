"""Symbolic model of the stabilized UHF crossed product by Z.

B is spanned by words e_{j,k} (x) e_{l_1,m_1} (x) ... (x) e_{l_r,m_r} (x) 1_{>r}
with j, k >= 0 and l_i, m_i in {0, ..., d-1}. The shift v on
Z_{>=0} x Z^N (m = d m_0 + k_0 moves to (m_0, k_0, ...)) induces
beta = Ad(v), which splits a head index into base-d digits; its inverse
merges the first tail pair back into the head. Elements of the crossed
product are finite sums b_n u_n with b_n in B.

Coefficients are meant to be exact (ints, Fractions, QQi) so identities can
be checked with zero tolerance; ``concrete_realize`` converts to floats.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .leavitt import LeavittElement, _add, multiply as l_multiply
from .lpcore import OperatorMatrix, WeightedSpace


class BWord(NamedTuple):
    head: tuple      # (j, k)
    tail: tuple      # ((l_1, m_1), ..., (l_r, m_r))

    @property
    def depth(self) -> int:
        return len(self.tail)


def word(j, k, *tail) -> BWord:
    return BWord((j, k), tuple(tuple(t) for t in tail))


def _raise_word(w: BWord, d: int, depth: int):
    """All words of the given depth summing to w (pad the tail with (l, l))."""
    words = [w]
    for _ in range(depth - w.depth):
        words = [BWord(x.head, x.tail + ((l, l),)) for x in words for l in range(d)]
    return words


class BElement:
    """Finite combination of B-words, stored at a common (canonical) depth."""
    __slots__ = ("d", "depth", "terms")

    def __init__(self, d: int, terms: dict, depth: int | None = None):
        if d < 2:
            raise ValueError("d must be at least 2")
        terms = {BWord(tuple(w[0]), tuple(tuple(t) for t in w[1])): c for w, c in terms.items()}
        for w in terms:
            if any(not (0 <= l < d and 0 <= m < d) for l, m in w.tail) or min(w.head) < 0:
                raise ValueError(f"index out of range in {w}")
        depth = max([w.depth for w in terms] + [0 if depth is None else depth])
        out = {}
        for w, c in terms.items():
            for x in _raise_word(w, d, depth):
                _add(out, x, c)
        self.d, self.depth, self.terms = d, depth, out

    @classmethod
    def zero(cls, d):
        return cls(d, {})

    def raised(self, depth: int) -> "BElement":
        return BElement(self.d, self.terms, depth) if depth > self.depth else self

    def __add__(self, other):
        _check_d(self, other)
        D = max(self.depth, other.depth)
        t = dict(self.raised(D).terms)
        for w, c in other.raised(D).terms.items():
            _add(t, w, c)
        return BElement(self.d, t, D)

    def __neg__(self):
        return BElement(self.d, {w: -c for w, c in self.terms.items()}, self.depth)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "BElement":
        return BElement(self.d, {w: c * x for w, x in self.terms.items()}, self.depth)

    def __mul__(self, other):
        if isinstance(other, BElement):
            return b_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, BElement):
            return NotImplemented
        if self.d != other.d:
            return False
        D = max(self.depth, other.depth)
        return self.raised(D).terms == other.raised(D).terms

    def __hash__(self):
        raise TypeError("BElement is unhashable")

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def max_head(self) -> int:
        return max((max(w.head) for w in self.terms), default=-1)

    def __repr__(self):
        return f"BElement(d={self.d}, depth={self.depth}, terms={self.terms})"


def _check_d(a, b):
    if a.d != b.d:
        raise ValueError(f"d mismatch: {a.d} vs {b.d}")


def b_multiply(a: BElement, b: BElement) -> BElement:
    _check_d(a, b)
    D = max(a.depth, b.depth)
    A, B = a.raised(D).terms, b.raised(D).terms
    out = {}
    for w1, c1 in A.items():
        for w2, c2 in B.items():
            if w1.head[1] != w2.head[0]:
                continue
            if any(t1[1] != t2[0] for t1, t2 in zip(w1.tail, w2.tail)):
                continue
            w = BWord((w1.head[0], w2.head[1]), tuple((t1[0], t2[1]) for t1, t2 in zip(w1.tail, w2.tail)))
            _add(out, w, c1 * c2)
    return BElement(a.d, out, D)


def _beta_word(w: BWord, d: int) -> BWord:
    j0, l0 = divmod(w.head[0], d)
    k0, m0 = divmod(w.head[1], d)
    return BWord((j0, k0), ((l0, m0),) + w.tail)


def _beta_inv_word(w: BWord, d: int) -> BWord:
    (l1, m1), rest = w.tail[0], w.tail[1:]
    return BWord((d * w.head[0] + l1, d * w.head[1] + m1), rest)


def beta(b: BElement) -> BElement:
    """v b v^{-1}: split each head index into quotient and last base-d digit."""
    return BElement(b.d, {_beta_word(w, b.d): c for w, c in b.terms.items()}, b.depth + 1)


def beta_inv(b: BElement) -> BElement:
    """v^{-1} b v: merge the first tail pair into the head (depth-0 terms are raised first)."""
    b = b.raised(max(b.depth, 1))
    return BElement(b.d, {_beta_inv_word(w, b.d): c for w, c in b.terms.items()}, b.depth - 1)


def beta_power(b: BElement, n: int) -> BElement:
    step = beta if n >= 0 else beta_inv
    for _ in range(abs(n)):
        b = step(b)
    return b


def f(n: int, d: int, c=1) -> BElement:
    """f_n = sum_{m < d^n} e_{m,m} (x) 1_{>0}."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return BElement(d, {word(m, m): c for m in range(d ** n)})


# ---------------------------------------------------------------------------
# the crossed product by Z

class CrossedElement:
    __slots__ = ("d", "coeffs")

    def __init__(self, d: int, coeffs: dict):
        self.d = d
        self.coeffs = {int(n): b for n, b in coeffs.items() if not b.is_zero()}
        for b in self.coeffs.values():
            if b.d != d:
                raise ValueError("coefficient has the wrong d")

    def coeff(self, n) -> BElement:
        return self.coeffs.get(n, BElement.zero(self.d))

    def __add__(self, other):
        keys = set(self.coeffs) | set(other.coeffs)
        return CrossedElement(self.d, {n: self.coeff(n) + other.coeff(n) for n in keys})

    def __neg__(self):
        return CrossedElement(self.d, {n: -b for n, b in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return CrossedElement(self.d, {n: b.scale(c) for n, b in self.coeffs.items()})

    def __mul__(self, other):
        if isinstance(other, CrossedElement):
            return x_multiply(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if not isinstance(other, CrossedElement):
            return NotImplemented
        keys = set(self.coeffs) | set(other.coeffs)
        return self.d == other.d and all(self.coeff(n) == other.coeff(n) for n in keys)

    __hash__ = None

    def __repr__(self):
        return f"CrossedElement(d={self.d}, coeffs={self.coeffs})"


def at(b: BElement, n: int = 0) -> CrossedElement:
    """b u_n."""
    return CrossedElement(b.d, {n: b})


def x_multiply(a: CrossedElement, b: CrossedElement) -> CrossedElement:
    """(sum a_m u_m)(sum b_n u_n) = sum a_m beta^m(b_n) u_{m+n}."""
    _check_d(a, b)
    out = {}
    for m, am in a.coeffs.items():
        for n, bn in b.coeffs.items():
            term = am * beta_power(bn, m)
            out[m + n] = out[m + n] + term if m + n in out else term
    return CrossedElement(a.d, out)


def left_mult(m: int, x: CrossedElement) -> CrossedElement:
    """u_m x."""
    return CrossedElement(x.d, {m + n: beta_power(b, m) for n, b in x.coeffs.items()})


def right_mult(m: int, x: CrossedElement) -> CrossedElement:
    """x u_m."""
    return CrossedElement(x.d, {n + m: b for n, b in x.coeffs.items()})


def ad_u(m: int, x: CrossedElement) -> CrossedElement:
    """u_m x u_{-m}."""
    return right_mult(-m, left_mult(m, x))


def coefficient(x: CrossedElement, n: int) -> BElement:
    return x.coeff(n)


# ---------------------------------------------------------------------------
# the corner map from L_d

def sigma_generators(d: int, c=1):
    """sigma(s_j) = u_1 (e_{j,0} (x) 1) and sigma(t_j) = (e_{0,j} (x) 1) u_{-1}."""
    S = [left_mult(1, at(BElement(d, {word(j, 0): c}))) for j in range(d)]
    T = [right_mult(-1, at(BElement(d, {word(0, j): c}))) for j in range(d)]
    return S, T


def sigma(x: LeavittElement) -> CrossedElement:
    d = x.d
    S, T = sigma_generators(d)
    out = CrossedElement(d, {})
    for (mu, nu), c in x.terms.items():
        if not mu and not nu:
            term = at(f(0, d))
        else:
            factors = [S[j] for j in mu] + [T[j] for j in reversed(nu)]
            term = factors[0]
            for y in factors[1:]:
                term = x_multiply(term, y)
        out = out + term.scale(c)
    return out


# ---------------------------------------------------------------------------
# (M_d)^{(x) n} (x) L_d and the maps psi, epsilon, sigma_n

class LevelElement:
    """Sum of e_{J,K} (x) a with J, K in {0..d-1}^n and a in L_d."""
    __slots__ = ("d", "n", "terms")

    def __init__(self, d: int, n: int, terms: dict):
        self.d, self.n = d, n
        out = {}
        for (J, K), a in terms.items():
            J, K = tuple(J), tuple(K)
            if len(J) != n or len(K) != n:
                raise ValueError(f"matrix-unit slot count must be {n}")
            if a.d != d:
                raise ValueError("Leavitt factor has the wrong d")
            cur = out.get((J, K))
            s = a if cur is None else cur + a
            if s.is_zero():
                out.pop((J, K), None)
            else:
                out[(J, K)] = s
        self.terms = out

    @classmethod
    def of(cls, a: LeavittElement) -> "LevelElement":
        return cls(a.d, 0, {((), ()): a})

    def __add__(self, other):
        if (self.d, self.n) != (other.d, other.n):
            raise ValueError("level mismatch")
        t = dict(self.terms)
        for k, a in other.terms.items():
            t[k] = t[k] + a if k in t else a
        return LevelElement(self.d, self.n, t)

    def __mul__(self, other):
        if (self.d, self.n) != (other.d, other.n):
            raise ValueError("level mismatch")
        out = {}
        for (J, K), a in self.terms.items():
            for (J2, K2), b in other.terms.items():
                if K == J2:
                    ab = l_multiply(a, b)
                    out[(J, K2)] = out[(J, K2)] + ab if (J, K2) in out else ab
        return LevelElement(self.d, self.n, out)

    def __eq__(self, other):
        if not isinstance(other, LevelElement):
            return NotImplemented
        return (self.d, self.n, self.terms) == (other.d, other.n, other.terms)

    __hash__ = None

    def __repr__(self):
        return f"LevelElement(d={self.d}, n={self.n}, terms={self.terms})"


def psi0_generators(d: int):
    """psi_0(s_j) = sum_l e_{j,l} (x) s_l and psi_0(t_j) = sum_l e_{l,j} (x) t_l."""
    S = [LevelElement(d, 1, {((j,), (l,)): LeavittElement.s(d, l) for l in range(d)}) for j in range(d)]
    T = [LevelElement(d, 1, {((l,), (j,)): LeavittElement.t(d, l) for l in range(d)}) for j in range(d)]
    return S, T


def psi0(a: LeavittElement) -> LevelElement:
    d = a.d
    S, T = psi0_generators(d)
    one = LevelElement(d, 1, {((l,), (l,)): LeavittElement.one(d) for l in range(d)})
    out = LevelElement(d, 1, {})
    for (mu, nu), c in a.terms.items():
        term = one
        for y in [S[j] for j in mu] + [T[j] for j in reversed(nu)]:
            term = term * y
        out = out + LevelElement(d, 1, {k: v * c for k, v in term.terms.items()})
    return out


def psi(x: LevelElement) -> LevelElement:
    """psi_n = id (x) psi_{n-1}: apply psi_0 to the L_d factor, new slot last."""
    out = LevelElement(x.d, x.n + 1, {})
    for (J, K), a in x.terms.items():
        for ((j,), (k,)), b in psi0(a).terms.items():
            out = out + LevelElement(x.d, x.n + 1, {(J + (j,), K + (k,)): b})
    return out


def psi_inv(x: LevelElement) -> LevelElement:
    """Inverse of psi: e_{J j, K k} (x) a -> e_{J,K} (x) s_j a t_k."""
    if x.n == 0:
        raise ValueError("psi_inv needs at least one matrix slot")
    d = x.d
    out = LevelElement(d, x.n - 1, {})
    for (J, K), a in x.terms.items():
        b = LeavittElement.s(d, J[-1]) * a * LeavittElement.t(d, K[-1])
        out = out + LevelElement(d, x.n - 1, {(J[:-1], K[:-1]): b})
    return out


def epsilon(x: LevelElement) -> LevelElement:
    """epsilon_n(a) = e_{0,0} (x) a."""
    return LevelElement(x.d, x.n + 1, {((0,) + J, (0,) + K): a for (J, K), a in x.terms.items()})


def sigma_n(x: LevelElement) -> CrossedElement:
    """sigma_0 = sigma; sigma_n = Ad(u_{-1}) o sigma_{n-1} o psi_{n-1}^{-1}."""
    if x.n == 0:
        return sigma(x.terms.get(((), ()), LeavittElement.zero(x.d)))
    return ad_u(-1, sigma_n(psi_inv(x)))


# ---------------------------------------------------------------------------
# concrete compression on l^p({0..M-1}) (x) L^p(Z^N, lambda^N)

def window_space(d: int, M: int, N: int) -> WeightedSpace:
    import itertools
    atoms = [(m,) + z for m in range(M) for z in itertools.product(range(d), repeat=N)]
    return WeightedSpace(atoms, np.full(len(atoms), float(d) ** (-N)))


def _index(d, N, m, digits):
    i = m
    for k in digits:
        i = i * d + k
    return i


def _digits_all(d, r):
    import itertools
    return list(itertools.product(range(d), repeat=r))


def _realize_b(b: BElement, M: int, N: int) -> np.ndarray:
    d = b.d
    size = M * d ** N
    out = np.zeros((size, size), dtype=complex)
    for w, c in b.terms.items():
        rest = _digits_all(d, N - w.depth)
        rows = tuple(l for l, _ in w.tail)
        cols = tuple(m for _, m in w.tail)
        cz = complex(c)
        for z in rest:
            out[_index(d, N, w.head[0], rows + z), _index(d, N, w.head[1], cols + z)] += cz
    return out


def shift_matrices(d: int, M: int, N: int, p: float):
    """Compressions of v and v^{-1} to the window (tail beyond N averaged out)."""
    size = M * d ** N
    V = np.zeros((size, size))
    Vinv = np.zeros((size, size))
    for m in range(M):
        for ks in _digits_all(d, N):
            col = _index(d, N, m, ks)
            m0, k0 = divmod(m, d)
            # v chi_C = d^{1/p} chi_{h(C)}; averaging the (N+1)-st digit gives 1/d
            V[_index(d, N, m0, (k0,) + ks[:-1]) if N else m0, col] += d ** (1.0 / p) / d
            if N == 0:
                # depth-0 functions: v^{-1} chi_{m} = d^{-1/p} sum_{k} chi_{dm+k}
                for k in range(d):
                    if d * m + k < M:
                        Vinv[d * m + k, col] += d ** (-1.0 / p)
                continue
            mm = d * m + ks[0]
            if mm < M:
                for z in range(d):
                    Vinv[_index(d, N, mm, ks[1:] + (z,)), col] += d ** (-1.0 / p)
    return V, Vinv


def concrete_realize(x: CrossedElement, M: int, N: int, p: float) -> OperatorMatrix:
    """Compression of pi(x) = sum b_n v^n to {0..M-1} x Z^N.

    The compression is by a contractive projection (window indicator times
    conditional expectation onto the first N digits), so its norm is a lower
    bound for the norm of x.
    """
    d = x.d
    nmax = max((abs(n) for n in x.coeffs), default=0)
    for n, b in x.coeffs.items():
        if b.max_head >= M:
            raise ValueError(f"window M={M} too small for head index {b.max_head}")
        if b.depth > N:
            raise ValueError(f"window depth N={N} too small for depth {b.depth}")
    if M % d ** nmax:
        raise ValueError(f"M={M} must be divisible by d^{nmax}")
    V, Vinv = shift_matrices(d, M, N, p)
    S = window_space(d, M, N)
    out = np.zeros((S.dim, S.dim), dtype=complex)
    for n, b in x.coeffs.items():
        U = np.linalg.matrix_power(V if n >= 0 else Vinv, abs(n))
        out += _realize_b(b, M, N) @ U
    return OperatorMatrix(S, S, out)


def random_belement(d: int, rng, n_terms: int = 3, max_head: int = 4, max_depth: int = 2) -> BElement:
    """Random B-element with small Gaussian-integer coefficients."""
    from .gaussian import QQi
    terms = {}
    for _ in range(n_terms):
        r = int(rng.integers(0, max_depth + 1))
        w = word(int(rng.integers(0, max_head)), int(rng.integers(0, max_head)),
                 *[(int(rng.integers(0, d)), int(rng.integers(0, d))) for _ in range(r)])
        c = QQi(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        _add(terms, w, c)
    return BElement(d, terms)


def random_crossed(d: int, rng, support=(-2, 2), n_coeffs: int = 2, **kw) -> CrossedElement:
    lo, hi = support
    return CrossedElement(d, {int(n): random_belement(d, rng, **kw)
                              for n in rng.integers(lo, hi + 1, size=n_coeffs)})
