"""The Leavitt algebra L_d in normal form.

A monomial s_mu t_nu is stored as the pair of words (mu, nu) with
s_mu = s_{mu_1} ... s_{mu_n} and t_nu = t_{nu_m} ... t_{nu_1} (so t_nu is the
reverse of s_nu). Products use t_j s_k = delta_{jk}; the relation
sum_j s_j t_j = 1 is oriented as

    s_{mu (d-1)} t_{nu (d-1)}  ->  s_mu t_nu - sum_{j < d-1} s_{mu j} t_{nu j}

so a normal form has no monomial whose two words both end in d - 1.
Coefficients may be any exact or floating number type.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lpcore import OperatorMatrix, WeightedSpace
from .opnorm import opnorm

Word = tuple


def _add(terms: dict, key, c):
    v = terms.get(key, 0) + c
    if v == 0:
        terms.pop(key, None)
    else:
        terms[key] = v


def normalize(d: int, terms: dict) -> dict:
    """Rewrite to normal form; terminates since the reducible monomial shrinks."""
    out = {}
    stack = [(k, c) for k, c in terms.items() if c != 0]
    top = d - 1
    while stack:
        (mu, nu), c = stack.pop()
        if mu and nu and mu[-1] == top and nu[-1] == top:
            stack.append(((mu[:-1], nu[:-1]), c))
            for j in range(top):
                stack.append(((mu[:-1] + (j,), nu[:-1] + (j,)), -c))
        else:
            _add(out, (mu, nu), c)
    return out


def _monomial_product(m1, m2):
    """(s_mu t_nu)(s_al t_be) as a monomial, or None when it vanishes."""
    (mu, nu), (al, be) = m1, m2
    n = min(len(nu), len(al))
    if nu[:n] != al[:n]:
        return None
    if len(al) >= len(nu):
        return mu + al[n:], be
    return mu, be + nu[n:]


@dataclass(frozen=True)
class LeavittElement:
    d: int
    terms: dict

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        for (mu, nu) in self.terms:
            if any(not 0 <= x < self.d for x in mu + nu):
                raise ValueError(f"letter out of range in {(mu, nu)}")
        object.__setattr__(self, "terms", normalize(self.d, {(tuple(m), tuple(n)): c
                                                            for (m, n), c in self.terms.items()}))

    @classmethod
    def one(cls, d, c=1) -> "LeavittElement":
        return cls(d, {((), ()): c})

    @classmethod
    def zero(cls, d) -> "LeavittElement":
        return cls(d, {})

    @classmethod
    def s(cls, d, *word, c=1) -> "LeavittElement":
        return cls(d, {(tuple(word), ()): c})

    @classmethod
    def t(cls, d, *word, c=1) -> "LeavittElement":
        """t_word = t_{w_m} ... t_{w_1}; t(d, j) is the generator t_j."""
        return cls(d, {((), tuple(word)): c})

    @classmethod
    def monomial(cls, d, mu, nu, c=1) -> "LeavittElement":
        return cls(d, {(tuple(mu), tuple(nu)): c})

    def _check(self, other):
        if not isinstance(other, LeavittElement):
            return NotImplemented
        if other.d != self.d:
            raise ValueError(f"d mismatch: {self.d} vs {other.d}")
        return None

    def __add__(self, other):
        if isinstance(other, (int, float, complex)) or not hasattr(other, "terms"):
            other = LeavittElement.one(self.d, other)
        self._check(other)
        t = dict(self.terms)
        for k, c in other.terms.items():
            _add(t, k, c)
        return LeavittElement(self.d, t)

    __radd__ = __add__

    def __neg__(self):
        return LeavittElement(self.d, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LeavittElement):
            return multiply(self, other)
        return LeavittElement(self.d, {k: c * other for k, c in self.terms.items()})

    def __rmul__(self, scalar):
        return LeavittElement(self.d, {k: scalar * c for k, c in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, LeavittElement):
            return NotImplemented
        return self.d == other.d and self.terms == other.terms

    def __hash__(self):
        return hash((self.d, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((max(len(m), len(n)) for m, n in self.terms), default=0)

    def to_json(self) -> list:
        return [{"mu": list(m), "nu": list(n), "c": [complex(c).real, complex(c).imag]}
                for (m, n), c in sorted(self.terms.items())]

    @classmethod
    def from_json(cls, d: int, data) -> "LeavittElement":
        terms = {}
        for i, item in enumerate(data):
            try:
                re, im = item["c"]
                key = (tuple(int(x) for x in item["mu"]), tuple(int(x) for x in item["nu"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"element[{i}]: expected {{'mu','nu','c':[re,im]}} ({exc})") from exc
            _add(terms, key, complex(re, im))
        return cls(d, terms)


def multiply(a: LeavittElement, b: LeavittElement) -> LeavittElement:
    if a.d != b.d:
        raise ValueError(f"d mismatch: {a.d} vs {b.d}")
    out = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            m = _monomial_product(m1, m2)
            if m is not None:
                _add(out, m, c1 * c2)
    return LeavittElement(a.d, out)


def omega(m) -> LeavittElement:
    """Sum_{j,k} m_jk s_j t_k: the unital copy of M_d inside L_d."""
    m = np.asarray(m, dtype=object) if not isinstance(m, np.ndarray) else m
    d = m.shape[0]
    terms = {}
    for j in range(d):
        for k in range(d):
            c = m[j, k]
            if c != 0:
                _add(terms, ((j,), (k,)), c.item() if hasattr(c, "item") else c)
    return LeavittElement(d, terms)


def random_element(d: int, rng, n_terms: int = 4, max_len: int = 2, integer: bool = True) -> LeavittElement:
    terms = {}
    for _ in range(n_terms):
        mu = tuple(int(x) for x in rng.integers(0, d, size=rng.integers(0, max_len + 1)))
        nu = tuple(int(x) for x in rng.integers(0, d, size=rng.integers(0, max_len + 1)))
        if integer:
            c = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
        else:
            c = complex(rng.normal(), rng.normal())
        _add(terms, (mu, nu), c)
    return LeavittElement(d, terms)


# ---------------------------------------------------------------------------
# spatial representations on l^p({0, ..., M-1})

def _generator_maps(d, M, perm):
    """Index maps of s_j: m -> d m + perm[j], kept only inside the window."""
    return [{m: d * m + perm[j] for m in range(M) if d * m + perm[j] < M} for j in range(d)]


def _monomial_matrix(mu, nu, maps, M):
    """s_mu t_nu as a 0/1 matrix: chase t_nu (reverse maps) then s_mu."""
    inv = [{v: k for k, v in mp.items()} for mp in maps]
    out = np.zeros((M, M))
    for n in range(M):
        x, ok = _apply_t(nu, inv, n)
        if not ok:
            continue
        x, ok = _apply_s(mu, maps, x)
        if ok:
            out[x, n] = 1.0
    return out


def _apply_t(nu, inv, n):
    # t_nu = t_{nu_m} ... t_{nu_1}: the rightmost factor t_{nu_1} acts first
    x = n
    for j in nu:
        if x not in inv[j]:
            return x, False
        x = inv[j][x]
    return x, True


def _apply_s(mu, maps, n):
    # s_mu = s_{mu_1} ... s_{mu_k}: s_{mu_k} acts first
    x = n
    for j in reversed(mu):
        if x not in maps[j]:
            return x, False
        x = maps[j][x]
    return x, True


def alt_representation(x: LeavittElement, M: int, p: float = 2, perm=None) -> OperatorMatrix:
    d = x.d
    if M < d:
        raise ValueError(f"window M={M} smaller than d={d}")
    perm = tuple(range(d)) if perm is None else tuple(perm)
    if sorted(perm) != list(range(d)):
        raise ValueError("perm must be a permutation of 0..d-1")
    maps = _generator_maps(d, M, perm)
    out = np.zeros((M, M), dtype=complex)
    for (mu, nu), c in x.terms.items():
        out += complex(c) * _monomial_matrix(mu, nu, maps, M)
    X = WeightedSpace.counting(M)
    return OperatorMatrix(X, X, out)


def base_d_representation(x: LeavittElement, M: int, p: float = 2) -> OperatorMatrix:
    """s_j delta_m = delta_{dm+j} on l^p(N), compressed to {0, ..., M-1}."""
    return alt_representation(x, M, p, None)


@dataclass(frozen=True)
class LeavittNormReport:
    windows: tuple
    lower_bounds: tuple
    upper_bound: float

    def to_json(self) -> dict:
        return {"windows": list(self.windows), "lower_bounds": list(self.lower_bounds),
                "upper_bound": self.upper_bound}


def norm_estimate(x: LeavittElement, p: float, windows, perm=None) -> LeavittNormReport:
    """Finite-section lower bounds and the coefficient l^1 upper bound.

    Normal-form monomials map windows into windows monotonically, so each
    window realization is the compression of the l^p(N) operator and the
    bounds are nondecreasing; for p outside {1, 2} the running maximum is
    reported, warm-started from the previous witness.
    """
    windows = tuple(int(M) for M in windows)
    if any(b <= a for a, b in zip(windows, windows[1:])):
        raise ValueError("windows must be strictly increasing")
    lows, best, prev = [], 0.0, None
    for M in windows:
        A = alt_representation(x, M, p, perm)
        kw = {}
        if p not in (1, 2) and prev is not None:
            kw["starts"] = [np.concatenate([prev, np.zeros(M - prev.size)])]
        est = opnorm(A, p, **kw)
        if est.value >= best:
            best, prev = est.value, est.witness.coords
        else:
            prev = np.concatenate([prev, np.zeros(M - prev.size)])
        lows.append(best)
    upper = float(sum(abs(complex(c)) for c in x.terms.values()))
    return LeavittNormReport(windows, tuple(lows), upper)
