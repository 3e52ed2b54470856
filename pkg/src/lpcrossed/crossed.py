"""Crossed products of matrix algebras L(L^p(X)) by finite groups and by Z.

An element sum_g a_g u_g is a :class:`CcElement`: a dict from group index to
a square complex matrix on the carrier X. The action is implemented by
measure-preserving spatial isometries w_g, so alpha_g(b) = w_g b w_g^{-1}
does not depend on p.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .groups import FiniteGroup, is_character
from .lpcore import OperatorMatrix, WeightedSpace, tensor_space
from .opnorm import NormEstimate, opnorm
from .spatial import SpatialPartialIsometry, compose, realize

INTEGRITY_TOL = 1e-9


class IntegrityError(ValueError):
    """An operator is not the regular representation of any crossed-product element."""


def _implementer_matrix(w: SpatialPartialIsometry, X: WeightedSpace) -> np.ndarray:
    if w.domain_space != X or w.codomain_space != X:
        raise ValueError("implementer does not act on the carrier")
    if len(w.map) != X.dim:
        raise ValueError("implementer must be a bijection of the carrier")
    for x, y in w.map.items():
        if X.weights[X.index(x)] != X.weights[X.index(y)]:
            raise ValueError("implementers must preserve the carrier measure")
    return realize(w, 1).entries


def _same_isometry(s: SpatialPartialIsometry, t: SpatialPartialIsometry, tol: float = 1e-12) -> bool:
    """Same point map; phases equal up to rounding."""
    return s.map == t.map and all(abs(s.phases[x] - t.phases[x]) <= tol for x in s.map)


@dataclass(frozen=True, eq=False)
class IsometricAction:
    group: FiniteGroup
    carrier: WeightedSpace
    implementers: tuple
    W: tuple = field(init=False, repr=False)

    def __post_init__(self):
        G, X = self.group, self.carrier
        imps = tuple(self.implementers)
        if len(imps) != G.order:
            raise ValueError("need one implementer per group element")
        W = tuple(_implementer_matrix(w, X) for w in imps)
        if imps[G.identity] != SpatialPartialIsometry.identity(X):
            raise ValueError("identity must be implemented by the identity")
        for g in range(G.order):
            for h in range(G.order):
                if not _same_isometry(compose(imps[g], imps[h]), imps[G.mul(g, h)]):
                    raise ValueError(f"w_gh != w_g w_h for g={G.elements[g]!r}, h={G.elements[h]!r}")
        object.__setattr__(self, "implementers", imps)
        object.__setattr__(self, "W", W)

    @classmethod
    def trivial(cls, G: FiniteGroup, X: WeightedSpace) -> "IsometricAction":
        idw = SpatialPartialIsometry.identity(X)
        return cls(G, X, (idw,) * G.order)

    @classmethod
    def translation(cls, G: FiniteGroup, X: WeightedSpace | None = None) -> "IsometricAction":
        """G acting on itself by left translation; coefficients C(G) are the diagonals."""
        if X is None:
            X = WeightedSpace.counting(G.elements)
        imps = tuple(SpatialPartialIsometry.from_permutation(X, [G.mul(g, x) for x in range(G.order)])
                     for g in range(G.order))
        return cls(G, X, imps)

    @classmethod
    def diagonal_character(cls, G: FiniteGroup, X: WeightedSpace, chars) -> "IsometricAction":
        """w_g = diag(chars[x][g]) with one character per atom; acts on M_n by phases."""
        imps = tuple(SpatialPartialIsometry.from_permutation(
            X, list(range(X.dim)), [chars[x][g] for x in range(X.dim)]) for g in range(G.order))
        return cls(G, X, imps)

    # the group interface shared with ZAction
    @property
    def identity(self):
        return self.group.identity

    def mul(self, g, h):
        return self.group.mul(g, h)

    def inv(self, g):
        return self.group.inv(g)

    def alpha(self, g, b: np.ndarray) -> np.ndarray:
        W = self.W[g]
        return W @ b @ W.conj().T

    def label(self, g):
        return self.group.elements[g]


@dataclass(frozen=True, eq=False)
class ZAction:
    """Z acting on L(L^p(X)) through the powers of one measure-preserving bijection."""
    carrier: WeightedSpace
    generator: SpatialPartialIsometry
    W1: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "W1", _implementer_matrix(self.generator, self.carrier))

    @classmethod
    def trivial(cls, X: WeightedSpace) -> "ZAction":
        return cls(X, SpatialPartialIsometry.identity(X))

    identity = 0

    def mul(self, g, h):
        return g + h

    def inv(self, g):
        return -g

    def power(self, n: int) -> np.ndarray:
        W = self.W1 if n >= 0 else self.W1.conj().T
        return np.linalg.matrix_power(W, abs(n))

    def alpha(self, n, b):
        W = self.power(n)
        return W @ b @ W.conj().T

    def label(self, n):
        return n


@dataclass(frozen=True, eq=False)
class CcElement:
    action: object
    coeffs: dict

    def __post_init__(self):
        n = self.action.carrier.dim
        out = {}
        for g, c in self.coeffs.items():
            c = np.asarray(c.entries if isinstance(c, OperatorMatrix) else c, dtype=complex)
            if c.shape != (n, n):
                raise ValueError(f"coefficient at {g!r} has shape {c.shape}, expected {(n, n)}")
            if np.any(c):
                out[g] = c
        object.__setattr__(self, "coeffs", out)

    def coeff(self, g) -> np.ndarray:
        n = self.action.carrier.dim
        return self.coeffs.get(g, np.zeros((n, n), dtype=complex))

    @property
    def support(self):
        return sorted(self.coeffs)

    def __add__(self, other):
        _same_action(self, other)
        keys = set(self.coeffs) | set(other.coeffs)
        return CcElement(self.action, {g: self.coeff(g) + other.coeff(g) for g in keys})

    def __sub__(self, other):
        return self + other * (-1)

    def __mul__(self, scalar):
        return CcElement(self.action, {g: scalar * c for g, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __matmul__(self, other):
        return convolve(self, other)

    def allclose(self, other, atol=1e-10) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(np.allclose(self.coeff(g), other.coeff(g), atol=atol, rtol=0) for g in keys)


def _same_action(a, b):
    if a.action is not b.action:
        raise ValueError("elements belong to different actions")


def single(action, b, g=None) -> CcElement:
    """b u_g (g defaults to the identity)."""
    g = action.identity if g is None else g
    return CcElement(action, {g: b})


def unit(action, g=None) -> CcElement:
    return single(action, np.eye(action.carrier.dim, dtype=complex), g)


def random_element(action, rng, support=None, diagonal=False, integer=False) -> CcElement:
    n = action.carrier.dim
    support = range(action.group.order) if support is None else support
    coeffs = {}
    for g in support:
        if integer:
            c = rng.integers(-3, 4, size=(n, n)) + 1j * rng.integers(-3, 4, size=(n, n))
        else:
            c = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        if diagonal:
            c = np.diag(np.diag(c))
        coeffs[g] = c
    return CcElement(action, coeffs)


def convolve(a: CcElement, b: CcElement) -> CcElement:
    """(ab)_g = sum_h a_h alpha_h(b_{h^{-1} g})."""
    _same_action(a, b)
    act = a.action
    out = {}
    for h, ah in a.coeffs.items():
        for k, bk in b.coeffs.items():
            g = act.mul(h, k)
            term = ah @ act.alpha(h, bk)
            out[g] = out[g] + term if g in out else term
    return CcElement(act, out)


# ---------------------------------------------------------------------------
# regular representation

PI0_CHOICES = ("identity", "twisted")


def _pi0_space(action: IsometricAction, pi0: str) -> WeightedSpace:
    if pi0 == "identity":
        return action.carrier
    if pi0 == "twisted":
        return tensor_space(WeightedSpace.counting(action.group.elements), action.carrier)
    raise ValueError(f"pi0 must be one of {PI0_CHOICES}, got {pi0!r}")


def _pi0(action: IsometricAction, b: np.ndarray, pi0: str) -> np.ndarray:
    if pi0 == "identity":
        return b
    G = action.group
    n = action.carrier.dim
    out = np.zeros((G.order * n, G.order * n), dtype=complex)
    for g in range(G.order):
        out[g * n:(g + 1) * n, g * n:(g + 1) * n] = action.alpha(g, b)
    return out


def regular_space(action: IsometricAction, pi0: str = "twisted") -> WeightedSpace:
    return tensor_space(WeightedSpace.counting(action.group.elements), _pi0_space(action, pi0))


def regular_representation(a: CcElement, p: float = 2, pi0: str = "twisted") -> OperatorMatrix:
    """Block (h, k) is pi0(alpha_{h^{-1}}(a_{h k^{-1}}))."""
    act = a.action
    G = act.group
    S = regular_space(act, pi0)
    m = S.dim // G.order
    out = np.zeros((S.dim, S.dim), dtype=complex)
    for g, ag in a.coeffs.items():
        for h in range(G.order):
            k = G.mul(G.inv(g), h)
            out[h * m:(h + 1) * m, k * m:(k + 1) * m] = _pi0(act, act.alpha(G.inv(h), ag), pi0)
    return OperatorMatrix(S, S, out)


def translation_isometry(action: IsometricAction, g: int, pi0: str = "twisted") -> OperatorMatrix:
    """s_g : L^p(inner) -> L^p(G x inner), xi -> delta_g (x) xi."""
    inner = _pi0_space(action, pi0)
    S = regular_space(action, pi0)
    m = inner.dim
    e = np.zeros((S.dim, m), dtype=complex)
    e[g * m:(g + 1) * m, :] = np.eye(m)
    return OperatorMatrix(inner, S, e)


def _twisted_blocks(action, R: np.ndarray):
    """Index sets splitting the twisted regular space into |G| invariant pieces."""
    G = action.group
    n = action.carrier.dim
    m = G.order * n
    return [np.array([h * m + gp * n + x for h in range(G.order) for x in range(n)])
            for gp in range(G.order)]


def reduced_norm(a: CcElement, p: float, pi0: str = "twisted", **kwargs) -> NormEstimate:
    """Norm of the regular representation relative to the chosen pi0.

    For pi0 = twisted the space splits as an l^p direct sum of |G| invariant
    pieces, piece g' carrying the regular representation induced from
    alpha_{g'}. Each piece is the first one conjugated by the isometry
    1 (x) w_{g'}, which is checked here, so the norm is computed on one piece.
    """
    act = a.action
    R = regular_representation(a, p, pi0)
    if not a.coeffs:
        return opnorm(R, p)
    # seed with s_{g^{-1}} xi: then t_1 R s_{g^{-1}} = a_g shows ratio >= ||a_g xi|| / ||xi||
    if pi0 != "twisted":
        starts = _coefficient_starts(a, p, R.domain, "identity", kwargs)
        return opnorm(R, p, **_with_starts(p, kwargs, starts))
    G = act.group
    pieces = _twisted_blocks(act, R.entries)
    base = pieces[G.identity]
    sub = R.entries[np.ix_(base, base)]
    for gp, idx in enumerate(pieces):
        U = np.kron(np.eye(G.order), act.W[gp])
        if not np.allclose(R.entries[np.ix_(idx, idx)], U @ sub @ U.conj().T, atol=1e-12, rtol=0):
            raise IntegrityError("twisted pieces are not conjugate; action is inconsistent")
    piece_space = WeightedSpace(tuple(R.domain.atoms[i] for i in base), R.domain.weights[base])
    A = OperatorMatrix(piece_space, piece_space, sub)
    starts = _coefficient_starts(a, p, piece_space, "identity", kwargs)
    est = opnorm(A, p, **_with_starts(p, kwargs, starts))
    x = np.zeros(R.domain.dim, dtype=complex)
    x[base] = est.witness.coords
    from .lpcore import LpVector
    w = LpVector(R.domain, x)
    return NormEstimate(est.ratio(A, p), w, True, est.iterations, est.converged)


def _with_starts(p, kwargs, starts):
    if p in (1, 2):
        return {}
    kw = dict(kwargs)
    kw["starts"] = list(kw.get("starts") or []) + starts
    return kw


def _coefficient_starts(a, p, space, pi0, kwargs):
    if p in (1, 2):
        return []
    act = a.action
    G, X, n = act.group, act.carrier, act.carrier.dim
    starts = []
    for g, ag in a.coeffs.items():
        est = opnorm(OperatorMatrix(X, X, ag), p)
        x = np.zeros(space.dim, dtype=complex)
        k = G.inv(g)
        x[k * n:(k + 1) * n] = est.witness.coords
        starts.append(x)
    return starts


def coefficient_norms(a: CcElement, p: float) -> list:
    X = a.action.carrier
    return [opnorm(OperatorMatrix(X, X, c), p).value for c in a.coeffs.values()]


def l1_norm(a: CcElement, p: float) -> float:
    return float(sum(coefficient_norms(a, p)))


def sup_norm(a: CcElement, p: float) -> float:
    return float(max(coefficient_norms(a, p), default=0.0))


def coefficient(a_op, g, pi0: str = "twisted", action=None, tol: float = INTEGRITY_TOL) -> np.ndarray:
    """E_g: the g-th coefficient, from a CcElement or from its regular representation.

    For an operator, every block (h, k) with h k^{-1} = g must agree (after
    undoing alpha_{h^{-1}} and pi0) with the block at h = 1; otherwise the
    operator is not a crossed-product image and IntegrityError is raised.
    """
    if isinstance(a_op, CcElement):
        return a_op.coeff(g)
    if action is None:
        raise ValueError("an action is needed to read coefficients off an operator")
    G, n = action.group, action.carrier.dim
    R = a_op.entries if isinstance(a_op, OperatorMatrix) else np.asarray(a_op)
    m = R.shape[0] // G.order

    def block(h, k):
        return R[h * m:(h + 1) * m, k * m:(k + 1) * m]

    def unpi0(B):
        if pi0 == "identity":
            return [B]
        # piece g' holds alpha_{g'}(b); undo each
        return [action.alpha(G.inv(gp), B[gp * n:(gp + 1) * n, gp * n:(gp + 1) * n])
                for gp in range(G.order)]

    e = G.identity
    cand = unpi0(block(e, G.inv(g)))
    val = cand[0]
    for h in range(G.order):
        k = G.mul(G.inv(g), h)
        for c in unpi0(block(h, k)):
            if not np.allclose(action.alpha(h, c), val, atol=tol, rtol=0):
                raise IntegrityError(f"blocks for g={G.elements[g]!r} disagree at h={G.elements[h]!r}")
    return val


def extract_element(R, action, pi0: str = "twisted") -> CcElement:
    """Inverse of regular_representation on its image."""
    # every entry must be covered by some block (h, k); zero blocks outside are implied
    return CcElement(action, {g: coefficient(R, g, pi0, action) for g in range(action.group.order)})


def conditional_expectation(a: CcElement) -> np.ndarray:
    return a.coeff(a.action.identity)


def dual_action(a: CcElement, tau) -> CcElement:
    G = a.action.group
    if not G.is_abelian():
        raise ValueError("dual action needs an abelian group")
    tau = np.asarray(tau, dtype=complex)
    if not is_character(G, tau):
        raise ValueError("tau is not a character")
    return CcElement(a.action, {g: np.conj(tau[g]) * c for g, c in a.coeffs.items()})


def dual_implementer(action: IsometricAction, tau, pi0: str = "twisted") -> OperatorMatrix:
    """Diagonal w_tau with (w_tau xi)(g, .) = conj(tau(g)) xi(g, .)."""
    S = regular_space(action, pi0)
    m = S.dim // action.group.order
    d = np.repeat(np.conj(np.asarray(tau, dtype=complex)), m)
    return OperatorMatrix(S, S, np.diag(d))


def multiplier_left(g, a: CcElement) -> CcElement:
    """u_g a: coefficient at h is alpha_g(a_{g^{-1} h})."""
    act = a.action
    return CcElement(act, {act.mul(g, k): act.alpha(g, c) for k, c in a.coeffs.items()})


def multiplier_right(g, a: CcElement) -> CcElement:
    """a u_g: coefficient at h is a_{h g^{-1}}."""
    act = a.action
    return CcElement(act, {act.mul(k, g): c for k, c in a.coeffs.items()})


# ---------------------------------------------------------------------------
# Z by finite sections

@dataclass(frozen=True)
class WindowReport:
    windows: tuple
    lower_bounds: tuple
    upper_bound: float
    converged: tuple

    def to_json(self) -> dict:
        return {"windows": list(self.windows), "lower_bounds": list(self.lower_bounds),
                "upper_bound": self.upper_bound, "converged": list(self.converged)}


def z_window_operator(a: CcElement, W: int) -> OperatorMatrix:
    """Compression of the regular representation (pi0 = id) to {-W..W} x X."""
    act = a.action
    X = act.carrier
    n = X.dim
    S = tensor_space(WeightedSpace.counting(range(-W, W + 1)), X)
    out = np.zeros((S.dim, S.dim), dtype=complex)
    for g, ag in a.coeffs.items():
        for h in range(-W, W + 1):
            k = h - g
            if -W <= k <= W:
                i, j = h + W, k + W
                out[i * n:(i + 1) * n, j * n:(j + 1) * n] = act.alpha(-h, ag)
    return OperatorMatrix(S, S, out)


def windowed_z_norm(a: CcElement, p: float, windows) -> WindowReport:
    if not isinstance(a.action, ZAction):
        raise ValueError("windowed norms are for crossed products by Z")
    windows = tuple(int(W) for W in windows)
    if any(w2 <= w1 for w1, w2 in zip(windows, windows[1:])):
        raise ValueError("windows must be strictly increasing")
    radius = max((abs(g) for g in a.coeffs), default=0)
    if windows and windows[0] < radius:
        raise ValueError(f"window {windows[0]} is smaller than the support radius {radius}")
    n = a.action.carrier.dim
    lows, convs = [], []
    best, prev_witness, prev_W = 0.0, None, None
    for W in windows:
        A = z_window_operator(a, W)
        kw = {}
        if p not in (1, 2) and prev_witness is not None:
            pad = (W - prev_W) * n
            kw["starts"] = [np.concatenate([np.zeros(pad), prev_witness, np.zeros(pad)])]
        est = opnorm(A, p, **kw)
        # compressions to nested windows have nondecreasing norms; keep the best certified value
        if est.value >= best:
            best, prev_witness = est.value, est.witness.coords
        else:
            pad = (W - prev_W) * n
            prev_witness = np.concatenate([np.zeros(pad), prev_witness, np.zeros(pad)])
        prev_W = W
        lows.append(best)
        convs.append(est.converged)
    return WindowReport(windows, tuple(lows), l1_norm(a, p), tuple(convs))
