"""p -> p operator norms of finite matrices.

Exact formulas for p = 1 (max column sum) and p = 2 (largest singular value);
for other p a nonlinear power method returns a lower bound together with the
vector that attains it. ``opnorm_oracle`` is a slow, independent maximizer
used only by the tests.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .lpcore import LpVector, OperatorMatrix, _check_p, unweighted_form


@dataclass(frozen=True)
class NormEstimate:
    value: float
    witness: LpVector
    certified_lower_bound: bool = True
    iterations: int = 0
    converged: bool = True

    def ratio(self, A: OperatorMatrix, p: float) -> float:
        """Recompute ||A w||_p / ||w||_p from the stored witness."""
        return witness_ratio(A, self.witness, p)

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "witness": [[float(z.real), float(z.imag)] for z in self.witness.coords],
            "certified_lower_bound": self.certified_lower_bound,
            "converged": self.converged,
        }


def _pnorm(x, p):
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def witness_ratio(A: OperatorMatrix, w: LpVector, p: float) -> float:
    from .lpcore import p_norm

    den = p_norm(w, p)
    if den == 0:
        return 0.0
    return p_norm(A @ w, p) / den


def duality_map(y: np.ndarray, p: float) -> np.ndarray:
    """Phi_p(y)_i = |y_i|^{p-1} * phase(y_i); zero stays zero."""
    mod = np.abs(y)
    out = np.zeros_like(y, dtype=complex)
    nz = mod > 0
    m = mod[nz]
    out[nz] = m ** (p - 1) * ((y[nz].real / m) + 1j * (y[nz].imag / m))
    return out


def _to_weighted(A: OperatorMatrix, x: np.ndarray, p: float) -> LpVector:
    return LpVector(A.domain, x * A.domain.weights ** (-1.0 / p))


def _estimate(A, x_unweighted, p, iterations=0, converged=True) -> NormEstimate:
    w = _to_weighted(A, x_unweighted, p)
    return NormEstimate(witness_ratio(A, w, p), w, True, iterations, converged)


def opnorm_exact(A: OperatorMatrix, p: float) -> float:
    return _exact(A, p).value


def _exact(A: OperatorMatrix, p: float) -> NormEstimate:
    if p not in (1, 2):
        raise ValueError(f"exact norms only for p in {{1, 2}}, got {p}")
    B = unweighted_form(A, p)
    n = B.shape[1]
    if p == 1:
        col = np.abs(B).sum(axis=0)
        j = int(np.argmax(col)) if n else 0
        x = np.zeros(n, dtype=complex)
        x[j] = 1.0
    else:
        _, _, vh = np.linalg.svd(B)
        x = vh[0].conj()
    return _estimate(A, x, p)


def _moduli_key(x):
    return tuple(np.round(np.abs(x), 12))


def _power_batch(B, X, p, q, max_iter, tol):
    """Run the power iteration on every column of X at once.

    Columns only move when their ratio does not decrease, so each final
    ratio is at least the starting one.
    """
    X = X / (np.abs(X) ** p).sum(axis=0) ** (1.0 / p)
    ratio = (np.abs(B @ X) ** p).sum(axis=0) ** (1.0 / p)
    active = np.ones(X.shape[1], dtype=bool)
    iters = np.zeros(X.shape[1], dtype=int)
    converged = np.zeros(X.shape[1], dtype=bool)
    BH = B.conj().T
    for it in range(max_iter):
        if not active.any():
            break
        if it and it % 25 == 0:
            # columns far below the leader are abandoned (the result stays a lower bound)
            active &= ratio >= 0.99 * ratio.max()
        cols = np.flatnonzero(active)
        Xa = X[:, cols]
        Z = BH @ duality_map(B @ Xa, p)
        dead = ~np.any(Z, axis=0)
        Xn = duality_map(Z, q)
        nrm = (np.abs(Xn) ** p).sum(axis=0) ** (1.0 / p)
        nrm[dead] = 1.0
        Xn = Xn / nrm
        rn = (np.abs(B @ Xn) ** p).sum(axis=0) ** (1.0 / p)
        up = (rn >= ratio[cols]) & ~dead
        X[:, cols[up]] = Xn[:, up]
        done = dead | (np.abs(rn - ratio[cols]) < tol * np.maximum(1.0, ratio[cols]))
        ratio[cols] = np.where(up, rn, ratio[cols])
        iters[cols] += 1
        active[cols[done]] = False
        converged[cols[done]] = True
    return X, ratio, iters, converged


def opnorm_power(A: OperatorMatrix, p: float, restarts: int | None = None,
                 max_iter: int = 2000, tol: float = 1e-14, seed: int = 0,
                 starts=None) -> NormEstimate:
    """Lower bound for ||A||_{p->p} by multi-start nonlinear power iteration.

    ``starts`` are extra initial vectors in the weighted domain coordinates
    (e.g. a witness from a smaller window).
    """
    p = _check_p(p)
    if p == 1:
        raise ValueError("p = 1 has an exact formula; use opnorm_exact")
    q = p / (p - 1)
    B = unweighted_form(A, p)
    n = B.shape[1]
    if not np.any(B):
        x = np.zeros(n, dtype=complex)
        x[0] = 1.0
        return _estimate(A, x, p, 0, True)
    if restarts is None:
        restarts = 16 + n

    # deterministic start list: best column, all-ones, user starts, random
    inits = []
    colnorms = np.array([_pnorm(B[:, j], p) for j in range(n)])
    e = np.zeros(n, dtype=complex)
    e[int(np.argmax(colnorms))] = 1.0
    inits.append(e)
    inits.append(np.ones(n, dtype=complex))
    if starts is not None:
        scale = A.domain.weights ** (1.0 / p)
        for s in starts:
            s = np.asarray(s, dtype=complex) * scale
            if np.any(s):
                inits.append(s)
    rng = np.random.default_rng(seed)
    for _ in range(restarts):
        inits.append(rng.normal(size=n) + 1j * rng.normal(size=n))

    X0 = np.array(inits, dtype=complex).T
    X, ratios, iters, conv = _power_batch(B, X0, p, q, max_iter, tol)
    top = ratios.max()
    # ties within 1e-13 relative: smallest coordinate moduli wins
    tied = [j for j in range(X.shape[1]) if ratios[j] >= top * (1 - 1e-13)]
    j = min(tied, key=lambda j: _moduli_key(X[:, j]))
    return _estimate(A, X[:, j], p, int(iters.sum()), bool(conv[j]))


def opnorm(A: OperatorMatrix, p: float, **kwargs) -> NormEstimate:
    p = _check_p(p)
    if p in (1, 2):
        return _exact(A, p)
    return opnorm_power(A, p, **kwargs)


# ---------------------------------------------------------------------------
# brute-force oracle (tests only)

ORACLE_MAX_DIM = 8


def opnorm_oracle(A: OperatorMatrix, p: float, budget: int = 24, seed: int = 0,
                  polish: int = 6) -> float:
    p = _check_p(p)
    B = unweighted_form(A, p)
    n = B.shape[1]
    if n > ORACLE_MAX_DIM:
        raise ValueError(f"oracle limited to dimension {ORACLE_MAX_DIM}, got {n}")

    def f(x):
        den = _pnorm(x, p)
        return _pnorm(B @ x, p) / den if den > 0 else 0.0

    def f_real(v):
        return -f(v[:n] + 1j * v[n:])

    rng = np.random.default_rng(seed)
    starts = [np.eye(n, dtype=complex)[j] for j in range(n)]
    # all +-1, +-i patterns, screened by value
    units = np.array([1, -1, 1j, -1j])
    pats = np.array(list(itertools.product(units, repeat=n)))
    vals = (np.abs(pats @ B.T) ** p).sum(axis=1) ** (1 / p) / n ** (1 / p)
    best_val = float(vals.max())
    for k in np.argsort(-vals)[: max(4, budget // 4)]:
        starts.append(pats[k].astype(complex))
    for _ in range(budget):
        starts.append(rng.normal(size=n) + 1j * rng.normal(size=n))

    climbed = [_coordinate_ascent(f, x / _pnorm(x, p), sweeps=2) for x in starts]
    climbed.sort(key=f, reverse=True)
    best = max(best_val, f(climbed[0]))
    for x in climbed[:polish]:
        res = optimize.minimize(f_real, np.concatenate([x.real, x.imag]), method="BFGS",
                                options={"gtol": 1e-12, "maxiter": 400})
        best = max(best, -float(res.fun))
    return best


def _coordinate_ascent(f, x, sweeps):
    x = x.copy()
    for _ in range(sweeps):
        for i in range(x.size):
            r0, th0 = abs(x[i]), np.angle(x[i])

            def by_phase(th, r=r0):
                y = x.copy()
                y[i] = r * np.exp(1j * th)
                return -f(y)

            if r0 > 0:
                th = optimize.minimize_scalar(by_phase, bounds=(th0 - np.pi, th0 + np.pi),
                                              method="bounded").x
                x[i] = r0 * np.exp(1j * th)
                th0 = th

            def by_modulus(r, th=th0):
                y = x.copy()
                y[i] = r * np.exp(1j * th)
                return -f(y)

            hi = 4.0 * max(np.abs(x).max(), 1.0)
            r = optimize.minimize_scalar(by_modulus, bounds=(0.0, hi), method="bounded").x
            if -by_modulus(r) >= f(x):
                x[i] = r * np.exp(1j * th0)
    return x
