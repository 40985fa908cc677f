"""Doubly stochastic matrices induced by unitaries.

A unitary ``u`` maps the diagonal weights ``l`` to ``(T l)_r = sum_s T_sr l_s``
with ``T_sr = |u_sr|^2``: that is what ``diag(u* rho_D u)`` reads off.
"""

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .ambiguity import DiagonalState
from .errors import InvalidInputError, NumericalDegeneracyError, PropertyViolation
from .operators import check_unitary

_DUST = 1e-12


@dataclass(frozen=True)
class StochasticMatrix:
    entries: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.entries, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {t.shape}")
        if t.min() < -_DUST:
            raise InvalidInputError(f"negative entry {t.min():.3e}")
        worst = max(np.abs(t.sum(0) - 1).max(), np.abs(t.sum(1) - 1).max())
        if worst > 1e-9:
            raise InvalidInputError(f"line sums deviate from 1 by {worst:.3e}")
        object.__setattr__(self, "entries", np.clip(t, 0.0, None))

    @property
    def dim(self):
        return self.entries.shape[0]

    def apply(self, weights):
        """``(T l)_r = sum_s T_sr l_s``."""
        return self.entries.T @ np.asarray(weights, dtype=float)


def from_unitary(u):
    u = check_unitary(u)
    return StochasticMatrix(np.abs(u) ** 2)


def _weights(x):
    return x.weights if isinstance(x, DiagonalState) else DiagonalState(x).weights


def pushforward_check(weights, u, a):
    """``|Tr rho_D u (sum_r a_r P_r) u* - sum_r (T l)_r a_r|``."""
    lam = _weights(weights)
    u = check_unitary(u)
    a = np.asarray(a, dtype=float)
    if not (lam.size == u.shape[0] == a.size):
        raise InvalidInputError("weights, unitary and observable disagree in dimension")
    if np.allclose(u, np.eye(u.shape[0]), atol=0, rtol=0):
        return 0.0
    lhs = np.real(np.trace(np.diag(lam) @ u @ np.diag(a) @ u.conj().T))
    rhs = from_unitary(u).apply(lam) @ a
    return float(abs(lhs - rhs))


def shannon(p):
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p))) + 0.0


def entropy_monotone(weights, t):
    """Shannon entropy before and after a doubly stochastic map.

    Raises PropertyViolation if the entropy drops by more than 1e-10, which
    can only happen when ``t`` is not doubly stochastic.
    """
    lam = _weights(weights)
    if not isinstance(t, StochasticMatrix):
        t = np.asarray(t, dtype=float)
        if t.ndim != 2 or t.shape[0] != t.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {t.shape}")
        mat = t
    else:
        mat = t.entries
    before, after = shannon(lam), shannon(mat.T @ lam)
    if after < before - 1e-10:
        raise PropertyViolation(f"entropy decreased from {before:.12g} to {after:.12g}")
    return before, after


def _perm_matrix(perm):
    n = len(perm)
    p = np.zeros((n, n))
    p[np.arange(n), perm] = 1.0
    return p


def _caratheodory(terms, n):
    """Drop terms while the permutation matrices are linearly dependent."""
    while len(terms) > n * n - 2 * n + 2:
        a = np.array([_perm_matrix(p).ravel() for _, p in terms]).T
        null = np.linalg.svd(a)[2][-1]
        w = np.array([t[0] for t in terms])
        pos = null > 1e-12
        if not pos.any():
            null, pos = -null, -null > 1e-12
        step = np.min(w[pos] / null[pos])
        w = w - step * null
        terms = [(float(wi), p) for wi, (_, p) in zip(w, terms) if wi > 1e-14]
    return terms


def birkhoff_decompose(t, tol=1e-9):
    """Greedy Birkhoff decomposition ``T = sum_i w_i P_i``.

    Returns a list of ``(weight, perm)`` where ``perm[r]`` is the column of the
    one in row ``r``. Each step finds a perfect matching on the support of the
    remainder, subtracts its smallest entry, and zeroes entries below ``tol``.
    """
    if not isinstance(t, StochasticMatrix):
        t = StochasticMatrix(t)
    n = t.dim
    rest = t.entries.copy()
    terms = []
    while rest.max() > tol:
        support = csr_matrix((rest > tol).astype(np.int8))
        perm = maximum_bipartite_matching(support, perm_type="column")
        if np.any(perm < 0):
            raise NumericalDegeneracyError(
                f"no perfect matching on the support after {len(terms)} terms; "
                f"remaining mass {rest.sum() / n:.3e} (tol {tol:g} too small?)")
        w = float(rest[np.arange(n), perm].min())
        terms.append((w, perm.copy()))
        rest[np.arange(n), perm] -= w
        rest[rest < tol] = 0.0
    terms = _caratheodory(terms, n)
    return [(w, [int(c) for c in p]) for w, p in terms]


def reassemble(terms, n):
    out = np.zeros((n, n))
    for w, p in terms:
        out += w * _perm_matrix(np.asarray(p))
    return out
