"""How far apart can two states with the same diagonal be?

A *lift* of a diagonal state ``rho_D`` is any density matrix with that
diagonal. Lifts are parameterised by a Hermitian, zero-diagonal ``Y`` on the
support of the weights:

    rho(Y) = rho_D + s * D^{1/2} Y D^{1/2},   s = min(1, -1 / lambda_min(Y)),

i.e. ``Y`` is shrunk radially toward ``rho_D`` until the result is positive.
``rho_D`` itself (``Y = 0``) is always a lift.

The reported ambiguity is the trace-distance diameter of the lift set,
``1/2 max ||rho' - rho''||_1``; for a qubit this equals ``2 sqrt(l1 l2)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._random import seed_sequence
from .config import AMBIGUITY
from .errors import InvalidInputError
from .operators import DensityMatrix, as_matrix


@dataclass(frozen=True)
class DiagonalState:
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise InvalidInputError("weights must be a non-empty vector")
        if np.any(w < -1e-12):
            raise InvalidInputError(f"negative weight {w.min():.3g}")
        if abs(w.sum() - 1) > 1e-12:
            raise InvalidInputError(f"weights sum to {w.sum():.15g}, not 1")
        object.__setattr__(self, "weights", np.clip(w, 0.0, None))

    @property
    def dim(self):
        return self.weights.size

    @property
    def support(self):
        return np.flatnonzero(self.weights > 0)

    def matrix(self):
        return np.diag(self.weights).astype(complex)


def restrict_diagonal(rho):
    rho = as_matrix(rho, square=True)
    return DiagonalState(np.real(np.diag(rho)).copy())


class _LiftMap:
    """Unconstrained parameter vector -> lift, by radial shrinking."""

    def __init__(self, d):
        self.d = d
        self.support = d.support
        s = self.support
        self.pairs = [(s[a], s[b]) for a in range(len(s)) for b in range(a + 1, len(s))]
        self.sqrt_w = np.sqrt(d.weights)
        self.n_params = 2 * len(self.pairs)

    def y_matrix(self, theta):
        n = self.d.dim
        y = np.zeros((n, n), dtype=complex)
        for p, (i, j) in enumerate(self.pairs):
            z = theta[2 * p] + 1j * theta[2 * p + 1]
            y[i, j] = z
            y[j, i] = np.conj(z)
        return y

    def offdiag(self, theta):
        """Shrunk off-diagonal part ``s D^{1/2} Y D^{1/2}``."""
        y = self.y_matrix(theta)
        s = self.support
        sub = y[np.ix_(s, s)]
        lmin = np.linalg.eigvalsh(sub)[0] if len(s) > 1 else 0.0
        scale = 1.0 if lmin >= -1.0 else -1.0 / lmin
        return scale * (self.sqrt_w[:, None] * y * self.sqrt_w[None, :])

    def lift(self, theta):
        return self.d.matrix() + self.offdiag(theta)


def sample_lift(d, seed=None):
    """Random lift of ``d``.

    A random direction ``Y`` is drawn, the boundary of the lift set along that
    ray is located, and the radius is drawn so that samples fill the set
    (including neighbourhoods of the boundary).
    """
    if not isinstance(d, DiagonalState):
        d = DiagonalState(d)
    rng = np.random.default_rng(seed_sequence(seed))
    lm = _LiftMap(d)
    if lm.n_params == 0:
        return DensityMatrix(d.matrix())
    theta = rng.standard_normal(lm.n_params)
    y = lm.y_matrix(theta)[np.ix_(lm.support, lm.support)]
    boundary = -1.0 / np.linalg.eigvalsh(y)[0]
    radius = boundary * rng.uniform() ** (1.0 / lm.n_params)
    rho = d.matrix() + lm.offdiag(radius * theta)
    np.fill_diagonal(rho, d.weights)
    return DensityMatrix(rho)


@dataclass
class AmbiguityResult:
    delta: float  # 1/2 max ||rho' - rho''||_1 found
    diameter: float  # max ||rho' - rho''||_1 found
    pair: tuple
    evaluations: int
    converged: bool


class _BudgetExhausted(Exception):
    pass


class _GramLift:
    """Lifts as Gram matrices ``rho_ij = sqrt(l_i l_j) <v_i, v_j>``.

    The rows ``v_i`` are normalised free complex vectors on the support, so the
    diagonal is exact and positivity automatic for every parameter value.
    """

    def __init__(self, d):
        self.d = d
        self.support = d.support
        self.k = len(self.support)
        self.root = np.sqrt(d.weights[self.support])
        self.n_params = 2 * self.k * self.k

    def _rows(self, theta):
        w = theta[: self.k * self.k] + 1j * theta[self.k * self.k:]
        w = w.reshape(self.k, self.k)
        norms = np.linalg.norm(w, axis=1)
        return w, norms, w / norms[:, None]

    def factor(self, theta):
        _, _, v = self._rows(theta)
        return self.root[:, None] * v

    def lift(self, theta):
        a = self.factor(theta)
        n = self.d.dim
        rho = np.zeros((n, n), dtype=complex)
        rho[np.ix_(self.support, self.support)] = a @ a.conj().T
        np.fill_diagonal(rho, self.d.weights)
        return rho

    def pull_back(self, theta, grad_a):
        """Real gradient w.r.t. ``theta`` from the complex gradient w.r.t. the factor."""
        _, norms, v = self._rows(theta)
        g = self.root[:, None] * grad_a
        radial = np.real(np.sum(v.conj() * g, axis=1))
        gw = (g - radial[:, None] * v) / norms[:, None]
        return np.concatenate([gw.real.ravel(), gw.imag.ravel()])


def delta_rho(d, budget=None, seed=0, *, settings=AMBIGUITY):
    """Lower bound on the ambiguity of lifting ``d``.

    Multi-start local ascent (L-BFGS on the trace norm of the difference of
    two Gram-parameterised lifts, with its analytic gradient
    ``sign(rho' - rho'')``). Restarts run one after another from independent
    seeds. Every objective evaluation counts against ``budget`` and the
    evaluation sequence does not depend on it, so the result is
    non-decreasing in the budget.

    For ``N > 2`` the result is the optimiser's best, not a certified supremum.
    """
    if not isinstance(d, DiagonalState):
        d = DiagonalState(d)
    rho_d = d.matrix()
    gl = _GramLift(d)
    if gl.k <= 1:
        return AmbiguityResult(0.0, 0.0, (rho_d, rho_d), 0, True)

    budget = settings.budget if budget is None else int(budget)
    half = gl.n_params
    evals = 0
    best = {"f": -np.inf, "theta": None}

    def neg_objective(theta):
        nonlocal evals
        if evals >= budget:
            raise _BudgetExhausted
        evals += 1
        a1, a2 = gl.factor(theta[:half]), gl.factor(theta[half:])
        diff = a1 @ a1.conj().T - a2 @ a2.conj().T
        lam, vec = np.linalg.eigh(diff)
        f = float(np.sum(np.abs(lam)))
        if f > best["f"]:
            best["f"], best["theta"] = f, theta.copy()
        sign = (vec * np.sign(lam)) @ vec.conj().T
        # d Tr(S A A*) = 2 Re Tr(A* S dA): complex gradient 2 S A
        g = np.concatenate([gl.pull_back(theta[:half], 2 * sign @ a1),
                            gl.pull_back(theta[half:], -2 * sign @ a2)])
        return -f, -g

    converged = True
    for ss in seed_sequence(seed).spawn(settings.restarts):
        theta0 = np.random.default_rng(ss).standard_normal(2 * half)
        try:
            minimize(neg_objective, theta0, jac=True, method="L-BFGS-B",
                     options={"gtol": settings.gtol, "ftol": settings.ftol,
                              "maxiter": settings.maxiter})
        except _BudgetExhausted:
            converged = False
            break

    theta = best["theta"]
    pair = (gl.lift(theta[:half]), gl.lift(theta[half:]))
    return AmbiguityResult(0.5 * best["f"], best["f"], pair, evals, converged)
