"""System-apparatus coupling: push system information into apparatus observables.

The joint Hamiltonian is ``H_S x I + I x H_M`` plus, during ``[t0, t0 + T]``,
``H_I = sum C[a, k] e_a x E_k`` where ``e_0 = I_n``, ``E_0 = I_N`` and the
other indices run over the su(n), su(N) generators. Only apparatus
expectations ``Tr rho(t)(I x E_l)`` are observed. They are affine in the
system components ``rho_a = Tr(rho_S e_a)``, so several coupling choices
stacked together can be inverted for ``rho_S``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigError, ConsistencyError, ShapeError, UnderdeterminedError
from .operators import (DensityMatrix, as_matrix, hermitian_defect, matrix_exp_skew,
                        partial_trace, validate_density)
from .su_basis import build_basis

RANK_RTOL = 1e-10


def _numerical_rank(s):
    # design entries are O(1), so roundoff-only blocks must not count as rank
    if s.size == 0:
        return 0
    return int(np.sum(s > RANK_RTOL * max(s[0], 1.0)))


def _with_identity(basis):
    n = basis.N
    return np.concatenate([np.eye(n, dtype=complex)[None], basis.generators])


@dataclass(frozen=True)
class CoupledConfig:
    n: int
    N: int
    H_S: np.ndarray
    H_M: np.ndarray
    couplings: np.ndarray  # (n^2, N^2), index 0 is the identity component
    t0: float = 0.0
    T: float = 1.0
    t_read: float = 2.0

    def __post_init__(self):
        if self.n < 2 or self.N < 2:
            raise ConfigError(f"system and apparatus dimensions must be >= 2, got n={self.n}, N={self.N}")
        hs = as_matrix(self.H_S, square=True)
        hm = as_matrix(self.H_M, square=True)
        c = np.asarray(self.couplings, dtype=float)
        if hs.shape[0] != self.n or hm.shape[0] != self.N:
            raise ShapeError(f"Hamiltonians are {hs.shape} and {hm.shape}, expected n={self.n}, N={self.N}")
        if c.shape != (self.n ** 2, self.N ** 2):
            raise ShapeError(f"couplings have shape {c.shape}, expected {(self.n ** 2, self.N ** 2)}")
        for name, h in (("H_S", hs), ("H_M", hm)):
            if hermitian_defect(h) > 1e-9:
                raise ConfigError(f"{name} is not Hermitian")
        if not self.T >= 0:
            raise ConfigError(f"interaction duration must be >= 0, got {self.T}")
        if not self.t_read > self.t0 + self.T:
            raise ConfigError(f"t_read={self.t_read} must exceed t0 + T = {self.t0 + self.T}")
        object.__setattr__(self, "H_S", hs)
        object.__setattr__(self, "H_M", hm)
        object.__setattr__(self, "couplings", c)

    def free_hamiltonian(self):
        return np.kron(self.H_S, np.eye(self.N)) + np.kron(np.eye(self.n), self.H_M)

    def interaction(self):
        es = _with_identity(build_basis(self.n))
        em = _with_identity(build_basis(self.N))
        return np.einsum("ak,aij,kpq->ipjq", self.couplings, es, em).reshape(
            self.n * self.N, self.n * self.N)

    def propagator(self):
        """``V = exp(-i H0 (t_read - t0 - T)) exp(-i (H0 + H_I) T)``."""
        h0 = self.free_hamiltonian()
        during = matrix_exp_skew(h0 + self.interaction(), self.T)
        after = matrix_exp_skew(h0, self.t_read - self.t0 - self.T)
        return after @ during


def _conjugate(v, x):
    return v @ x @ v.conj().T


def evolve(config, rho_S, rho_M):
    rs = validate_density(rho_S).matrix
    rm = validate_density(rho_M).matrix
    if rs.shape[0] != config.n or rm.shape[0] != config.N:
        raise ShapeError(f"states are {rs.shape[0]}- and {rm.shape[0]}-dim, config has n={config.n}, N={config.N}")
    out = _conjugate(config.propagator(), np.kron(rs, rm))
    return DensityMatrix(0.5 * (out + out.conj().T))


def apparatus_read(rho_t, basis_M, tol=1e-10):
    """``b_l = Tr rho(t)(I x E_l)`` for the N^2 - 1 apparatus generators."""
    rho = as_matrix(rho_t, square=True)
    big, N = rho.shape[0], basis_M.N
    if big % N:
        raise ShapeError(f"{big}-dim state cannot carry a {N}-dim apparatus")
    n = big // N
    ops = np.einsum("ij,lpq->lipjq", np.eye(n), basis_M.generators).reshape(-1, big, big)
    b = np.real(np.einsum("lij,ji->l", ops, rho))
    reduced = basis_M.components(partial_trace(rho, (n, N), keep=1))
    err = float(np.max(np.abs(b - reduced), initial=0.0))
    if err > tol:
        raise ConsistencyError(f"apparatus expectations disagree with the reduced state by {err:.3e}")
    return b


def _linear_read(v, x, gens_m, n, N):
    """Apparatus expectations of ``V x V*`` for a (not necessarily positive) operator ``x``."""
    y = _conjugate(v, x)
    reduced = partial_trace(y, (n, N), keep=1)
    return np.real(np.einsum("lij,ji->l", gens_m, reduced))


@dataclass
class DesignMatrix:
    """``b = matrix[:, 1:] @ rho_components + offset`` row-block per config.

    Column 0 is the response to ``I/n x rho_M`` (the fixed trace part) and
    equals ``offset``; columns ``a >= 1`` respond to ``e_a/2 x rho_M``.
    """

    matrix: np.ndarray  # (configs * (N^2 - 1), n^2)
    n: int
    N: int
    rho_M: np.ndarray
    configs: list = field(repr=False, default_factory=list)

    @property
    def offset(self):
        return self.matrix[:, 0]

    @property
    def system(self):
        return self.matrix[:, 1:]

    def singular_values(self):
        return np.linalg.svd(self.system, compute_uv=False)

    def rank(self):
        return _numerical_rank(self.singular_values())

    def predict(self, rho_S):
        comps = build_basis(self.n).components(as_matrix(rho_S))
        return self.system @ comps + self.offset


def build_design(configs, rho_M):
    configs = list(configs)
    if not configs:
        raise ConfigError("need at least one coupling configuration")
    n, N = configs[0].n, configs[0].N
    for c in configs:
        if (c.n, c.N) != (n, N):
            raise ConfigError("all configurations must share the system and apparatus dimensions")
    rm = validate_density(rho_M).matrix
    if rm.shape[0] != N:
        raise ConfigError(f"apparatus state is {rm.shape[0]}-dim, configs have N={N}")
    gens_s = build_basis(n).generators
    gens_m = build_basis(N).generators
    inputs = [np.kron(np.eye(n) / n, rm)] + [np.kron(0.5 * e, rm) for e in gens_s]
    blocks = []
    for c in configs:
        v = c.propagator()
        blocks.append(np.column_stack([_linear_read(v, x, gens_m, n, N) for x in inputs]))
    return DesignMatrix(np.vstack(blocks), n, N, rm, configs)


def observe(configs, rho_S, rho_M):
    """Simulated data: apparatus expectations for each config, concatenated."""
    basis_m = build_basis(configs[0].N)
    return np.concatenate([apparatus_read(evolve(c, rho_S, rho_M), basis_m) for c in configs])


@dataclass
class SystemRecovery:
    rho_S: np.ndarray | None
    components: np.ndarray | None
    residual: float
    rank: int
    condition: float
    determined: np.ndarray  # orthonormal rows spanning the determined components
    determined_values: np.ndarray

    def to_json(self):
        from .serialize import matrix_to_json

        return {
            "rho_S": None if self.rho_S is None else matrix_to_json(self.rho_S),
            "residual": self.residual,
            "rank": self.rank,
            "condition": self.condition,
        }


def recover_system(design, observations, full=True):
    """Least-squares inversion of the design for the system state at ``t0``.

    With ``full=True`` a rank below ``n^2 - 1`` raises UnderdeterminedError
    carrying the determined subspace; otherwise a partial result with
    ``rho_S = None`` is returned.
    """
    y = np.asarray(observations, dtype=float)
    a = design.system
    if y.shape != (a.shape[0],):
        raise ShapeError(f"{y.size} observations for a design with {a.shape[0]} rows")
    y = y - design.offset
    unknowns = a.shape[1]
    if full and design.N < design.n:
        raise ConfigError(f"full recovery needs N >= n, got N={design.N}, n={design.n}")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    rank = _numerical_rank(s)
    determined = vt[:rank]
    values = (u[:, :rank].T @ y) / s[:rank] if rank else np.zeros(0)
    condition = float(s[0] / s[rank - 1]) if rank else float("inf")
    if rank < unknowns:
        if full:
            raise UnderdeterminedError(
                f"design rank {rank} < {unknowns}: only part of the system state is determined",
                rank, determined, values)
        resid = float(np.linalg.norm(a @ (determined.T @ values) - y))
        return SystemRecovery(None, None, resid, rank, condition, determined, values)
    q, r, piv = scipy.linalg.qr(a, mode="economic", pivoting=True)
    x = np.empty(unknowns)
    x[piv] = scipy.linalg.solve_triangular(r, q.T @ y)
    resid = float(np.linalg.norm(a @ x - y))
    rho = build_basis(design.n).synthesize(x)
    return SystemRecovery(rho, x, resid, rank, condition, determined, values)


def random_configs(n, N, count, seed, *, t0=0.0, T=1.0, t_read=2.0, H_S=None, H_M=None):
    """``count`` configs with couplings uniform on [-1, 1] from a fixed seed."""
    rng = np.random.default_rng(seed)
    hs = np.diag(np.arange(n, dtype=float)) if H_S is None else H_S
    hm = np.diag(np.arange(N, dtype=float)) if H_M is None else H_M
    return [CoupledConfig(n, N, hs, hm, rng.uniform(-1, 1, size=(n * n, N * N)), t0, T, t_read)
            for _ in range(count)]
