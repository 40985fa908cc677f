"""Normalised su(N) generators, the adjoint representation and special unitaries.

Generators satisfy ``Tr(E_k E_l) = 2 delta_kl``.  Ordering: the Cartan
generators come first, with ``E_0 = sqrt(2N/(N-1)) (P_1 - I/N)``; then the
symmetric roots ``|i><j| + |j><i|`` and the antisymmetric roots
``-i|i><j| + i|j><i|``, each in lexicographic ``(i, j)``, ``i < j``.
Indices are 0-based throughout.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import TOL
from .errors import BasisIndexError, ConsistencyError, InvalidDimensionError
from .operators import check_unitary, dagger


@dataclass(frozen=True)
class HermitianBasis:
    N: int
    generators: np.ndarray  # (N^2 - 1, N, N)
    cartan_indices: tuple
    root_indices: tuple
    # root index -> (i, j, "sym" | "asym")
    root_planes: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.generators)

    def __getitem__(self, k):
        return self.generators[k]

    def kind(self, k):
        return "cartan" if k in self.cartan_indices else "root"

    def components(self, rho):
        """``rho_k = Tr(rho E_k)`` for every generator (real for Hermitian rho)."""
        rho = np.asarray(rho)
        return np.real(np.einsum("kij,ji->k", self.generators, rho))

    def synthesize(self, bloch):
        """Inverse of :meth:`components`: ``I/N + 1/2 sum_k rho_k E_k``."""
        bloch = np.asarray(bloch, dtype=float)
        return np.eye(self.N) / self.N + 0.5 * np.einsum("k,kij->ij", bloch, self.generators)

    def gram(self):
        return np.real(np.einsum("kij,lji->kl", self.generators, self.generators))


def build_basis(N):
    if N < 2:
        raise InvalidDimensionError(f"su(N) basis needs N >= 2, got {N}")
    gens = []
    p1 = np.zeros((N, N))
    p1[0, 0] = 1.0
    gens.append(np.sqrt(2 * N / (N - 1)) * (p1 - np.eye(N) / N))
    # remaining Cartan: Gell-Mann diagonals on coordinates 1..N-1, which are
    # orthogonal to E_0 because E_0 is constant there
    for k in range(1, N - 1):
        d = np.zeros(N)
        d[1 : k + 1] = 1.0
        d[k + 1] = -k
        gens.append(np.sqrt(2.0 / (k * (k + 1))) * np.diag(d))
    planes = {}
    pairs = [(i, j) for i in range(N) for j in range(i + 1, N)]
    for i, j in pairs:
        e = np.zeros((N, N), dtype=complex)
        e[i, j] = e[j, i] = 1.0
        planes[len(gens)] = (i, j, "sym")
        gens.append(e)
    for i, j in pairs:
        e = np.zeros((N, N), dtype=complex)
        e[i, j] = -1j
        e[j, i] = 1j
        planes[len(gens)] = (i, j, "asym")
        gens.append(e)
    gens = np.array(gens, dtype=complex)
    return HermitianBasis(
        N=N,
        generators=gens,
        cartan_indices=tuple(range(N - 1)),
        root_indices=tuple(range(N - 1, N * N - 1)),
        root_planes=planes,
    )


def adjoint_rep(u, basis, tol=TOL.unitary):
    """``D_kl(u) = 1/2 Tr(E_k u E_l u*)``, a real orthogonal matrix."""
    u = check_unitary(u, tol)
    if u.shape[0] != basis.N:
        raise InvalidDimensionError(f"unitary is {u.shape[0]}-dim, basis is {basis.N}-dim")
    return _adjoint_batch(u[None], basis)[0]


def _adjoint_batch(us, basis):
    # (M, N, N) -> (M, d, d) without unitarity checks
    conj = np.einsum("mab,lbc,mdc->mlad", us, basis.generators, us.conj())
    return 0.5 * np.real(np.einsum("kda,mlad->mkl", basis.generators, conj))


def adjoint_first_column(us, basis):
    """``D(u)[:, 0]`` for a stack of unitaries, using ``u P_1 u* = |u e_1><u e_1|``."""
    # u E_0 u* = sqrt(2N/(N-1)) (u P1 u* - I/N) and Tr(E_k) = 0
    N = basis.N
    v = us[:, :, 0]
    vev = np.real(np.einsum("ma,kab,mb->mk", v.conj(), basis.generators, v))
    return 0.5 * np.sqrt(2 * N / (N - 1)) * vev


def orbit_point(u, basis, tol=1e-9):
    """Return ``u P_1 u*`` after checking it against the adjoint expansion
    ``sqrt((N-1)/(2N)) sum_k E_k D_k0(u) + I/N``."""
    u = check_unitary(u)
    N = basis.N
    direct = np.outer(u[:, 0], u[:, 0].conj())
    d = adjoint_rep(u, basis)
    expansion = np.sqrt((N - 1) / (2 * N)) * np.einsum("k,kij->ij", d[:, 0], basis.generators)
    expansion = expansion + np.eye(N) / N
    err = float(np.max(np.abs(direct - expansion)))
    if err > tol:
        raise ConsistencyError(f"orbit expansion mismatch {err:.3e}")
    return direct


def haar_sample(N, rng, size=None):
    """Haar-distributed unitary (or a stack of ``size`` of them).

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` moved into Q.
    """
    shape = (N, N) if size is None else (size, N, N)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def root_rotation(k, basis):
    """Unitary ``u_k`` with ``u_k* E_k u_k`` diagonal, for a root index ``k``.

    Built from the eigenvectors of the root generator in its ``(i, j)`` plane;
    ``u_k* E_k u_k = |i><i| - |j><j|``.
    """
    if k not in basis.root_planes:
        raise BasisIndexError(f"{k} is not a root index of su({basis.N})")
    i, j, kind = basis.root_planes[k]
    u = np.eye(basis.N, dtype=complex)
    s = 1 / np.sqrt(2)
    phase = 1.0 if kind == "sym" else 1j
    u[i, i], u[j, i] = s, s * phase
    u[i, j], u[j, j] = s, -s * phase
    return u


def cartan_offdiag_norm(m):
    m = np.asarray(m)
    return float(np.linalg.norm(m - np.diag(np.diag(m))))


def shift_unitary(k, N):
    """Cyclic permutation sending basis vector 0 to ``k-1`` (1-based ``k``),
    so that ``u P_1 u* = P_k``."""
    if not 1 <= k <= N:
        raise BasisIndexError(f"shift index must be in 1..{N}, got {k}")
    u = np.zeros((N, N), dtype=complex)
    for s in range(N):
        u[(s + k - 1) % N, s] = 1.0
    return u
