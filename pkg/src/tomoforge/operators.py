"""Dense complex-matrix kernel: norms, density-matrix validation, exponentials."""

from dataclasses import dataclass

import numpy as np

from .config import TOL
from .errors import DensityViolation, InvalidInputError, ShapeError


def as_matrix(a, square=False):
    """Return ``a`` as a finite 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    return m


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - dagger(a)), initial=0.0))


def unitary_defect(u):
    u = np.asarray(u)
    return float(np.max(np.abs(u @ dagger(u) - np.eye(u.shape[-1])), initial=0.0))


def check_unitary(u, tol=TOL.unitary):
    u = as_matrix(u, square=True)
    defect = unitary_defect(u)
    if defect > tol:
        raise InvalidInputError(f"matrix is not unitary (|UU* - I| = {defect:.3e})")
    return u


def trace_norm(a):
    """Sum of singular values of ``a``."""
    a = as_matrix(a)
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


@dataclass(frozen=True)
class DensityMatrix:
    """A validated state. Behaves like its matrix under ``np.asarray``."""

    matrix: np.ndarray

    @property
    def dim(self):
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def density_violations(m, tol=None):
    """List every violated density invariant as ``(name, magnitude)`` pairs."""
    m = as_matrix(m, square=True)
    herm_tol = TOL.herm if tol is None else tol
    psd_tol = TOL.psd if tol is None else tol
    tr_tol = TOL.trace if tol is None else tol
    out = []
    hd = hermitian_defect(m)
    if hd > herm_tol:
        out.append(("hermitian", hd))
    tr = np.trace(m)
    if abs(tr - 1) > tr_tol:
        out.append(("trace", abs(tr - 1)))
    lmin = float(np.linalg.eigvalsh(0.5 * (m + dagger(m)))[0])
    if lmin < -psd_tol:
        out.append(("psd", lmin))
    return out


def validate_density(m, tol=None):
    """Accept ``m`` as a density matrix or raise :class:`DensityViolation`.

    The report names the first violated invariant in the order Hermiticity,
    trace, positivity; for positivity the magnitude is the most negative
    eigenvalue.
    """
    m = as_matrix(m, square=True)
    bad = density_violations(m, tol)
    if bad:
        name, mag = bad[0]
        if name == "psd":
            raise DensityViolation(name, mag, f"negative eigenvalue {mag:.6g}")
        raise DensityViolation(name, mag)
    return DensityMatrix(0.5 * (m + dagger(m)))


def is_density(m, tol=None):
    return not density_violations(m, tol)


def matrix_exp_skew(h, t=1.0, tol=TOL.herm):
    """``exp(-i t h)`` for Hermitian ``h`` via its eigendecomposition."""
    h = as_matrix(h, square=True)
    hd = hermitian_defect(h)
    if hd > tol:
        raise InvalidInputError(f"generator is not Hermitian (defect {hd:.3e})")
    w, v = np.linalg.eigh(0.5 * (h + dagger(h)))
    return (v * np.exp(-1j * t * w)) @ dagger(v)


def clip_to_density(m):
    """Project onto states: clip negative eigenvalues, renormalise the trace."""
    m = as_matrix(m, square=True)
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    w = np.clip(w, 0.0, None)
    if w.sum() <= 0:
        return np.eye(len(w), dtype=complex) / len(w)
    w = w / w.sum()
    return (v * w) @ dagger(v)


def random_density(n, rng, rank=None):
    """Random state from a complex Ginibre matrix (Hilbert-Schmidt measure for full rank)."""
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def partial_trace(rho, dims, keep):
    """Reduced state of a bipartite ``rho`` on ``dims = (dA, dB)``; ``keep`` is 0 or 1."""
    da, db = dims
    r = np.asarray(rho).reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ajbj->ab", r)
    return np.einsum("iaib->ab", r)


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))
