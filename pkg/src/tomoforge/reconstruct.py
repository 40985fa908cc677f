"""Measurements on rotated diagonal subalgebras and the reconstruction of rho.

Three routes are offered:

* :func:`mc_reconstruct` - Monte-Carlo estimate of the Haar inversion integral
  ``int D(u)_{a,0} Tr rho(u P_1 u*) du = rho_a / ((N+1) sqrt(2N(N-1)))``;
* :func:`finite_reconstruct` - one diagonal measurement plus one rotated frame
  per root, ``1 + N(N-1)`` frames in total;
* :func:`projector_protocol` - only single-projector expectations
  ``Tr rho(u P_1 u*)``, ``N^2`` numbers in total.
"""

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._random import generator, seed_sequence
from .config import INDEX_CONVENTION, TOL
from .errors import DataError, InvalidInputError, ShapeError
from .operators import as_matrix, clip_to_density, dagger, is_density
from .serialize import matrix_to_json
from .su_basis import (
    _adjoint_batch,
    adjoint_first_column,
    build_basis,
    haar_sample,
    root_rotation,
    shift_unitary,
)


@dataclass(frozen=True)
class MeasurementRecord:
    """Expectations ``w_m = Tr rho(u P_m u*)`` of one rotated diagonal algebra."""

    frame: np.ndarray
    expectations: np.ndarray

    def check(self, tol=TOL.record_sum):
        w = np.asarray(self.expectations, dtype=float)
        if np.any(w < -tol) or np.any(w > 1 + tol):
            raise DataError(f"expectations outside [0, 1]: {w}")
        if abs(w.sum() - 1) > tol:
            raise DataError(f"expectations sum to {w.sum():.12g}, not 1")
        return w


def measure(rho, u):
    """Diagonal of ``u* rho u``."""
    rho = as_matrix(rho, square=True)
    u = as_matrix(u, square=True)
    if rho.shape != u.shape:
        raise ShapeError(f"state is {rho.shape}, frame is {u.shape}")
    w = np.real(np.einsum("ai,ab,bi->i", u.conj(), rho, u))
    return MeasurementRecord(frame=u, expectations=w)


class StateOracle:
    """Answers measurement queries on a known state and counts them.

    ``oracle(u)`` returns a :class:`MeasurementRecord`; :meth:`projector`
    returns the single number ``Tr rho(u P_1 u*)``; :meth:`batch` evaluates
    the first expectation for a stack of frames without per-call overhead.
    """

    def __init__(self, rho):
        self.rho = as_matrix(rho, square=True)
        self.N = self.rho.shape[0]
        self.queries = 0
        self._lock = threading.Lock()

    def __call__(self, u):
        self.queries += 1
        return measure(self.rho, u)

    def projector(self, u):
        self.queries += 1
        v = np.asarray(u)[:, 0]
        return float(np.real(v.conj() @ self.rho @ v))

    def batch(self, us):
        with self._lock:
            self.queries += len(us)
        v = us[:, :, 0]
        return np.real(np.einsum("ma,ab,mb->m", v.conj(), self.rho, v))


def records_oracle(records, atol=1e-9):
    """Oracle that answers from a fixed list of records by matching frames."""
    records = list(records)

    def oracle(u):
        for r in records:
            if r.frame.shape == np.shape(u) and np.allclose(r.frame, u, atol=atol):
                return r
        raise DataError("no recorded measurement for the requested frame")

    return oracle


@dataclass
class Reconstruction:
    bloch: np.ndarray
    matrix: np.ndarray
    queries: int
    stderr: np.ndarray = None
    projected: np.ndarray = None
    method: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def valid_density(self):
        return is_density(self.matrix)

    def to_json(self):
        out = {
            "bloch": [float(x) for x in self.bloch],
            "matrix": matrix_to_json(self.matrix),
            "stderr": None if self.stderr is None else [float(x) for x in self.stderr],
            "queries": int(self.queries),
            "valid_density": bool(self.valid_density),
            "method": self.method,
        }
        if self.projected is not None:
            out["projected"] = matrix_to_json(self.projected)
        return out


def inversion_constant(N):
    return 1.0 / ((N + 1) * math.sqrt(2 * N * (N - 1)))


def _first_expectations(oracle, us):
    if hasattr(oracle, "batch"):
        return np.asarray(oracle.batch(us), dtype=float)
    out = np.empty(len(us))
    for m, u in enumerate(us):
        rec = oracle(u)
        w = np.asarray(rec.expectations if isinstance(rec, MeasurementRecord) else rec)
        if w.shape != (us.shape[1],):
            raise ShapeError(f"oracle returned {w.shape}, expected ({us.shape[1]},)")
        out[m] = w[0]
    return out


def _worker_count(workers):
    if workers is not None:
        return max(1, int(workers))
    return max(1, int(os.environ.get("TOMOFORGE_THREADS", "1")))


def mc_reconstruct(oracle, N, samples, seed=None, *, center=True, project=False,
                   chunk=20000, workers=None):
    """Haar Monte-Carlo inversion.

    Args:
        oracle: callable ``u -> MeasurementRecord`` (or an object with a
            vectorised ``batch`` method such as :class:`StateOracle`).
        N: dimension.
        samples: number of Haar frames ``M``.
        seed: int, SeedSequence or Generator. Samples are drawn in fixed-size
            chunks from spawned child streams, so the result does not depend
            on ``workers``.
        center: subtract ``1/N`` from each expectation before weighting. The
            integral is unchanged (``int D du = 0``); the variance drops.
        project: also return the eigenvalue-clipped physical state.

    Returns:
        :class:`Reconstruction` with per-component standard errors. The raw
        matrix is left unprojected and may fail positivity at small ``M``.
    """
    if samples < 1:
        raise InvalidInputError("need at least one sample")
    basis = build_basis(N)
    k_inv = inversion_constant(N)
    sizes = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
    streams = seed_sequence(seed).spawn(len(sizes))

    def run(i):
        rng = np.random.default_rng(streams[i])
        us = haar_sample(N, rng, size=sizes[i])
        w = _first_expectations(oracle, us)
        if center:
            w = w - 1.0 / N
        x = adjoint_first_column(us, basis) * w[:, None]
        return x.sum(axis=0), (x * x).sum(axis=0)

    n_workers = _worker_count(workers)
    if n_workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(n_workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]
    d = len(basis)
    s1 = np.array([math.fsum(p[0][k] for p in parts) for k in range(d)])
    s2 = np.array([math.fsum(p[1][k] for p in parts) for k in range(d)])
    mean = s1 / samples
    if samples > 1:
        var = np.clip((s2 - samples * mean**2) / (samples - 1), 0.0, None)
        stderr = np.sqrt(var / samples) / k_inv
    else:
        stderr = np.full(d, np.inf)
    bloch = mean / k_inv
    matrix = basis.synthesize(bloch)
    return Reconstruction(
        bloch=bloch,
        matrix=matrix,
        queries=samples,
        stderr=stderr,
        projected=clip_to_density(matrix) if project else None,
        method="monte-carlo",
    )


def calibrate_index_convention(seed=0, samples=20000):
    """Decide numerically which index of ``D(u)`` the inversion integral frees.

    Integrates both ``D(u)[:, 0] W(u)`` (free row index) and ``D(u)[0, :] W(u)``
    (free column index) against a reference qubit state with distinct Bloch
    components and returns ``"column"`` if the first reproduces them, ``"row"``
    if the second does.
    """
    basis = build_basis(2)
    bloch = np.array([0.5, -0.3, 0.2])
    oracle = StateOracle(basis.synthesize(bloch))
    rng = generator(seed)
    us = haar_sample(2, rng, size=samples)
    w = oracle.batch(us) - 0.5
    d = _adjoint_batch(us, basis)
    k_inv = inversion_constant(2)
    col = (d[:, :, 0] * w[:, None]).mean(axis=0) / k_inv
    row = (d[:, 0, :] * w[:, None]).mean(axis=0) / k_inv
    err_col = np.max(np.abs(col - bloch))
    err_row = np.max(np.abs(row - bloch))
    return "column" if err_col < err_row else "row"


def _check_scalar(q, tol):
    if not -tol <= q <= 1 + tol:
        raise DataError(f"projector expectation {q} outside [0, 1]")
    return float(q)


def _cartan_components(basis, diag):
    return {k: float(np.real(np.diag(basis[k])) @ diag) for k in basis.cartan_indices}


def finite_reconstruct(oracle, basis, tol=TOL.record_sum):
    """Exact reconstruction from ``1 + N(N-1)`` frame measurements.

    The identity frame gives the Cartan components. Each root ``E_k`` is read
    from the frame ``u_k`` that diagonalises it. If the identity-frame record is
    a point mass the lift is unique, so ``P_m`` is returned without querying
    the root frames.
    """
    N = basis.N
    w0 = _as_record(oracle(np.eye(N, dtype=complex)), N).check(tol)
    queries = 1
    m = int(np.argmax(w0))
    if w0[m] >= 1 - tol:
        rho = np.zeros((N, N), dtype=complex)
        rho[m, m] = 1.0
        return Reconstruction(
            bloch=basis.components(rho), matrix=rho, queries=queries,
            method="finite", extra={"point_mass": m},
        )
    bloch = np.zeros(len(basis))
    for k, v in _cartan_components(basis, w0).items():
        bloch[k] = v
    for k in basis.root_indices:
        u = root_rotation(k, basis)
        w = _as_record(oracle(u), N).check(tol)
        queries += 1
        d = np.real(np.diag(dagger(u) @ basis[k] @ u))
        bloch[k] = d @ w
    return Reconstruction(
        bloch=bloch, matrix=basis.synthesize(bloch), queries=queries, method="finite"
    )


def _as_record(rec, N):
    if not isinstance(rec, MeasurementRecord):
        rec = MeasurementRecord(frame=None, expectations=np.asarray(rec, dtype=float))
    if np.shape(rec.expectations) != (N,):
        raise ShapeError(f"record has {np.shape(rec.expectations)} entries, expected {N}")
    return rec


def projector_frames(N, basis=None):
    """The ``N^2`` frames used by :func:`projector_protocol`, in query order."""
    basis = build_basis(N) if basis is None else basis
    frames = [shift_unitary(k, N) for k in range(1, N + 1)]
    for k in basis.root_indices:
        i = basis.root_planes[k][0]
        frames.append(root_rotation(k, basis) @ shift_unitary(i + 1, N))
    return frames


def projector_protocol(oracle, N, tol=TOL.record_sum):
    """Reconstruction from ``N^2`` numbers ``Tr rho(u P_1 u*)``.

    ``oracle(u)`` must return that scalar. The shift unitaries carry ``P_1`` to
    every ``P_k`` (the diagonal); for a root in the ``(i, j)`` plane the frame
    ``u_k s_i`` carries ``P_1`` to the projector on the ``i``-th eigenvector of
    the root. The ``j``-th weight of that frame follows from the diagonal, since
    ``u_k`` only mixes ``e_i`` and ``e_j``.
    """
    basis = build_basis(N)
    frames = projector_frames(N, basis)
    diag = np.array([_check_scalar(oracle(f), tol) for f in frames[:N]])
    if abs(diag.sum() - 1) > tol:
        raise DataError(f"diagonal expectations sum to {diag.sum():.12g}, not 1")
    bloch = np.zeros(len(basis))
    for k, v in _cartan_components(basis, diag).items():
        bloch[k] = v
    for k, frame in zip(basis.root_indices, frames[N:]):
        i, j, _ = basis.root_planes[k]
        q = _check_scalar(oracle(frame), tol)
        u = root_rotation(k, basis)
        d = np.real(np.diag(dagger(u) @ basis[k] @ u))
        bloch[k] = d[i] * q + d[j] * (diag[i] + diag[j] - q)
    return Reconstruction(
        bloch=bloch, matrix=basis.synthesize(bloch), queries=len(frames), method="projector"
    )


@dataclass
class OrthogonalityResult:
    max_deviation: float
    second_moment: np.ndarray  # (d^2, d^2): mean of D_ab D_cd, flattened pairs
    second_stderr: np.ndarray
    first_moment: np.ndarray  # (d, d): mean of D_ab
    first_stderr: np.ndarray
    samples: int


def orthogonality_check(N, samples, seed=None, chunk=10000):
    """Monte-Carlo check of ``int D_ab D_cd du = delta_ac delta_bd / (N^2 - 1)``.

    The adjoint representation is real, so complex conjugation is a no-op.
    """
    if samples < 1:
        raise InvalidInputError("need at least one sample")
    basis = build_basis(N)
    d = len(basis)
    rng = generator(seed)
    s1 = np.zeros(d * d)
    q1 = np.zeros(d * d)
    s2 = np.zeros((d * d, d * d))
    q2 = np.zeros((d * d, d * d))
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = _adjoint_batch(haar_sample(N, rng, size=m), basis).reshape(m, d * d)
        s1 += x.sum(axis=0)
        q1 += (x * x).sum(axis=0)
        s2 += x.T @ x
        q2 += (x * x).T @ (x * x)
        done += m
    mean1 = s1 / samples
    mean2 = s2 / samples
    denom = max(samples - 1, 1)
    se1 = np.sqrt(np.clip(q1 / samples - mean1**2, 0, None) / denom)
    se2 = np.sqrt(np.clip(q2 / samples - mean2**2, 0, None) / denom)
    expected = np.eye(d * d) / d
    return OrthogonalityResult(
        max_deviation=float(np.max(np.abs(mean2 - expected))),
        second_moment=mean2,
        second_stderr=se2,
        first_moment=mean1.reshape(d, d),
        first_stderr=se1.reshape(d, d),
        samples=samples,
    )


__all__ = [
    "INDEX_CONVENTION",
    "MeasurementRecord",
    "Reconstruction",
    "StateOracle",
    "calibrate_index_convention",
    "finite_reconstruct",
    "inversion_constant",
    "mc_reconstruct",
    "measure",
    "orthogonality_check",
    "projector_frames",
    "projector_protocol",
    "records_oracle",
]
