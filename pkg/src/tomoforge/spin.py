"""SU(2): Wigner matrices, exact quadrature, group entropy and spin tomography.

Conventions: magnetic indices run ``m = j, j-1, ..., -j`` (row/column 0 is
``m = j``); ``D^j(a, b, c) = exp(-i a J3) exp(-i b Jy) exp(-i c J3)``. Euler
angles cover SU(2) with ``a in [0, 2 pi)``, ``b in [0, pi]``,
``c in [0, 4 pi)`` and ``d mu = sin b da db dc / (16 pi^2)``.

The orthonormal functions are ``d^j_{mn}(g) = sqrt(2j+1) D^j_{mn}(g)`` and a
band-limited ``f`` has coefficients ``f^_{mn} = <d^j_{mn}, f>``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .config import SPIN_J_MAX
from .errors import (ConsistencyError, DomainError, InvalidInputError, PivotError,
                     ResolutionError)
from .operators import as_matrix, validate_density


def spin_value(j):
    """Validate a non-negative half-integer and return it as a float."""
    fj = Fraction(j).limit_denominator(2)
    if fj < 0 or fj.denominator > 2 or abs(float(fj) - float(j)) > 1e-12:
        raise InvalidInputError(f"spin must be a non-negative half-integer, got {j}")
    if fj > SPIN_J_MAX:
        raise InvalidInputError(f"spin {j} exceeds the configured maximum {SPIN_J_MAX}")
    return float(fj)


def spins_up_to(j_max):
    """``0, 1/2, 1, ..., j_max``."""
    return [k / 2 for k in range(int(round(2 * spin_value(j_max))) + 1)]


@lru_cache(maxsize=None)
def _spin_ops(two_j):
    j = two_j / 2
    m = j - np.arange(two_j + 1)
    jz = np.diag(m).astype(complex)
    # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>; row index of m+1 is one less
    jp = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    jm = jp.conj().T
    jy = (jp - jm) / 2j
    w, v = np.linalg.eigh(jy)
    return m, jz, jp, jm, jy, w, v


def spin_matrices(j):
    """``(m, J3, J+, J-, Jy)`` for spin ``j``."""
    m, jz, jp, jm, jy, _, _ = _spin_ops(int(round(2 * spin_value(j))))
    return m, jz.copy(), jp.copy(), jm.copy(), jy.copy()


def small_d(j, beta):
    """``exp(-i beta Jy)`` for one angle or a 1-d array of angles (stacked)."""
    _, _, _, _, _, w, v = _spin_ops(int(round(2 * spin_value(j))))
    b = np.asarray(beta, dtype=float)
    ph = np.exp(-1j * np.multiply.outer(b, w))
    out = np.einsum("ik,...k,jk->...ij", v, ph, v.conj())
    return out.real if np.allclose(out.imag, 0, atol=1e-13) else out


def wigner_d(j, angles):
    a, b, c = (float(x) for x in angles)
    m = _spin_ops(int(round(2 * spin_value(j))))[0]
    return np.exp(-1j * a * m)[:, None] * small_d(j, b) * np.exp(-1j * c * m)[None, :]


def euler_from_su2(u):
    """Euler angles of a 2x2 special unitary in the ranges used here."""
    u = as_matrix(u, square=True)
    if u.shape != (2, 2):
        raise InvalidInputError("expected a 2x2 matrix")
    beta = 2 * math.atan2(abs(u[1, 0]), abs(u[0, 0]))
    # u00 = e^{-i(a+c)/2} cos(b/2), u10 = e^{i(a-c)/2} sin(b/2)
    total = -2 * np.angle(u[0, 0]) if abs(u[0, 0]) > 1e-14 else 0.0
    diff = 2 * np.angle(u[1, 0]) if abs(u[1, 0]) > 1e-14 else 0.0
    alpha, gamma = 0.5 * (total + diff), 0.5 * (total - diff)
    shift = math.floor(alpha / (2 * math.pi))
    alpha -= 2 * math.pi * shift
    gamma = (gamma + 2 * math.pi * shift) % (4 * math.pi)
    return alpha, beta, gamma


def compose(g1, g2):
    """Euler angles of ``g1 g2``, computed in the faithful spin-1/2 representation."""
    return euler_from_su2(wigner_d(0.5, g1) @ wigner_d(0.5, g2))


# quadrature -----------------------------------------------------------------

@dataclass(frozen=True)
class SU2Quadrature:
    """Product rule exact for ``int conj(D^j_{mn}) D^{j'}_{m'n'} d mu`` with
    ``j, j' <= j_max``: trapezoid in ``alpha`` and ``gamma`` with
    ``2(2 j_max + 1)`` points each and Gauss-Legendre in ``cos beta`` with
    ``floor(j_max) + 1`` points."""

    j_max: float
    alpha: np.ndarray = field(repr=False)
    beta: np.ndarray = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    w_beta: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, j_max, n_alpha=None, n_beta=None, n_gamma=None):
        j_max = spin_value(j_max)
        n_ag = 2 * int(round(2 * j_max)) + 2
        na = n_alpha or n_ag
        ng = n_gamma or n_ag
        nb = n_beta or int(math.floor(j_max)) + 1
        x, w = np.polynomial.legendre.leggauss(nb)
        alpha = 2 * np.pi * np.arange(na) / na
        gamma = 4 * np.pi * np.arange(ng) / ng
        return cls(j_max, alpha, np.arccos(x), gamma, w / 2)

    @property
    def shape(self):
        return (self.alpha.size, self.beta.size, self.gamma.size)

    def weights(self):
        return (self.w_beta[None, :, None]
                / (self.alpha.size * self.gamma.size) * np.ones(self.shape))

    def grid(self):
        return np.meshgrid(self.alpha, self.beta, self.gamma, indexing="ij")

    def integrate(self, values):
        return np.einsum("abc,abc->", values, self.weights())


@dataclass
class GroupFourierData:
    """Coefficient blocks ``f^j`` (``(2j+1) x (2j+1)``) for ``j = 0 .. j_max``."""

    j_max: float
    blocks: dict  # j -> complex matrix
    plancherel_residual: float | None = None

    def norm2(self):
        return float(sum(np.sum(np.abs(b) ** 2) for b in self.blocks.values()))

    def evaluate_grid(self, alpha, beta, gamma):
        """``f`` on the product grid ``alpha x beta x gamma``."""
        out = np.zeros((np.size(alpha), np.size(beta), np.size(gamma)), dtype=complex)
        for j, blk in self.blocks.items():
            m = _spin_ops(int(round(2 * j)))[0]
            d = small_d(j, beta)  # (nb, d, d)
            ea = np.exp(-1j * np.multiply.outer(alpha, m))
            ec = np.exp(-1j * np.multiply.outer(gamma, m))
            out += math.sqrt(2 * j + 1) * np.einsum("mn,bmn,am,cn->abc", blk, d, ea, ec)
        return out

    def __call__(self, alpha, beta, gamma):
        a, b, c = np.broadcast_arrays(alpha, beta, gamma)
        out = np.zeros(a.shape, dtype=complex)
        for j, blk in self.blocks.items():
            m = _spin_ops(int(round(2 * j)))[0]
            d = small_d(j, b.ravel()).reshape(b.shape + blk.shape)
            ph = np.exp(-1j * (a[..., None, None] * m[:, None] + c[..., None, None] * m[None, :]))
            out += math.sqrt(2 * j + 1) * np.einsum("mn,...mn->...", blk, d * ph)
        return out


def random_band_limited(j_max, rng, normalize=True):
    blocks = {}
    for j in spins_up_to(j_max):
        dim = int(round(2 * j)) + 1
        blocks[j] = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    f = GroupFourierData(spin_value(j_max), blocks)
    if normalize:
        s = math.sqrt(f.norm2())
        f.blocks = {j: b / s for j, b in blocks.items()}
    return f


def basis_function(j, m_index, n_index):
    """``d^j_{mn}`` as coefficient data (one unit coefficient)."""
    j = spin_value(j)
    dim = int(round(2 * j)) + 1
    blk = np.zeros((dim, dim), dtype=complex)
    blk[m_index, n_index] = 1.0
    blocks = {jj: np.zeros((int(round(2 * jj)) + 1,) * 2, dtype=complex) for jj in spins_up_to(j)}
    blocks[j] = blk
    return GroupFourierData(j, blocks)


def _sample(f, quad):
    a, b, c = quad.grid()
    if isinstance(f, GroupFourierData):
        return f.evaluate_grid(quad.alpha, quad.beta, quad.gamma)
    return np.asarray(f(a, b, c), dtype=complex)


def su2_quadrature(f, j_max, quad=None, tol=1e-8):
    """Coefficients ``f^j_{mn} = sqrt(2j+1) int conj(D^j_{mn}) f d mu`` for ``j <= j_max``.

    ``quad`` must be exact at ``j_max``; the Plancherel residual against
    ``int |f|^2`` on a finer rule is recorded and must stay below ``tol``
    (otherwise ``f`` is not band-limited at ``j_max``).
    """
    j_max = spin_value(j_max)
    quad = quad or SU2Quadrature.build(j_max)
    if quad.j_max < j_max:
        raise ResolutionError(f"quadrature exact to j={quad.j_max} cannot resolve j_max={j_max}")
    vals = _sample(f, quad)
    w = quad.weights()
    blocks = {}
    for j in spins_up_to(j_max):
        m = _spin_ops(int(round(2 * j)))[0]
        d = small_d(j, quad.beta)
        ea = np.exp(1j * np.multiply.outer(quad.alpha, m))
        ec = np.exp(1j * np.multiply.outer(quad.gamma, m))
        # conj(D_mn) = e^{i m a} d_mn e^{i n c} (d is real)
        blocks[j] = math.sqrt(2 * j + 1) * np.einsum("abc,abc,am,bmn,cn->mn", vals, w, ea, d, ec)
    data = GroupFourierData(j_max, blocks)
    fine = SU2Quadrature.build(2 * j_max)
    norm = float(np.real(fine.integrate(np.abs(_sample(f, fine)) ** 2)))
    data.plancherel_residual = abs(norm - data.norm2())
    if data.plancherel_residual > tol * max(1.0, norm):
        raise ResolutionError(
            f"Plancherel residual {data.plancherel_residual:.2e}: f is not band-limited at j={j_max}")
    return data


# group entropy --------------------------------------------------------------

def _xlogx(p):
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def _function_entropy(f, j_max, refine):
    # |f|^2 log|f|^2 is not a polynomial: use an oversampled rule and compare
    # with one of half the resolution
    def on(level):
        jq = max(1.0, 2 * j_max) * level
        quad = SU2Quadrature.build(jq, n_beta=int(8 * level * (j_max + 1)))
        return -float(quad.integrate(_xlogx(np.abs(_sample(f, quad)) ** 2))) + 0.0

    fine, coarse = on(refine), on(refine / 2)
    return fine, abs(fine - coarse)


@dataclass
class GroupEntropyResult:
    function_entropy: float  # -int |f|^2 ln |f|^2 d mu
    coefficient_entropy: float  # -sum |f^_mn|^2 ln |f^_mn|^2
    slack: float  # sum of the two entries above
    block_entropy: float  # -sum_j Tr(B ln B) + sum_j Tr(B) ln(2j+1), B = f^ f^*
    weighted_slack: float  # function_entropy + block_entropy
    refine_error: float
    plancherel_residual: float


def group_entropy_check(f, j_max, refine=4):
    """Entropies of a normalised band-limited ``f`` and of its coefficients.

    ``slack`` pairs the function entropy with the entropy of the individual
    coefficients. ``weighted_slack`` uses the spectra of the blocks
    ``B_j = f^j f^j*`` and the irrep dimensions; it is the form that follows
    from Hausdorff-Young on SU(2) and is non-negative for every ``f``.
    """
    data = f if isinstance(f, GroupFourierData) else su2_quadrature(f, j_max)
    n2 = data.norm2()
    if abs(n2 - 1) > 1e-8:
        raise DomainError(f"f must be L2-normalised, ||f||^2 = {n2:.12g}")
    s_func, err = _function_entropy(data, data.j_max, refine)
    coeffs = np.concatenate([np.abs(b).ravel() ** 2 for b in data.blocks.values()])
    s_coef = -float(np.sum(_xlogx(coeffs))) + 0.0
    s_block = 0.0
    for j, b in data.blocks.items():
        lam = np.clip(np.linalg.eigvalsh(b @ b.conj().T), 0, None)
        s_block += float(lam.sum()) * math.log(2 * j + 1) - float(np.sum(_xlogx(lam)))
    return GroupEntropyResult(s_func, s_coef, s_func + s_coef, s_block, s_func + s_block, err,
                              float(data.plancherel_residual or 0.0))


# tensor operators and spin tomography ------------------------------------------

@dataclass
class TensorOperatorSet:
    """``Lambda^j_m`` for ``j = 0 .. 2J``; adjoint ``Lambda^j_m* = (-1)^m Lambda^j_{-m}``,
    normalised so that ``Tr(Lambda^j_m Lambda^{j'}_{m'}*) = 2 delta delta``."""

    J: float
    ops: dict  # (j, m) -> matrix

    @property
    def dim(self):
        return int(round(2 * self.J)) + 1

    def keys(self):
        return list(self.ops)

    def gram(self):
        keys = self.keys()
        mats = np.array([self.ops[k] for k in keys])
        return np.einsum("aij,bij->ab", mats, mats.conj())

    def components(self, rho):
        """``rho^j_m = Tr(rho Lambda^j_m)``."""
        rho = np.asarray(rho)
        return {k: complex(np.trace(rho @ op)) for k, op in self.ops.items()}

    def synthesize(self, comps):
        """Inverse of :meth:`components` for Hermitian ``rho``: ``1/2 sum conj(rho^j_m) Lambda^j_m``."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for k, v in comps.items():
            out += 0.5 * np.conj(v) * self.ops[k]
        return out

    def expand(self, a):
        """Coefficients of an arbitrary matrix: ``a = sum_k x_k Lambda_k``."""
        a = np.asarray(a)
        return {k: complex(0.5 * np.trace(op.conj().T @ a)) for k, op in self.ops.items()}

    def projector_coefficients(self, i):
        """``c^j_{im} = 1/2 Tr(Lambda^j_m* P_i)`` for the projector on basis state ``i``."""
        p = np.zeros((self.dim, self.dim))
        p[i, i] = 1.0
        return self.expand(p)


@lru_cache(maxsize=None)
def _tensor_ops(two_J):
    J = two_J / 2
    _, _, jp, jm, _, _, _ = _spin_ops(two_J)
    ops = {}
    for j in range(two_J + 1):
        top = np.linalg.matrix_power(jp, j) * (-1) ** j
        top = top * math.sqrt(2 / np.real(np.trace(top @ top.conj().T)))
        ops[(j, j)] = top
        cur = top
        for m in range(j, -j, -1):
            cur = jm @ cur - cur @ jm
            cur = cur * math.sqrt(2 / np.real(np.trace(cur @ cur.conj().T)))
            ops[(j, m - 1)] = cur
    return TensorOperatorSet(J, ops)


def tensor_ops(J):
    J = spin_value(J)
    if 2 * J + 1 > 32:
        raise InvalidInputError("tensor operators are limited to 2J + 1 <= 32")
    return _tensor_ops(int(round(2 * J)))


def j3_commutator_constant(J):
    """Measured ``z`` in ``[J3, Lambda^j_m] = z m Lambda^j_m`` (a single number for the set)."""
    ts = tensor_ops(J)
    _, jz, _, _, _ = spin_matrices(J)
    num = den = 0.0
    for (j, m), op in ts.ops.items():
        if m == 0:
            continue
        comm = jz @ op - op @ jz
        num += np.vdot(m * op, comm)
        den += np.vdot(m * op, m * op).real
    z = complex(num / den)
    return z.real if abs(z.imag) < 1e-12 else z


def spin_tomogram(rho, i, angles, tol=1e-9):
    """``Tr rho U(g) P_i U(g)*`` checked against its tensor-operator expansion."""
    rho = as_matrix(rho, square=True)
    dim = rho.shape[0]
    J = (dim - 1) / 2
    if not 0 <= i < dim:
        raise InvalidInputError(f"projector index {i} out of range for dimension {dim}")
    u = wigner_d(J, angles)
    direct = float(np.real(np.vdot(u[:, i], rho @ u[:, i])))
    ts = tensor_ops(J)
    comps = ts.components(rho)
    c = ts.projector_coefficients(i)
    total = 0.0
    for j in range(int(round(2 * J)) + 1):
        dj = wigner_d(j, angles)
        for m in range(-j, j + 1):
            if abs(c[(j, m)]) < 1e-15:
                continue
            for mp in range(-j, j + 1):
                total += c[(j, m)] * comps[(j, mp)] * dj[j - mp, j - m]
    if abs(total - direct) > tol:
        raise ConsistencyError(f"tomogram expansion mismatch {abs(total - direct):.3e}")
    return direct


class SpinOracle:
    """Tomogram values for a hidden state, counting queries."""

    def __init__(self, rho):
        self.rho = validate_density(rho).matrix
        self.dim = self.rho.shape[0]
        self.queries = 0

    def __call__(self, i, angles):
        self.queries += 1
        u = wigner_d((self.dim - 1) / 2, angles)
        return float(np.real(np.vdot(u[:, i], self.rho @ u[:, i])))


def _pivot(c, ell, projector, dim):
    if projector is not None:
        val = c[projector][(ell, 0)]
        if abs(val) < 1e-12:
            raise PivotError(f"c^{ell}_{{{projector},0}} vanishes; choose another projector index")
        return projector, val
    best = max(range(dim), key=lambda i: abs(c[i][(ell, 0)]))
    if abs(c[best][(ell, 0)]) < 1e-12:
        raise PivotError(f"no projector has a nonzero rank-{ell} component")
    return best, c[best][(ell, 0)]


@dataclass
class SpinReconstruction:
    rho: np.ndarray
    components: dict
    queries: int
    pivots: dict


def spin_reconstruct(oracle, J, projector=None, quad=None):
    """Invert the tomogram using ``int conj(D^l_{n0}) W_i d mu = c^l_{i0} rho^l_n / (2l + 1)``.

    ``projector=None`` picks, for each rank ``l``, the basis projector with the
    largest ``|c^l_{i0}|``; an explicit index raises PivotError if some
    ``c^l_{i0}`` vanishes.
    """
    J = spin_value(J)
    dim = int(round(2 * J)) + 1
    ts = tensor_ops(J)
    quad = quad or SU2Quadrature.build(2 * J)
    if quad.j_max < 2 * J:
        raise ResolutionError(f"quadrature must be exact at j={2 * J}")
    c = [ts.projector_coefficients(i) for i in range(dim)]
    pivots = {ell: _pivot(c, ell, projector, dim) for ell in range(dim)}
    a, b, g = quad.grid()
    w = quad.weights()
    needed = sorted({p for p, _ in pivots.values()})
    start = getattr(oracle, "queries", None)
    tomo = {i: np.array([oracle(i, (x, y, z)) for x, y, z in zip(a.ravel(), b.ravel(), g.ravel())])
            .reshape(quad.shape) for i in needed}
    comps = {}
    for ell in range(dim):
        i, cval = pivots[ell]
        d = small_d(ell, quad.beta)
        for n in range(-ell, ell + 1):
            # conj(D^l_{n0}) = e^{i n alpha} d^l_{n0}(beta)
            kernel = np.exp(1j * n * a) * d[:, ell - n, ell][None, :, None]
            comps[(ell, n)] = complex((2 * ell + 1) / cval * np.sum(w * kernel * tomo[i]))
    rho = ts.synthesize(comps)
    rho = 0.5 * (rho + rho.conj().T)
    used = (oracle.queries - start) if start is not None else sum(t.size for t in tomo.values())
    return SpinReconstruction(rho, comps, used, {ell: p for ell, (p, _) in pivots.items()})
