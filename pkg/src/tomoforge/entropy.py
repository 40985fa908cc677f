"""Hausdorff-Young and entropic uncertainty checks on the line and the circle.

Continuum transform on the line: ``psi~(k) = (2 pi)^{-1/2} int e^{-ikx} psi(x) dx``,
approximated on a uniform grid by an FFT scaled with ``dx / sqrt(2 pi)``; the
discrete Parseval identity then holds exactly. Circle coefficients use the
probability measure ``d phi / 2 pi``: ``c_m = (1/M) sum_k Phi_k e^{-i m phi_k}``.

Only one-dimensional grids are supported on the line; both inequalities are
additive over product functions, so higher dimensions add cost but no coverage.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError, ResolutionError, TruncationError

DECAY_TOL = 1e-8  # |psi| at the grid edge relative to its maximum
ALIAS_TOL = 1e-10
ENTROPY_BOUND_1D = 1.0 + math.log(math.pi)


@dataclass(frozen=True)
class GridFunction:
    """Samples on ``[-L, L)`` (``domain="line"``) or ``[0, 2 pi)`` (``"circle"``)."""

    samples: np.ndarray
    domain: str = "line"
    L: float = 1.0

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 1 or s.size < 16:
            raise InvalidInputError("need a 1-d grid with at least 16 points")
        if self.domain not in ("line", "circle"):
            raise InvalidInputError(f"unknown domain {self.domain!r}")
        if self.domain == "line" and not self.L > 0:
            raise InvalidInputError("half-width L must be positive")
        if not np.all(np.isfinite(s)):
            raise InvalidInputError("samples must be finite")
        object.__setattr__(self, "samples", s)

    @classmethod
    def on_line(cls, fn, L, M):
        x = -L + 2 * L * np.arange(M) / M
        return cls(np.asarray(fn(x), dtype=complex), "line", float(L))

    @classmethod
    def on_circle(cls, fn, M):
        phi = 2 * np.pi * np.arange(M) / M
        return cls(np.asarray(fn(phi), dtype=complex), "circle", math.pi)

    @property
    def M(self):
        return self.samples.size

    @property
    def dx(self):
        return 2 * self.L / self.M if self.domain == "line" else 2 * np.pi / self.M

    @property
    def nodes(self):
        if self.domain == "line":
            return -self.L + self.dx * np.arange(self.M)
        return self.dx * np.arange(self.M)

    def coarsen(self):
        """Every other sample (same extent, twice the spacing)."""
        return GridFunction(self.samples[::2], self.domain, self.L)

    def pad(self):
        """Zero-extend a line grid to ``[-2L, 2L)``: same spacing, half the wavenumber step."""
        if self.domain != "line":
            raise InvalidInputError("only line grids can be padded")
        z = np.zeros(self.M // 2, dtype=complex)
        return GridFunction(np.concatenate([z, self.samples, z]), "line", 2 * self.L)


def hy_constant(p, n=1):
    """``(2 pi / q)^{n / 2q} (2 pi / p)^{-n / 2p}`` with ``1/p + 1/q = 1``."""
    if not 1 < p <= 2:
        raise DomainError(f"p must lie in (1, 2], got {p}")
    q = p / (p - 1)
    return (2 * math.pi / q) ** (n / (2 * q)) * (2 * math.pi / p) ** (-n / (2 * p))


def fourier_line(psi):
    """Wavenumbers and the continuum transform sampled there."""
    if psi.domain != "line":
        raise InvalidInputError("fourier_line needs a function on the line")
    M, dx = psi.M, psi.dx
    k = 2 * np.pi * np.fft.fftshift(np.fft.fftfreq(M, d=dx))
    raw = np.fft.fftshift(np.fft.fft(psi.samples))
    # grid starts at x0 = -L, not 0
    return k, raw * np.exp(1j * k * psi.L) * dx / math.sqrt(2 * math.pi)


def _lp(values, p, weight):
    return float(np.sum(np.abs(values) ** p) * weight) ** (1.0 / p)


def _check_decay(psi):
    a = np.abs(psi.samples)
    edge = max(a[0], a[-1])
    if edge > DECAY_TOL * a.max():
        raise TruncationError(f"|psi| at the grid edge is {edge / a.max():.2e} of its maximum; enlarge L")


def _hy_slack_line(psi, p):
    q = p / (p - 1)
    k, spectrum = fourier_line(psi)
    dk = k[1] - k[0]
    return hy_constant(p) * _lp(psi.samples, p, psi.dx) - _lp(spectrum, q, dk)


@dataclass
class HYResult:
    slack: float
    eps: float  # quadrature error estimate from coarsening and zero-padding
    kappa: float
    p: float

    @property
    def holds(self):
        return self.slack >= -max(self.eps, 1e-12)


def hy_check_rn(psi, p):
    """``kappa(p) ||psi||_p - ||psi~||_q`` with a refinement error estimate."""
    _check_decay(psi)
    s = _hy_slack_line(psi, p)
    # coarsening probes the x spacing, padding the k spacing
    eps = max(abs(s - _hy_slack_line(psi.coarsen(), p)), abs(s - _hy_slack_line(psi.pad(), p)))
    return HYResult(s, eps, hy_constant(p), p)


def _entropy(density, weight):
    d = density[density > 0]
    return float(-np.sum(d * np.log(d)) * weight) + 0.0


@dataclass
class EntropyResult:
    S_x: float
    S_p: float
    total: float
    bound: float
    dF_dq: float  # one-sided derivative of the HY slack at q = 2+

    @property
    def slack(self):
        return self.total - self.bound


def entropy_sum_rn(psi, dq=1e-3):
    _check_decay(psi)
    norm = _lp(psi.samples, 2, psi.dx)
    if abs(norm - 1) > 1e-8:
        raise DomainError(f"psi must be L2-normalised, ||psi||_2 = {norm:.12g}")
    k, spectrum = fourier_line(psi)
    dk = k[1] - k[0]
    sx = _entropy(np.abs(psi.samples) ** 2, psi.dx)
    sp = _entropy(np.abs(spectrum) ** 2, dk)

    def slack_at(q):
        p = q / (q - 1)
        return hy_constant(p) * _lp(psi.samples, p, psi.dx) - _lp(spectrum, q, dk)

    f0, f1, f2 = slack_at(2.0), slack_at(2.0 + dq), slack_at(2.0 + 2 * dq)
    deriv = (-3 * f0 + 4 * f1 - f2) / (2 * dq)
    return EntropyResult(sx, sp, sx + sp, ENTROPY_BOUND_1D, deriv)


def circle_coefficients(phi):
    """``c_m`` for ``m = -M/2 .. M/2 - 1`` (ascending)."""
    if phi.domain != "circle":
        raise InvalidInputError("circle_coefficients needs a function on the circle")
    m = np.fft.fftshift(np.fft.fftfreq(phi.M, d=1.0 / phi.M)).astype(int)
    return m, np.fft.fftshift(np.fft.fft(phi.samples)) / phi.M


@dataclass
class CircleResult:
    hy_slack: float
    entropy_slack: float | None
    S_phi: float | None
    S_coeff: float | None
    eps: float


def u1_check(phi, p):
    """HY slack ``||Phi||_p - ||c||_q`` and, for normalised ``Phi``, the entropy slack."""
    if not 1 < p <= 2:
        raise DomainError(f"p must lie in (1, 2], got {p}")
    q = p / (p - 1)
    m, c = circle_coefficients(phi)
    tail = np.abs(c[np.abs(m) > phi.M // 4])
    if tail.size and tail.max() > ALIAS_TOL:
        raise ResolutionError(f"Fourier tail {tail.max():.2e} above {ALIAS_TOL:g}; use more points")
    w = 1.0 / phi.M
    slack = _lp(phi.samples, p, w) - _lp(c, q, 1.0)
    coarse = phi.coarsen()
    eps = abs(_lp(coarse.samples, p, 1.0 / coarse.M) - _lp(phi.samples, p, w))
    norm = _lp(phi.samples, 2, w)
    if abs(norm - 1) > 1e-8:
        return CircleResult(slack, None, None, None, eps)
    s_phi = _entropy(np.abs(phi.samples) ** 2, w)
    s_c = _entropy(np.abs(c) ** 2, 1.0)
    return CircleResult(slack, s_phi + s_c, s_phi, s_c, eps)


# test functions on the line ------------------------------------------------

def gaussian(x, s=1.0, x0=0.0, k0=0.0):
    """L2-normalised ``exp(-(x - x0)^2 / (2 s^2) + i k0 x)``."""
    return (np.pi * s * s) ** -0.25 * np.exp(-((x - x0) ** 2) / (2 * s * s) + 1j * k0 * x)


def double_bump(x, a=3.0, s=1.0):
    g = np.exp(-((x - a) ** 2) / (2 * s * s)) + np.exp(-((x + a) ** 2) / (2 * s * s))
    return g / math.sqrt(float(np.sum(g * g) * (x[1] - x[0])))


def smooth_bump(x, width=4.0):
    """Compactly supported ``exp(-1 / (1 - (x/width)^2))``, normalised on the grid."""
    y = np.asarray(x, dtype=float) / width
    out = np.zeros_like(y)
    inside = np.abs(y) < 1
    out[inside] = np.exp(-1.0 / (1.0 - y[inside] ** 2))
    return out / math.sqrt(float(np.sum(out * out) * (x[1] - x[0])))


def random_smooth(x, rng, terms=4):
    """Normalised sum of a few random complex Gaussians."""
    out = np.zeros(np.shape(x), dtype=complex)
    for _ in range(terms):
        amp = rng.normal() + 1j * rng.normal()
        out += amp * gaussian(x, s=rng.uniform(0.6, 1.8), x0=rng.uniform(-3, 3), k0=rng.uniform(-2, 2))
    return out / math.sqrt(float(np.sum(np.abs(out) ** 2) * (x[1] - x[0])))


LINE_FUNCTIONS = {
    "gaussian": gaussian,
    "squeezed": lambda x: gaussian(x, s=2.0),
    "double": double_bump,
    "bump": smooth_bump,
}


def random_band_limited_circle(M, rng, band=8):
    """Normalised trigonometric polynomial with modes ``|m| <= band`` on an M-point circle."""
    modes = np.arange(-band, band + 1)
    amp = rng.normal(size=modes.size) + 1j * rng.normal(size=modes.size)
    amp /= np.linalg.norm(amp)
    phi = 2 * np.pi * np.arange(M) / M
    return GridFunction(np.exp(1j * np.outer(phi, modes)) @ amp, "circle", math.pi)
