"""A rotor coupled to an oscillator through a switched coupling ``lambda(t)``.

The apparatus coordinate obeys ``u'' + (1 + lambda(t)^2) u = lambda(t)``
in the Heisenberg picture, with the system momentum entering as a constant
factor. With the fundamental solutions ``u1`` (``u1(0)=1, u1'(0)=0``) and
``u2`` (``u2(0)=0, u2'(0)=1``),

    u_par(t) = -I2(t) u1(t) + I1(t) u2(t),   I_i(t) = int_0^t lambda u_i,

and for a ground-state oscillator ``<B(t)> = <pi> u_par(t)``. After the
coupling is switched off (``t > T``) this is ``<pi> (l1 u2 - l2 u1)`` with
``l_i = I_i(T)``, which lets ``<pi>`` be read off the apparatus.

All quantities are integrated together by a fixed-step classical RK4 on
``(u1, u1', u2, u2', I1, I2)``. Stage 1 uses the right limit of ``lambda`` and
stage 4 the left limit, so jumps that fall on grid points cost no accuracy.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (AccuracyError, ConfigError, ConsistencyError, InvalidInputError,
                     NoInformationError, ShapeError)

W_TOL = 1e-4  # Wronskian drift that triggers AccuracyError
FAMILIES = ("rect", "bump", "constant", "table")


@dataclass(frozen=True)
class CouplingProfile:
    """``lambda(t)``: ``rect``, ``bump`` (``l0 sin^2(pi t / T)``), ``table``
    (linear interpolation of ``(times, values)`` on ``[0, T]``) or
    ``constant`` (``l0`` for all ``t``; a test mode with no switch-off)."""

    family: str
    lambda0: float = 1.0
    T: float = 1.0
    times: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown profile family {self.family!r}; choose from {FAMILIES}")
        if self.family == "table":
            ts = np.asarray(self.times, dtype=float)
            vs = np.asarray(self.values, dtype=float)
            if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 2:
                raise ShapeError("tabulated profile needs matching 1-d times and values (>= 2 points)")
            if np.any(np.diff(ts) <= 0) or ts[0] < 0:
                raise InvalidInputError("tabulated times must be increasing and start at >= 0")
            if not np.all(np.isfinite(vs)):
                raise InvalidInputError("tabulated values must be finite")
            object.__setattr__(self, "times", tuple(map(float, ts)))
            object.__setattr__(self, "values", tuple(map(float, vs)))
            object.__setattr__(self, "T", float(ts[-1]))
        elif not (self.T > 0 and math.isfinite(self.lambda0)):
            raise ConfigError("profile needs T > 0 and a finite lambda0")

    @property
    def switch_off(self):
        return math.inf if self.family == "constant" else self.T

    def _inside(self, t):
        if self.family == "rect":
            return self.lambda0
        if self.family == "bump":
            return self.lambda0 * math.sin(math.pi * t / self.T) ** 2
        if self.family == "table":
            return float(np.interp(t, self.times, self.values))
        return self.lambda0

    def right(self, t):
        """``lambda(t+)``."""
        if self.family == "constant":
            return self.lambda0
        lo = self.times[0] if self.family == "table" else 0.0
        return self._inside(t) if lo <= t < self.T else 0.0

    def left(self, t):
        """``lambda(t-)``."""
        if self.family == "constant":
            return self.lambda0
        lo = self.times[0] if self.family == "table" else 0.0
        return self._inside(t) if lo < t <= self.T else 0.0

    def __call__(self, t):
        return self.right(t)

    def breakpoints(self):
        if self.family == "constant":
            return ()
        if self.family == "table":
            return tuple(self.times)
        return (0.0, self.T)


@dataclass
class Trajectory:
    profile: CouplingProfile
    h: float
    t: np.ndarray
    u1: np.ndarray
    du1: np.ndarray
    u2: np.ndarray
    du2: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    wronskian: np.ndarray
    lambda1: float | None
    lambda2: float | None
    u_par: np.ndarray | None = None
    apparatus_mean: np.ndarray | None = None
    momentum: float | None = None
    checks: dict = field(default_factory=dict)

    @property
    def wronskian_drift(self):
        return float(np.max(np.abs(self.wronskian - 1.0)))

    def post_window(self):
        """Mask of samples strictly after the switch-off time."""
        return self.t > self.profile.switch_off + 1e-12 * max(1.0, self.profile.switch_off)

    def to_json(self, stride=1):
        s = slice(None, None, max(1, int(stride)))
        out = {
            "h": self.h,
            "t": self.t[s].tolist(),
            "u1": self.u1[s].tolist(),
            "u2": self.u2[s].tolist(),
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "wronskian_drift": self.wronskian_drift,
        }
        if self.u_par is not None:
            out["u_par"] = self.u_par[s].tolist()
        if self.apparatus_mean is not None:
            out["apparatus_mean"] = self.apparatus_mean[s].tolist()
            out["momentum"] = self.momentum
        out["checks"] = dict(self.checks)
        return out

    def write_csv(self, fh, stride=1):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "u1", "u2", "u_par", "apparatus_mean"])
        zeros = np.zeros_like(self.t)
        up = self.u_par if self.u_par is not None else zeros
        b = self.apparatus_mean if self.apparatus_mean is not None else zeros
        for k in range(0, self.t.size, max(1, int(stride))):
            w.writerow([repr(float(x)) for x in (self.t[k], self.u1[k], self.u2[k], up[k], b[k])])


def _rhs(y, lam):
    u1, v1, u2, v2, _, _ = y
    w = 1.0 + lam * lam
    return (v1, -w * u1, v2, -w * u2, lam * u1, lam * u2)


def _axpy(y, a, k):
    return tuple(yi + a * ki for yi, ki in zip(y, k))


def solve_modes(profile, t_end, h=1e-3):
    """Fundamental solutions, Wronskian and the running integrals ``I1, I2``."""
    if not (h > 0 and t_end > 0):
        raise InvalidInputError("need h > 0 and t_end > 0")
    steps = int(round(t_end / h))
    if steps < 1:
        raise InvalidInputError("t_end must be at least one step")
    y = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    out = np.empty((steps + 1, 6))
    out[0] = y
    for k in range(steps):
        t = k * h
        tm = t + 0.5 * h
        lam_mid = profile.right(tm)
        k1 = _rhs(y, profile.right(t))
        k2 = _rhs(_axpy(y, 0.5 * h, k1), lam_mid)
        k3 = _rhs(_axpy(y, 0.5 * h, k2), lam_mid)
        k4 = _rhs(_axpy(y, h, k3), profile.left(t + h))
        y = tuple(yi + h / 6.0 * (a + 2 * b + 2 * c + d)
                  for yi, a, b, c, d in zip(y, k1, k2, k3, k4))
        out[k + 1] = y
    t = np.arange(steps + 1) * h
    u1, du1, u2, du2, i1, i2 = out.T
    wr = u1 * du2 - du1 * u2
    drift = float(np.max(np.abs(wr - 1.0)))
    if drift > W_TOL:
        raise AccuracyError(f"Wronskian drifted by {drift:.2e}; use a smaller step than h={h:g}")
    # lambda vanishes after switch-off, so the integrals have settled by t_end
    if profile.switch_off <= t[-1]:
        lam1, lam2 = float(i1[-1]), float(i2[-1])
    else:
        lam1 = lam2 = None
    return Trajectory(profile, h, t, u1, du1, u2, du2, i1, i2, wr, lam1, lam2)


def _ode_residual(profile, t, u, h, skip=2):
    """``|u'' + (1 + lambda^2) u - lambda|`` with a five-point second difference,
    away from breakpoints of ``lambda``."""
    d2 = (-u[4:] + 16 * u[3:-1] - 30 * u[2:-2] + 16 * u[1:-3] - u[:-4]) / (12 * h * h)
    tt = t[2:-2]
    lam = np.array([profile.right(x) for x in tt])
    res = np.abs(d2 + (1 + lam ** 2) * u[2:-2] - lam)
    keep = np.ones(tt.size, dtype=bool)
    for b in profile.breakpoints():
        keep &= np.abs(tt - b) > (skip + 0.5) * h
    return float(np.max(res[keep], initial=0.0))


def particular_solution(profile, modes, residual_tol=1e-6):
    """``u_par = -I2 u1 + I1 u2`` on the modes grid; the ODE residual is checked."""
    if modes.profile != profile:
        raise ShapeError("modes were integrated for a different profile")
    if modes.t.size < 5:
        raise ShapeError("need at least 5 grid points")
    u_par = -modes.I2 * modes.u1 + modes.I1 * modes.u2
    res = _ode_residual(profile, modes.t, u_par, modes.h)
    modes.checks["ode_residual"] = res
    if res > residual_tol:
        raise AccuracyError(f"particular solution ODE residual {res:.2e} exceeds {residual_tol:g}")
    modes.u_par = u_par
    return u_par


def mean_momentum(system):
    """``<pi>`` for an integer level ``n`` or weights ``p_n`` over ``n = 0, 1, ...``."""
    if isinstance(system, (int, np.integer)):
        return float(system)
    p = np.asarray(system, dtype=float)
    if p.ndim != 1 or np.any(p < -1e-12) or abs(p.sum() - 1) > 1e-9:
        raise InvalidInputError("system weights must form a probability vector over n = 0, 1, ...")
    return float(p @ np.arange(p.size))


def b_expectation(profile, system, t_end, h=1e-3, tol=1e-6):
    """Trajectory with ``<B(t)> = <pi> u_par(t)`` for a ground-state apparatus."""
    pi = mean_momentum(system)
    traj = solve_modes(profile, t_end, h)
    particular_solution(profile, traj)
    traj.apparatus_mean = pi * traj.u_par
    traj.momentum = pi
    post = traj.post_window()
    if traj.lambda1 is not None and post.any():
        closed = pi * (traj.lambda1 * traj.u2[post] - traj.lambda2 * traj.u1[post])
        gap = float(np.max(np.abs(closed - traj.apparatus_mean[post])))
        traj.checks["post_switch_gap"] = gap
        if gap > tol:
            raise ConsistencyError(f"post-switch form disagrees with the in-window construction by {gap:.2e}")
    return traj


@dataclass
class MomentumFit:
    momentum: float
    integer: int | None
    fit_error: float
    samples: int
    window: tuple

    def to_json(self):
        return {"momentum": self.momentum, "integer": self.integer,
                "fit_error": self.fit_error, "samples": self.samples, "window": list(self.window)}


def recover_momentum(traj, window=None, snap=0.25):
    """Least-squares ``<pi>`` from ``<B(t)>`` against ``l1 u2 - l2 u1`` after switch-off."""
    if traj.apparatus_mean is None:
        raise InvalidInputError("trajectory carries no <B(t)> samples")
    if traj.lambda1 is None:
        raise NoInformationError("the coupling never switches off inside the simulated interval")
    mask = traj.post_window()
    if window is not None:
        lo, hi = window
        mask &= (traj.t >= lo) & (traj.t <= hi)
    if not mask.any():
        raise NoInformationError("no samples after the switch-off time")
    r = traj.lambda1 * traj.u2[mask] - traj.lambda2 * traj.u1[mask]
    rn = float(np.linalg.norm(r))
    if rn < 1e-9:
        raise NoInformationError("the apparatus carries no trace of the system (l1 = l2 = 0)")
    b = traj.apparatus_mean[mask]
    pi = float(r @ b) / rn ** 2
    err = float(np.linalg.norm(b - pi * r)) / rn
    nearest = int(round(pi))
    integer = nearest if abs(pi - nearest) < snap else None
    t_sel = traj.t[mask]
    return MomentumFit(pi, integer, err, int(mask.sum()), (float(t_sel[0]), float(t_sel[-1])))
