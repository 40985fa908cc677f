"""Fast invariant suite behind ``tomoforge selftest``."""

import math

import numpy as np

from .ambiguity import delta_rho, sample_lift
from .circle import CouplingProfile, b_expectation, recover_momentum, solve_modes
from .coupled import build_design, observe, random_configs, recover_system
from .entropy import GridFunction, entropy_sum_rn, gaussian, hy_check_rn
from .operators import is_density, random_density, trace_norm
from .reconstruct import StateOracle, finite_reconstruct, projector_protocol
from .spin import SpinOracle, spin_reconstruct, tensor_ops
from .stochastic import birkhoff_decompose, from_unitary, pushforward_check, reassemble
from .su_basis import adjoint_rep, build_basis, haar_sample


def _basis(rng):
    worst = 0.0
    for N in range(2, 6):
        b = build_basis(N)
        worst = max(worst, np.abs(b.gram() - 2 * np.eye(len(b))).max())
        d = adjoint_rep(haar_sample(N, rng), b)
        worst = max(worst, np.abs(d @ d.T - np.eye(len(b))).max())
    return worst, 1e-10


def _finite(rng):
    worst = 0.0
    for N in range(2, 6):
        rho = random_density(N, rng)
        a = finite_reconstruct(StateOracle(rho), build_basis(N))
        o = StateOracle(rho)
        b = projector_protocol(o.projector, N)
        worst = max(worst, trace_norm(a.matrix - rho), trace_norm(b.matrix - rho))
    return worst, 1e-9


def _ambiguity(rng):
    errs = [abs(delta_rho([l, 1 - l], budget=2000).delta - 2 * math.sqrt(l * (1 - l)))
            for l in (0.0, 0.2, 0.5)]
    ok = all(is_density(sample_lift([0.2, 0.3, 0.5], seed=s).matrix) for s in range(5))
    return max(errs) if ok else math.inf, 1e-3


def _stochastic(rng):
    worst = 0.0
    for N in range(2, 6):
        u = haar_sample(N, rng)
        lam = rng.dirichlet(np.ones(N))
        worst = max(worst, pushforward_check(lam, u, rng.normal(size=N)))
        t = from_unitary(u)
        terms = birkhoff_decompose(t)
        if len(terms) > N * N - 2 * N + 2:
            return math.inf, 1e-8
        worst = max(worst, np.abs(reassemble(terms, N) - t.entries).max())
    return worst, 1e-8


def _coupled(rng):
    cfgs = random_configs(2, 2, 4, seed=3)
    rs, rm = random_density(2, rng), random_density(2, rng)
    rec = recover_system(build_design(cfgs, rm), observe(cfgs, rs, rm))
    return trace_norm(rec.rho_S - rs), 1e-8


def _circle(rng):
    traj = solve_modes(CouplingProfile("bump", 0.8, 5.0), 20.0, 1e-3)
    fit = recover_momentum(b_expectation(CouplingProfile("bump", 0.8, 5.0), 3, 12.0))
    return traj.wronskian_drift + (0.0 if fit.integer == 3 else math.inf), 1e-8


def _entropy(rng):
    g = GridFunction.on_line(gaussian, 20.0, 4096)
    e = entropy_sum_rn(g)
    return abs(e.slack) + abs(hy_check_rn(g, 2.0).slack), 1e-6


def _spin(rng):
    worst = 0.0
    for J in (0.5, 1.0, 1.5):
        ts = tensor_ops(J)
        g = ts.gram()
        worst = max(worst, np.abs(g - 2 * np.eye(len(g))).max())
        rho = random_density(int(2 * J + 1), rng)
        worst = max(worst, trace_norm(spin_reconstruct(SpinOracle(rho), J).rho - rho))
    return worst, 1e-7


CHECKS = {
    "basis-orthogonality": _basis,
    "finite-and-projector-round-trip": _finite,
    "ambiguity-qubit-formula": _ambiguity,
    "stochastic-identity-and-birkhoff": _stochastic,
    "coupled-recovery": _coupled,
    "circle-wronskian-and-momentum": _circle,
    "entropy-gaussian-saturation": _entropy,
    "spin-tensor-and-reconstruction": _spin,
}


def run(seed=0):
    """Run every check; returns a list of ``{"name", "value", "limit", "ok"}``."""
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS.items():
        try:
            value, limit = fn(rng)
            ok = bool(value <= limit)
        except Exception as exc:  # report, do not abort the suite
            value, limit, ok = repr(exc), None, False
        out.append({"name": name, "value": value if isinstance(value, str) else float(value),
                    "limit": limit, "ok": ok})
    return out
