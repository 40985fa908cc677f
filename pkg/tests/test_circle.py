import io
import math

import numpy as np
import pytest

from tomoforge.circle import (
    CouplingProfile,
    b_expectation,
    mean_momentum,
    particular_solution,
    recover_momentum,
    solve_modes,
)
from tomoforge.errors import AccuracyError, ConfigError, InvalidInputError, NoInformationError, ShapeError

BUMP = CouplingProfile("bump", 0.8, 5.0)
# solve_ivp DOP853 (rtol 1e-13, atol 1e-14) on the same ODE, frozen
BUMP_LAMBDAS = (-0.7684968607303045, 0.3479185617463771)


def test_free_modes_are_cos_and_sin():
    traj = solve_modes(CouplingProfile("rect", 0.0, 1.0), 10.0, 1e-3)
    assert np.abs(traj.u1 - np.cos(traj.t)).max() < 1e-11
    assert np.abs(traj.u2 - np.sin(traj.t)).max() < 1e-11
    assert traj.lambda1 == 0.0 and traj.lambda2 == 0.0


def test_wronskian_is_conserved():
    assert solve_modes(BUMP, 30.0, 1e-3).wronskian_drift < 1e-10


def test_switch_integrals_match_independent_integrator():
    traj = solve_modes(BUMP, 6.0, 1e-3)
    assert traj.lambda1 == pytest.approx(BUMP_LAMBDAS[0], abs=1e-10)
    assert traj.lambda2 == pytest.approx(BUMP_LAMBDAS[1], abs=1e-10)


def test_switch_integrals_by_independent_quadrature():
    # Simpson on the RK4 modes, a second route to the running integrals
    from scipy.integrate import simpson

    traj = solve_modes(BUMP, 5.0, 1e-3)
    lam = np.array([BUMP.right(t) for t in traj.t])
    assert simpson(lam * traj.u1, x=traj.t) == pytest.approx(traj.lambda1, abs=1e-10)
    assert simpson(lam * traj.u2, x=traj.t) == pytest.approx(traj.lambda2, abs=1e-10)


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.0])
def test_constant_coupling_closed_form(lam):
    prof = CouplingProfile("constant", lam, 1.0)
    traj = solve_modes(prof, 8.0, 1e-3)
    w = math.sqrt(1 + lam * lam)
    assert np.abs(traj.u1 - np.cos(w * traj.t)).max() < 1e-10
    assert np.abs(traj.u2 - np.sin(w * traj.t) / w).max() < 1e-10
    u_par = particular_solution(prof, traj)
    assert np.abs(u_par - lam / w**2 * (1 - np.cos(w * traj.t))).max() < 1e-10
    assert traj.lambda1 is None


@pytest.mark.parametrize("family", ["rect", "bump"])
def test_particular_solution_solves_the_ode(family):
    prof = CouplingProfile(family, 1.3, 4.0)
    traj = solve_modes(prof, 10.0, 1e-3)
    particular_solution(prof, traj)
    assert traj.checks["ode_residual"] < 1e-6
    assert traj.u_par[0] == 0.0


def test_post_switch_form_agrees():
    traj = b_expectation(BUMP, 2, 15.0)
    assert traj.checks["post_switch_gap"] < 1e-10


@pytest.mark.parametrize("n", range(-3, 4))
def test_integer_momentum_is_recovered(n):
    fit = recover_momentum(b_expectation(BUMP, n, 12.0))
    assert fit.momentum == pytest.approx(n, abs=1e-9)
    assert fit.integer == n and fit.fit_error < 1e-9


def test_mixture_gives_the_mean():
    fit = recover_momentum(b_expectation(BUMP, [0.0, 0.5, 0.5], 12.0))
    assert fit.momentum == pytest.approx(1.5, abs=1e-9)
    assert fit.integer is None


def test_recovery_does_not_depend_on_the_window():
    traj = b_expectation(BUMP, 3, 20.0)
    a = recover_momentum(traj, window=(6.0, 10.0)).momentum
    b = recover_momentum(traj, window=(14.0, 20.0)).momentum
    assert a == pytest.approx(b, abs=1e-10)


def test_table_profile_matches_rect():
    rect = solve_modes(CouplingProfile("rect", 0.8, 5.0), 7.0, 1e-3)
    table = solve_modes(CouplingProfile("table", times=(0.0, 5.0), values=(0.8, 0.8)), 7.0, 1e-3)
    assert np.allclose(rect.u1, table.u1, atol=1e-14)
    assert table.lambda1 == pytest.approx(rect.lambda1, abs=1e-14)


def test_no_switch_off_means_no_information():
    traj = b_expectation(CouplingProfile("constant", 0.5, 1.0), 1, 5.0)
    with pytest.raises(NoInformationError):
        recover_momentum(traj)


def test_zero_coupling_carries_no_information():
    traj = b_expectation(CouplingProfile("rect", 0.0, 2.0), 2, 6.0)
    with pytest.raises(NoInformationError):
        recover_momentum(traj)


def test_window_before_switch_off_is_empty():
    traj = b_expectation(BUMP, 1, 8.0)
    with pytest.raises(NoInformationError):
        recover_momentum(traj, window=(0.0, 4.0))


def test_coarse_step_is_rejected():
    with pytest.raises(AccuracyError):
        solve_modes(BUMP, 200.0, 0.3)


def test_profile_mismatch():
    traj = solve_modes(BUMP, 6.0, 1e-3)
    with pytest.raises(ShapeError):
        particular_solution(CouplingProfile("rect", 0.8, 5.0), traj)


@pytest.mark.parametrize(
    "kwargs, err",
    [
        (dict(family="ramp"), ConfigError),
        (dict(family="rect", T=0.0), ConfigError),
        (dict(family="table", times=(1.0, 0.5), values=(0, 0)), InvalidInputError),
        (dict(family="table", times=(0.0,), values=(1.0,)), ShapeError),
    ],
)
def test_profile_validation(kwargs, err):
    with pytest.raises(err):
        CouplingProfile(**kwargs)


def test_profile_limits_at_the_edges():
    p = CouplingProfile("rect", 2.0, 3.0)
    assert p.right(0.0) == 2.0 and p.left(0.0) == 0.0
    assert p.left(3.0) == 2.0 and p.right(3.0) == 0.0


@pytest.mark.parametrize("bad", [[0.5, 0.6], [1.5, -0.5]])
def test_mean_momentum_validation(bad):
    with pytest.raises(InvalidInputError):
        mean_momentum(bad)


def test_exports():
    traj = b_expectation(BUMP, 1, 6.0)
    out = traj.to_json(stride=1000)
    assert len(out["t"]) == 7 and out["momentum"] == 1.0
    buf = io.StringIO()
    traj.write_csv(buf, stride=1000)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,u1,u2,u_par,apparatus_mean" and len(lines) == 8


def test_constant_coupling_oscillates_about_the_steady_solution():
    lam = 0.6
    w = math.sqrt(1 + lam * lam)
    prof = CouplingProfile("constant", lam, 1.0)
    period = 2 * math.pi / w
    traj = solve_modes(prof, 10 * period, period / 4000)
    u_par = particular_solution(prof, traj)
    # the mean over whole periods is the steady value (trapezoid on a periodic grid)
    assert np.mean(u_par[:-1]) == pytest.approx(lam / (1 + lam * lam), abs=1e-6)


def test_ground_level_gives_a_flat_readout():
    traj = b_expectation(BUMP, 0, 12.0)
    assert np.all(traj.apparatus_mean == 0.0)


def test_readout_is_linear_in_the_level():
    one = b_expectation(BUMP, 1, 12.0).apparatus_mean
    three = b_expectation(BUMP, 3, 12.0).apparatus_mean
    np.testing.assert_allclose(three, 3 * one, rtol=0, atol=1e-14)


def test_zero_coupling_has_no_particular_part():
    traj = b_expectation(CouplingProfile("rect", 0.0, 2.0), 2, 6.0)
    assert np.all(traj.u_par == 0.0) and np.all(traj.apparatus_mean == 0.0)
