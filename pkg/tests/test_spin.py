import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tomoforge.errors import (ConsistencyError, DomainError, InvalidInputError, PivotError,
                              ResolutionError)
from tomoforge.operators import random_density, trace_norm
from tomoforge.reconstruct import StateOracle, finite_reconstruct
from tomoforge.spin import (
    GroupFourierData,
    SpinOracle,
    SU2Quadrature,
    basis_function,
    compose,
    euler_from_su2,
    group_entropy_check,
    j3_commutator_constant,
    random_band_limited,
    small_d,
    spin_matrices,
    spin_reconstruct,
    spin_tomogram,
    spin_value,
    spins_up_to,
    su2_quadrature,
    tensor_ops,
    wigner_d,
)
from tomoforge.su_basis import build_basis, haar_sample

angles = st.tuples(st.floats(0, 2 * np.pi), st.floats(0, np.pi), st.floats(0, 4 * np.pi))


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2, 3.5])
@pytest.mark.parametrize("beta", [0.3, 1.2, 2.9])
def test_character_formula(j, beta):
    assert np.trace(small_d(j, beta)) == pytest.approx(
        math.sin((2 * j + 1) * beta / 2) / math.sin(beta / 2), abs=1e-12)


@pytest.mark.parametrize("beta", [0.0, 0.4, 1.7, np.pi])
def test_low_spin_closed_forms(beta):
    c, s = math.cos(beta), math.sin(beta)
    half = np.array([[math.cos(beta / 2), -math.sin(beta / 2)],
                     [math.sin(beta / 2), math.cos(beta / 2)]])
    one = np.array([[(1 + c) / 2, -s / math.sqrt(2), (1 - c) / 2],
                    [s / math.sqrt(2), c, -s / math.sqrt(2)],
                    [(1 - c) / 2, s / math.sqrt(2), (1 + c) / 2]])
    assert np.allclose(small_d(0.5, beta), half, atol=1e-14)
    assert np.allclose(small_d(1, beta), one, atol=1e-14)


def test_spin_matrices_commutators():
    for j in (0.5, 1, 2.5):
        _, jz, jp, jm, _ = spin_matrices(j)
        assert np.allclose(jz @ jp - jp @ jz, jp)
        assert np.allclose(jp @ jm - jm @ jp, 2 * jz)


@settings(max_examples=30, deadline=None)
@given(g1=angles, g2=angles)
def test_wigner_matrices_represent_the_group(g1, g2):
    g = compose(g1, g2)
    for j in (0.5, 1, 1.5):
        assert np.allclose(wigner_d(j, g1) @ wigner_d(j, g2), wigner_d(j, g), atol=1e-10)


def test_euler_round_trip(rng):
    for _ in range(20):
        u = haar_sample(2, rng)
        u = u / np.sqrt(np.linalg.det(u))
        assert np.allclose(wigner_d(0.5, euler_from_su2(u)), u, atol=1e-12)


@pytest.mark.parametrize("bad", [-0.5, 0.3, 1.25, 17])
def test_spin_value_validation(bad):
    with pytest.raises(InvalidInputError):
        spin_value(bad)


def test_spins_up_to():
    assert spins_up_to(1.5) == [0, 0.5, 1, 1.5]


@pytest.mark.parametrize("j_max", [0.5, 1, 1.5, 2])
def test_quadrature_orthogonality_is_exact(j_max):
    quad = SU2Quadrature.build(j_max)
    a, b, g = quad.grid()
    funcs = []
    for j in spins_up_to(j_max):
        dim = int(2 * j) + 1
        vals = np.array([wigner_d(j, x) for x in zip(a.ravel(), b.ravel(), g.ravel())])
        for m in range(dim):
            for n in range(dim):
                funcs.append(math.sqrt(2 * j + 1) * vals[:, m, n].reshape(quad.shape))
    w = quad.weights()
    gram = np.array([[np.sum(w * f.conj() * h) for h in funcs] for f in funcs])
    assert np.abs(gram - np.eye(len(funcs))).max() < 1e-12


@pytest.mark.parametrize("j_max", [0.5, 1, 2])
def test_coefficients_round_trip(j_max, rng):
    f = random_band_limited(j_max, rng)
    data = su2_quadrature(f, j_max)
    for j, blk in f.blocks.items():
        assert np.allclose(data.blocks[j], blk, atol=1e-12)
    assert data.plancherel_residual < 1e-12


def test_pointwise_and_grid_evaluation_agree(rng):
    f = random_band_limited(1.5, rng)
    a, b, g = np.array([0.3, 1.1]), np.array([0.4, 2.0]), np.array([5.0, 0.2])
    grid = f.evaluate_grid(a, b, g)
    assert np.allclose(f(a[0], b[1], g[0]), grid[0, 1, 0])
    assert np.allclose(f(a[1], b[0], g[1]), grid[1, 0, 1])


def test_quadrature_rejects_undersampled_functions(rng):
    f = random_band_limited(2, rng)
    with pytest.raises(ResolutionError):
        su2_quadrature(f, 1)
    with pytest.raises(ResolutionError):
        su2_quadrature(f, 2, quad=SU2Quadrature.build(1))


def test_function_callable_is_accepted(rng):
    f = random_band_limited(1, rng)
    data = su2_quadrature(lambda a, b, g: f(a, b, g), 1)
    assert np.allclose(data.blocks[1], f.blocks[1], atol=1e-12)


def test_entrywise_entropy_fails_for_half_spin_diagonal():
    # |f|^2 = 1 + cos(beta): function entropy -(ln 2 - 1/2), one unit coefficient
    res = group_entropy_check(basis_function(0.5, 0, 0), 0.5)
    assert abs(res.function_entropy - (0.5 - math.log(2))) <= res.refine_error < 1e-5
    assert res.coefficient_entropy == 0.0
    assert res.slack == pytest.approx(0.5 - math.log(2), abs=1e-5)
    assert res.block_entropy == pytest.approx(math.log(2), abs=1e-12)
    assert res.weighted_slack == pytest.approx(0.5, abs=1e-5)


def test_constant_function_saturates():
    res = group_entropy_check(basis_function(0, 0, 0), 0)
    assert abs(res.slack) < 1e-12 and abs(res.weighted_slack) < 1e-12


@settings(max_examples=6, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), j_max=st.sampled_from([0.5, 1.0, 1.5]))
def test_weighted_entropy_is_non_negative(seed, j_max):
    res = group_entropy_check(random_band_limited(j_max, np.random.default_rng(seed)), j_max)
    assert res.weighted_slack > -res.refine_error - 1e-9


def test_group_entropy_needs_normalisation(rng):
    f = random_band_limited(1, rng, normalize=False)
    f.blocks = {j: 2 * b for j, b in f.blocks.items()}
    with pytest.raises(DomainError):
        group_entropy_check(f, 1)


@pytest.mark.parametrize("J", [0.5, 1, 1.5, 2, 3])
def test_tensor_operators(J):
    ts = tensor_ops(J)
    assert len(ts.ops) == ts.dim**2
    assert np.abs(ts.gram() - 2 * np.eye(ts.dim**2)).max() < 1e-12
    _, jz, jp, jm, _ = spin_matrices(J)
    for (j, m), op in ts.ops.items():
        assert np.allclose(op.conj().T, (-1) ** m * ts.ops[(j, -m)], atol=1e-12)
        assert np.allclose(jz @ op - op @ jz, m * op, atol=1e-12)
        if m < j:
            raise_ = jp @ op - op @ jp
            assert np.allclose(raise_, math.sqrt(j * (j + 1) - m * (m + 1)) * ts.ops[(j, m + 1)], atol=1e-10)
    assert j3_commutator_constant(J) == pytest.approx(1.0, abs=1e-12)


def test_half_spin_tensor_operators_are_pauli():
    ts = tensor_ops(0.5)
    sp = np.array([[0, 1], [0, 0]])
    assert np.allclose(ts.ops[(0, 0)], np.eye(2))
    assert np.allclose(ts.ops[(1, 0)], np.diag([1, -1]))
    assert np.allclose(ts.ops[(1, 1)], -math.sqrt(2) * sp)
    assert np.allclose(ts.ops[(1, -1)], math.sqrt(2) * sp.T)


def test_tensor_components_round_trip(rng):
    ts = tensor_ops(1.5)
    rho = random_density(4, rng)
    assert np.allclose(ts.synthesize(ts.components(rho)), rho, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), g=angles, J=st.sampled_from([0.5, 1.0, 1.5]))
def test_tomogram_expansion(seed, g, J):
    dim = int(2 * J) + 1
    rho = random_density(dim, np.random.default_rng(seed))
    for i in range(dim):
        assert 0 <= spin_tomogram(rho, i, g) <= 1 + 1e-12


def test_tomogram_index_validation(rng):
    with pytest.raises(InvalidInputError):
        spin_tomogram(random_density(2, rng), 2, (0, 0, 0))


@pytest.mark.parametrize("J", [0.5, 1, 1.5])
def test_spin_reconstruction_agrees_with_finite_protocol(J, rng):
    dim = int(2 * J) + 1
    rho = random_density(dim, rng)
    oracle = SpinOracle(rho)
    rec = spin_reconstruct(oracle, J)
    assert trace_norm(rec.rho - rho) < 1e-10
    assert rec.queries == oracle.queries > 0
    other = finite_reconstruct(StateOracle(rho), build_basis(dim)).matrix
    assert trace_norm(rec.rho - other) < 1e-10


def test_vanishing_pivot_is_reported():
    # for J = 1 the middle projector has no rank-1 component
    with pytest.raises(PivotError):
        spin_reconstruct(SpinOracle(np.eye(3) / 3), 1, projector=1)


def test_explicit_pivot_works_when_nonzero(rng):
    rho = random_density(2, rng)
    assert trace_norm(spin_reconstruct(SpinOracle(rho), 0.5, projector=0).rho - rho) < 1e-10


def test_reconstruction_needs_exact_quadrature(rng):
    with pytest.raises(ResolutionError):
        spin_reconstruct(SpinOracle(random_density(3, rng)), 1, quad=SU2Quadrature.build(1))


def test_half_spin_rotation_by_pi():
    assert np.allclose(small_d(0.5, np.pi), [[0, -1], [1, 0]], atol=1e-15)


@pytest.mark.parametrize("J", [0.5, 1, 2])
def test_tensor_expansion_is_complete(J, rng):
    ts = tensor_ops(J)
    a = rng.normal(size=(ts.dim, ts.dim)) + 1j * rng.normal(size=(ts.dim, ts.dim))
    back = sum(x * ts.ops[k] for k, x in ts.expand(a).items())
    assert np.allclose(back, a, atol=1e-10)
