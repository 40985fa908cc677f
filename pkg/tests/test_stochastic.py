import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tomoforge.errors import InvalidInputError, PropertyViolation
from tomoforge.stochastic import (
    StochasticMatrix,
    birkhoff_decompose,
    entropy_monotone,
    from_unitary,
    pushforward_check,
    reassemble,
    shannon,
)
from tomoforge.su_basis import haar_sample


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_pushforward_and_entropy(seed, n):
    rng = np.random.default_rng(seed)
    u = haar_sample(n, rng)
    lam = rng.dirichlet(np.ones(n))
    assert pushforward_check(lam, u, rng.normal(size=n)) < 1e-12
    before, after = entropy_monotone(lam, from_unitary(u))
    assert after >= before - 1e-12


def test_pushforward_matches_rotated_diagonal(rng):
    u = haar_sample(4, rng)
    lam = rng.dirichlet(np.ones(4))
    rotated = np.real(np.diag(u.conj().T @ np.diag(lam) @ u))
    assert np.allclose(from_unitary(u).apply(lam), rotated, atol=1e-14)


def test_identity_is_exact():
    assert pushforward_check([0.2, 0.8], np.eye(2), [1.0, -1.0]) == 0.0


@pytest.mark.parametrize("n", range(2, 7))
def test_shannon_extremes(n):
    assert shannon(np.full(n, 1 / n)) == pytest.approx(np.log(n))
    e = np.zeros(n)
    e[0] = 1
    assert shannon(e) == 0.0 and str(shannon(e)) == "0.0"


def test_non_doubly_stochastic_map_can_lower_entropy():
    t = np.array([[1.0, 0.0], [1.0, 0.0]])  # every input lands on outcome 0
    with pytest.raises(PropertyViolation):
        entropy_monotone([0.5, 0.5], t)


@pytest.mark.parametrize("bad", [np.array([[0.5, 0.6], [0.5, 0.4]]), np.ones((2, 3)) / 2,
                                 np.array([[1.1, -0.1], [-0.1, 1.1]])])
def test_stochastic_matrix_validation(bad):
    with pytest.raises(InvalidInputError):
        StochasticMatrix(bad)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6))
def test_birkhoff_reassembles_within_caratheodory_bound(seed, n):
    t = from_unitary(haar_sample(n, np.random.default_rng(seed)))
    terms = birkhoff_decompose(t)
    assert len(terms) <= n * n - 2 * n + 2
    assert all(w > 0 for w, _ in terms)
    assert sum(w for w, _ in terms) == pytest.approx(1.0, abs=1e-8)
    for _, p in terms:
        assert sorted(p) == list(range(n))
    assert np.abs(reassemble(terms, n) - t.entries).max() < 1e-8


def test_permutation_matrix_is_a_single_term():
    p = np.eye(4)[[2, 0, 3, 1]]
    terms = birkhoff_decompose(p)
    assert len(terms) == 1 and terms[0][0] == pytest.approx(1.0)
    assert np.array_equal(reassemble(terms, 4), p)


def test_uniform_matrix():
    n = 4
    terms = birkhoff_decompose(np.full((n, n), 1 / n))
    assert np.allclose(reassemble(terms, n), 1 / n)


@pytest.mark.parametrize("n", range(2, 6))
def test_line_sums(n, rng):
    for _ in range(100):
        t = from_unitary(haar_sample(n, rng)).entries
        assert np.abs(t.sum(0) - 1).max() < 1e-10 and np.abs(t.sum(1) - 1).max() < 1e-10
