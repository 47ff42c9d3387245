import numpy as np
import pytest

from fermicond import fock
from fermicond import linalg as la
from fermicond.errors import DimensionMismatch
from fermicond.free_states import (
    FreeState,
    Monomial,
    exp_expectation,
    factorize,
    two_point,
    wick_expectation,
    wick_matrix,
)
from fermicond.symbols import random_symbol

E = np.eye(3)


def diag_state(*q):
    return FreeState.from_matrix(np.diag(q))


def test_two_point_diagonal():
    s = diag_state(0.3, 0.7)
    assert two_point(s, [1, 0], [1, 0]) == pytest.approx(0.3)


def test_two_point_orthogonal():
    assert two_point(diag_state(0.3, 0.7), [1, 0], [0, 1]) == 0


def test_two_point_matches_oracle(rng):
    rep = fock.build_rep(3)
    for _ in range(10):
        q = random_symbol(rng, 3)
        phi, psi = la.random_vector(rng, 3), la.random_vector(rng, 3)
        fs = fock.free_density_matrix(q, rep)
        oracle = fs.expect(rep.adag(phi) @ rep.a(psi))
        assert abs(two_point(FreeState(q), phi, psi) - oracle) < 1e-10


def test_two_point_dimension_check():
    with pytest.raises(DimensionMismatch):
        two_point(diag_state(0.3, 0.7), [1, 0, 0], [1, 0])


def test_wick_empty_monomial():
    assert wick_expectation(diag_state(0.2), Monomial((), ())) == 1


def test_wick_diagonal_product():
    q1, q2 = 0.3, 0.6
    s = diag_state(q1, q2)
    e1, e2 = np.eye(2)
    m = Monomial((e1, e2), (e2, e1))
    assert wick_expectation(s, m) == pytest.approx(q1 * q2)


def test_wick_random_three_modes(rng):
    rep = fock.build_rep(3)
    q = random_symbol(rng, 3)
    fs = fock.free_density_matrix(q, rep)
    for order in (1, 2, 3):
        cre = [la.random_vector(rng, 3) for _ in range(order)]
        ann = [la.random_vector(rng, 3) for _ in range(order)]
        closed = wick_expectation(FreeState(q), Monomial(cre, ann))
        assert abs(closed - fs.expect(fock.monomial_op(rep, cre, ann))) < 1e-10


def test_wick_order_one_is_two_point(rng):
    s = FreeState(random_symbol(rng, 3))
    phi, psi = la.random_vector(rng, 3), la.random_vector(rng, 3)
    assert wick_expectation(s, Monomial([phi], [psi])) == two_point(s, phi, psi)


def test_wick_adjoint_conjugates(rng):
    s = FreeState(random_symbol(rng, 4))
    m = Monomial([la.random_vector(rng, 4) for _ in range(2)], [la.random_vector(rng, 4) for _ in range(2)])
    assert abs(wick_expectation(s, m.adjoint()) - np.conj(wick_expectation(s, m))) < 1e-13


def test_wick_matrix_shape():
    m = Monomial((E[0], E[1]), (E[2], E[0]))
    assert wick_matrix(diag_state(0.1, 0.2, 0.3), m).shape == (2, 2)


def test_monomial_counts_must_match():
    with pytest.raises(DimensionMismatch):
        Monomial((E[0],), ())


def test_exp_identity():
    assert exp_expectation(diag_state(0.3, 0.4), np.eye(2)) == pytest.approx(1.0)


def test_exp_diagonal_product():
    q = np.array([0.2, 0.5, 0.9])
    x = np.array([2.0, 0.3, 1.7])
    expected = np.prod(1 - q + q * x)
    assert exp_expectation(diag_state(*q), np.diag(x)) == pytest.approx(expected)


def test_exp_matches_oracle_hermitian(rng):
    from scipy.linalg import expm

    rep = fock.build_rep(4)
    q = random_symbol(rng, 4)
    a = la.random_hermitian(rng, 4)
    fs = fock.free_density_matrix(q, rep)
    oracle = fs.expect(expm(fock.gamma_fock(rep, a)))
    assert abs(exp_expectation(FreeState(q), expm(a)) - oracle) < 1e-8 * max(1, abs(oracle))


def test_exp_singular_x_allowed():
    # X = 0 gives the vacuum probability
    q = np.array([0.2, 0.5])
    assert exp_expectation(diag_state(*q), np.zeros((2, 2))) == pytest.approx(np.prod(1 - q))


def test_factorize_fock_and_antifock():
    fock_part, mixed, anti = factorize(diag_state(0.0, 1.0))
    assert fock_part.state.dim == 1 and anti.state.dim == 1 and mixed.state.dim == 0


def test_factorize_strict():
    q = np.array([[0.4, 0.1], [0.1, 0.6]])
    fock_part, mixed, anti = factorize(FreeState.from_matrix(q))
    assert fock_part.state.dim == 0 and anti.state.dim == 0
    np.testing.assert_allclose(mixed.isometry @ mixed.state.symbol.q @ la.dag(mixed.isometry), q, atol=1e-14)


def test_factorize_product_of_wick():
    s = diag_state(0.0, 0.5, 1.0)
    parts = factorize(s)
    # one creator/annihilator pair per factor
    creators = [E[0], E[1], E[2]]
    annihilators = [E[2], E[1], E[0]]
    full = wick_expectation(s, Monomial(creators, annihilators))
    product = 1.0
    for part, vec in zip(parts, creators):
        local = part.pull_back(vec)
        product *= wick_expectation(part.state, Monomial([local], [local]))
    assert abs(full - product) < 1e-10
    # creator on the mixed factor, annihilator on the anti-Fock factor: cross term vanishes
    assert abs(wick_expectation(s, Monomial([E[1]], [E[2]]))) < 1e-10
