import numpy as np
import pytest

from fermicond import fock
from fermicond import linalg as la
from fermicond.errors import NoPrincipalLog, NotGaugeInvariant, NotPositive, TooManyModes
from fermicond.symbols import Symbol, random_symbol


def test_single_mode_annihilator():
    rep = fock.build_rep(1)
    np.testing.assert_array_equal(rep.ann[0], [[0, 1], [0, 0]])


def test_two_mode_jordan_wigner_sign():
    rep = fock.build_rep(2)
    a1, a2 = rep.ann
    # a2 |11> picks up the sign of mode 1
    assert a2[1, 3] == -1 and a2[0, 2] == 1
    assert la.op_norm(a1 @ a2 + a2 @ a1) == 0


def test_car_four_modes(rng):
    rep = fock.build_rep(4)
    worst = 0.0
    for _ in range(20):
        phi, psi = la.random_vector(rng, 4), la.random_vector(rng, 4)
        worst = max(worst,
                    la.op_norm(rep.a(phi) @ rep.a(psi) + rep.a(psi) @ rep.a(phi)),
                    la.op_norm(rep.a(phi) @ rep.adag(psi) + rep.adag(psi) @ rep.a(phi)
                               - la.vdot(phi, psi) * rep.identity()))
    assert worst < 1e-14


def test_annihilator_antilinear():
    rep = fock.build_rep(2)
    phi = np.array([1j, 0.0])
    np.testing.assert_allclose(rep.a(phi), -1j * rep.ann[0])
    np.testing.assert_allclose(rep.adag(phi), 1j * la.dag(rep.ann[0]))


def test_mode_cap(monkeypatch):
    with pytest.raises(TooManyModes):
        fock.build_rep(13)
    monkeypatch.setenv("FERMICOND_MAX_MODES", "3")
    with pytest.raises(TooManyModes):
        fock.build_rep(4)
    monkeypatch.setenv("FERMICOND_MAX_MODES", "40")
    assert fock.max_modes() == fock.HARD_MAX_MODES


def test_vacuum_density():
    fs = fock.free_density_matrix(np.zeros((2, 2)))
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    np.testing.assert_allclose(fs.rho, expected)


def test_product_density():
    q = np.array([0.2, 0.7, 0.4])
    fs = fock.free_density_matrix(np.diag(q))
    expected = np.array([[1.0]])
    for qi in q:  # mode 1 is the fastest bit, so it is the last Kronecker factor
        expected = np.kron(np.diag([1 - qi, qi]), expected)
    np.testing.assert_allclose(fs.rho, expected, atol=1e-15)


def test_density_basis_sweep(rng):
    rep = fock.build_rep(3)
    q = random_symbol(rng, 3)
    fs = fock.free_density_matrix(q, rep)
    e = np.eye(3)
    for k in range(3):
        for l in range(3):
            val = fs.expect(rep.adag(e[k]) @ rep.a(e[l]))
            assert abs(val - la.vdot(e[l], q.q @ e[k])) < 1e-10
    assert abs(np.trace(fs.rho) - 1) < 1e-12


def test_gamma_identity_is_number():
    rep = fock.build_rep(3)
    g = fock.gamma_fock(rep, np.eye(3))
    np.testing.assert_allclose(g, rep.number_op)
    assert la.op_norm(g) == pytest.approx(3)


def test_gamma_rank_one():
    rep = fock.build_rep(3)
    p = np.diag([1.0, 0, 0])
    g = fock.gamma_fock(rep, p)
    np.testing.assert_allclose(g, la.dag(rep.ann[0]) @ rep.ann[0])
    assert la.op_norm(g) == pytest.approx(1)


def test_gamma_norm_bounds(rng):
    rep = fock.build_rep(4)
    for _ in range(20):
        a = la.random_hermitian(rng, 4)
        g = la.op_norm(fock.gamma_fock(rep, a))
        t1 = la.trace_norm(a)
        assert 0.5 * t1 - 1e-10 <= g <= t1 + 1e-10


def test_exp_element_identity():
    rep = fock.build_rep(3)
    np.testing.assert_allclose(fock.exp_element(rep, np.eye(3)), np.eye(8), atol=1e-14)


def test_exp_element_scalar():
    rep = fock.build_rep(3)
    t = 0.7
    expected = np.diag(np.exp(t * np.diag(rep.number_op).real))
    np.testing.assert_allclose(fock.exp_element(rep, np.exp(t) * np.eye(3)), expected, atol=1e-12)


def test_exp_element_multiplicative(rng):
    from scipy.linalg import expm

    rep = fock.build_rep(3)
    x = expm(0.1 * la.random_hermitian(rng, 3))
    y = expm(0.1 * la.random_hermitian(rng, 3))
    lhs = fock.exp_element(rep, x) @ fock.exp_element(rep, y)
    assert la.op_norm(lhs - fock.exp_element(rep, x @ y)) < 1e-10


def test_exp_element_needs_principal_log():
    rep = fock.build_rep(1)
    with pytest.raises(NoPrincipalLog):
        fock.exp_element(rep, [[-1.0]])


def test_e_map_bounds_zero():
    report = fock.e_map_bounds_check(fock.build_rep(2), np.zeros((2, 2)))
    assert report["norm"] == pytest.approx(1.0)
    assert report["pass"]


def test_e_map_bounds_rank_one():
    t = 0.8
    report = fock.e_map_bounds_check(fock.build_rep(1), [[t]])
    assert report["norm"] == pytest.approx(1 + t)


def test_e_map_bounds_random(rng):
    rep = fock.build_rep(4)
    for _ in range(10):
        g = la.random_vector(rng, 16).reshape(4, 4)
        report = fock.e_map_bounds_check(rep, g @ la.dag(g) / 4)
        assert report["pass"] and min(report["margins"].values()) > 0


def test_e_map_bounds_rejects_indefinite():
    with pytest.raises(NotPositive):
        fock.e_map_bounds_check(fock.build_rep(1), [[-1.0]])


def test_commutator_identity_identity_y():
    rep = fock.build_rep(2)
    q = Symbol(np.array([[0.3, 0.1], [0.1, 0.6]]))
    assert fock.lemma1_residual(q, [1.0, 0.5j], rep.identity(), rep=rep) == 0


def test_commutator_identity_number_operator_diagonal_q():
    rep = fock.build_rep(2)
    q = Symbol(np.diag([0.3, 0.6]))
    y = la.dag(rep.ann[1]) @ rep.ann[1]
    for phi in ([1.0, 0.0], [0.6, 0.8j]):
        assert fock.lemma1_residual(q, phi, y, rep=rep) < 1e-12


def test_commutator_identity_random_four_modes(rng):
    rep = fock.build_rep(4)
    for _ in range(10):
        q = random_symbol(rng, 4)
        y = fock.random_gauge_invariant(rep, rng)
        assert fock.lemma1_residual(q, la.random_vector(rng, 4), y, rep=rep) < 1e-9


def test_commutator_identity_plain_variant_differs(rng):
    rep = fock.build_rep(3)
    q = random_symbol(rng, 3)
    y = fock.random_gauge_invariant_positive(rep, q, 3)
    v = fock.lemma1_variants(q, la.random_vector(rng, 3), y, rep)
    assert v["smeared"] < 1e-9 < v["plain"]


def test_commutator_identity_rejects_non_gauge_invariant():
    rep = fock.build_rep(2)
    with pytest.raises(NotGaugeInvariant):
        fock.lemma1_residual(np.eye(2) / 2, [1, 0], rep.ann[0], rep=rep)


def test_random_positive_deterministic():
    rep = fock.build_rep(3)
    q = np.eye(3) * 0.4
    assert np.array_equal(fock.random_gauge_invariant_positive(rep, q, 9),
                          fock.random_gauge_invariant_positive(rep, q, 9))


def test_random_positive_properties():
    rep = fock.build_rep(4)
    q = np.diag([0.1, 0.4, 0.5, 0.9])
    y = fock.random_gauge_invariant_positive(rep, q, 1)
    assert la.op_norm(rep.number_op @ y - y @ rep.number_op) < 1e-12
    assert la.min_eig(y) >= -1e-12
    assert fock.free_density_matrix(q, rep).expect(y).real == pytest.approx(1.0)


def test_embed_second_party_commutes_with_first():
    rep = fock.build_rep(3)
    rep2 = fock.build_rep(2)
    y2 = la.dag(rep2.ann[0]) @ rep2.ann[1]
    y2 = y2 + la.dag(y2)
    y = fock.embed_second_party(y2, 1)
    # even element on modes 2, 3 commutes with mode 1 operators
    assert la.op_norm(y @ rep.ann[0] - rep.ann[0] @ y) < 1e-14
    # and equals the same quadratic form built on the full space
    direct = la.dag(rep.ann[1]) @ rep.ann[2]
    np.testing.assert_allclose(y, direct + la.dag(direct), atol=1e-14)


def test_dump_rep():
    d = fock.dump_rep(fock.build_rep(2))
    assert d["n_modes"] == 2 and len(d["ann"]) == 2 and d["ann"][0]["rows"] == 4
