import numpy as np
import pytest

from fermicond import linalg as la
from fermicond import fock
from fermicond.conditioning import conditional_symbol, oracle_conditional_symbol, normalized_exp_conditioner_fock
from fermicond.errors import (
    DimensionMismatch,
    NotHermitian,
    ReconstructionFailed,
    SingularC,
    SingularSpectrum,
    SpectrumOutOfRange,
)
from fermicond.symbols import (
    BlockSymbol,
    Symbol,
    Tolerances,
    assemble,
    is_trimmed,
    kernel_decomposition,
    modular_hamiltonian,
    positivity_witnesses,
    random_block_symbol,
    random_symbol,
    restated_positivity_check,
    symbol_from_hamiltonian,
    trim,
    validate_symbol,
)


def test_scalar_half_is_valid():
    s = validate_symbol([[0.5]])
    assert isinstance(s, Symbol)
    assert s.q[0, 0] == 0.5


def test_scalar_above_one_rejected():
    with pytest.raises(SpectrumOutOfRange):
        validate_symbol([[1.2]])


def test_two_by_two_out_of_range():
    with pytest.raises(SpectrumOutOfRange) as info:
        validate_symbol([[0.5, 0.6], [0.6, 0.5]])
    assert info.value.eigenvalue == pytest.approx(-0.1) or info.value.eigenvalue == pytest.approx(1.1)


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitian):
        validate_symbol([[0.5, 0.1], [0.0, 0.5]])


def test_non_square_rejected():
    with pytest.raises(DimensionMismatch):
        validate_symbol(np.zeros((2, 3)))


def test_roundoff_clipped_into_range():
    s = validate_symbol([[1.0 + 1e-12]])
    assert s.q[0, 0] == 1.0


def test_symbol_is_read_only():
    s = validate_symbol([[0.5]])
    with pytest.raises(ValueError):
        s.q[0, 0] = 0.1


def test_custom_tolerances_must_be_nonnegative():
    with pytest.raises(ValueError):
        Tolerances(psd=-1.0)


def test_assemble_block_diagonal():
    q = assemble(BlockSymbol([[0.3]], [[0.0]], [[0.7]]))
    np.testing.assert_allclose(q.q, np.diag([0.3, 0.7]))


def test_assemble_scaled_projector():
    q = assemble(BlockSymbol([[0.5]], [[0.5]], [[0.5]]))
    np.testing.assert_allclose(q.q, [[0.5, 0.5], [0.5, 0.5]])
    np.testing.assert_allclose(q.eigvals(), [0.0, 1.0], atol=1e-15)


def test_assemble_invalid_block():
    with pytest.raises(SpectrumOutOfRange):
        assemble(BlockSymbol([[0.5]], [[0.6]], [[0.5]]))


def test_block_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        BlockSymbol(np.eye(2) / 2, np.zeros((1, 1)), [[0.5]])


def test_witnesses_zero_coupling():
    block = BlockSymbol(np.diag([0.2, 0.6]), np.zeros((2, 1)), [[0.4]])
    d1, d2, res = positivity_witnesses(block)
    assert np.all(d1 == 0) and np.all(d2 == 0) and res == 0.0


def test_witnesses_scalar_boundary_case():
    d1, d2, _ = positivity_witnesses(BlockSymbol([[0.5]], [[0.5]], [[0.5]]))
    np.testing.assert_allclose(d1, [[1.0]], atol=1e-12)
    np.testing.assert_allclose(d2, [[1.0]], atol=1e-12)


def test_witnesses_random_three_plus_three():
    block = random_block_symbol(3, 3, 11)
    d1, d2, res = positivity_witnesses(block)
    assert la.op_norm(d1) <= 1 + 1e-12 and la.op_norm(d2) <= 1 + 1e-12
    assert res < 1e-10
    np.testing.assert_allclose(la.sqrtm_psd(block.a) @ d1 @ la.sqrtm_psd(block.c), block.b, atol=1e-10)


def test_witnesses_reject_invalid_block():
    with pytest.raises(ReconstructionFailed):
        positivity_witnesses(BlockSymbol([[0.5]], [[0.6]], [[0.5]]))


def test_restated_check_uncoupled():
    assert restated_positivity_check(BlockSymbol([[0.9]], [[0.0]], [[0.1]]))


def test_restated_check_equality_case():
    block = BlockSymbol([[0.5]], [[0.5]], [[0.5]])
    assert restated_positivity_check(block)


def test_restated_check_rejects_scaled_boundary():
    block = BlockSymbol([[0.5]], [[0.5 * 1.01]], [[0.5]])
    assert not restated_positivity_check(block)
    with pytest.raises(SpectrumOutOfRange):
        assemble(block)


def test_restated_check_needs_strict_c():
    with pytest.raises(SingularC):
        restated_positivity_check(BlockSymbol([[0.5]], [[0.0]], [[1.0]]))


def test_restated_check_agrees_with_spectrum(rng):
    # perturb valid blocks across the boundary and compare both criteria
    agree = 0
    n = 1000
    for _ in range(n):
        d1, d2 = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        block = random_block_symbol(d1, d2, int(rng.integers(2**31)), 0.02)
        scaled = BlockSymbol(block.a, block.b * rng.uniform(0.5, 3.0), block.c)
        w = np.linalg.eigvalsh(scaled.matrix())
        spectral = w[0] >= -1e-9 and w[-1] <= 1 + 1e-9
        agree += restated_positivity_check(scaled) == spectral
    assert agree == n


def test_trim_drops_kernel_columns():
    b = 0.3
    block = BlockSymbol([[0.5]], [[0.0, b, 0.0]], np.diag([0.0, 0.5, 1.0]))
    trimmed, w = trim(block)
    np.testing.assert_allclose(trimmed.c, [[0.5]])
    np.testing.assert_allclose(np.abs(trimmed.b), [[b]])
    assert w.shape == (3, 1)
    assert is_trimmed(trimmed) and not is_trimmed(block)


def test_trim_identity_for_strict_c():
    block = random_block_symbol(2, 2, 3)
    trimmed, w = trim(block)
    assert w.shape == (2, 2)
    np.testing.assert_allclose(w @ la.dag(w), np.eye(2), atol=1e-12)
    np.testing.assert_allclose(trimmed.b @ la.dag(w), block.b, atol=1e-12)


def test_trim_preserves_conditional_expectations(rng):
    # 2 + 3 modes with an empty and a filled mode on H2
    d1 = 2
    inner = random_block_symbol(d1, 1, 5)
    u = la.random_unitary(rng, 3)
    c = u @ np.diag([0.0, inner.c[0, 0].real, 1.0]) @ la.dag(u)
    b = np.column_stack([np.zeros(d1), inner.b[:, 0], np.zeros(d1)]) @ la.dag(u)
    block = BlockSymbol(inner.a, b, c)
    trimmed, w = trim(block)
    assert trimmed.d2 == 1
    l_small = np.array([[2.5]])
    # a conditioner on the trimmed space, lifted by identity on the kernels
    l_full = w @ l_small @ la.dag(w) + (np.eye(3) - w @ la.dag(w))
    closed_trim = conditional_symbol(trimmed, l_small).q
    y = normalized_exp_conditioner_fock(block, l_full)
    oracle_full = oracle_conditional_symbol(block, y).q
    assert la.op_norm(closed_trim - oracle_full) < 1e-10


def test_kernel_decomposition_coordinates():
    p0, pm, p1 = kernel_decomposition(Symbol(np.diag([0.0, 0.5, 1.0])))
    np.testing.assert_allclose(np.abs(p0), np.diag([1, 0, 0]), atol=1e-15)
    np.testing.assert_allclose(np.abs(pm), np.diag([0, 1, 0]), atol=1e-15)
    np.testing.assert_allclose(np.abs(p1), np.diag([0, 0, 1]), atol=1e-15)


def test_kernel_decomposition_half():
    p0, pm, p1 = kernel_decomposition(Symbol(0.5 * np.eye(3)))
    np.testing.assert_allclose(pm, np.eye(3), atol=1e-15)
    assert not p0.any() and not p1.any()


def test_kernel_decomposition_random(rng):
    for _ in range(20):
        q = random_symbol(rng, 5, pinned=0.4)
        projs = kernel_decomposition(q)
        assert la.op_norm(sum(projs) - np.eye(5)) < 1e-12
        for p in projs:
            assert la.op_norm(p @ q.q - q.q @ p) < 1e-12


def test_modular_hamiltonian_half():
    np.testing.assert_allclose(modular_hamiltonian(Symbol(np.array([[0.5]]))), [[0.0]], atol=1e-15)


def test_modular_hamiltonian_logistic():
    h = modular_hamiltonian(Symbol(np.array([[1.0 / (1.0 + np.e)]])))
    np.testing.assert_allclose(h, [[1.0]], atol=1e-14)


def test_modular_hamiltonian_round_trip(rng):
    for _ in range(20):
        q = random_block_symbol(2, 2, int(rng.integers(2**31))).matrix()
        h = modular_hamiltonian(Symbol(q))
        assert la.op_norm(symbol_from_hamiltonian(h) - q) < 1e-10


def test_modular_hamiltonian_singular():
    with pytest.raises(SingularSpectrum):
        modular_hamiltonian(Symbol(np.diag([0.0, 0.5])))


def test_random_block_small():
    block = random_block_symbol(1, 1, 7, 0.1)
    w = assemble(block).eigvals()
    assert w.min() >= 0.1 - 1e-12 and w.max() <= 0.9 + 1e-12


def test_random_block_deterministic():
    x, y = random_block_symbol(2, 3, 42), random_block_symbol(2, 3, 42)
    assert np.array_equal(x.matrix(), y.matrix())


def test_random_block_restated_check():
    assert restated_positivity_check(random_block_symbol(3, 3, 1, 0.05))


def test_random_block_margin_validated():
    with pytest.raises(ValueError):
        random_block_symbol(1, 1, 0, 0.6)
