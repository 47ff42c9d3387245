"""Symbols and block symbols of gauge-invariant free states.

A symbol is a Hermitian matrix ``Q`` with ``0 <= Q <= 1``. A bipartite free
state on ``H1 + H2`` is described by the block symbol

    Q = [[A, B],
         [B*, C]]

with ``A`` acting on ``H1`` (``d1`` modes) and ``C`` on ``H2`` (``d2`` modes).
"""

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import (
    DimensionMismatch,
    NotHermitian,
    ReconstructionFailed,
    SingularC,
    SingularSpectrum,
    SpectrumOutOfRange,
)


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by all modules.

    ``herm`` bounds ``||Q - Q*||``, ``psd`` is the slack allowed on operator
    inequalities and the relative rank cutoff, ``det`` the smallest admissible
    determinant modulus, ``oracle`` the closed-form vs Fock-space agreement.
    """

    herm: float = 1e-9
    psd: float = 1e-9
    det: float = 1e-9
    oracle: float = 1e-8

    def __post_init__(self):
        for name in ("herm", "psd", "det", "oracle"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Symbol:
    """One-particle density ``Q`` of a gauge-invariant free state.

    Instances produced by :func:`validate_symbol` are guaranteed Hermitian
    with spectrum in ``[0, 1]``; the constructor itself only checks shape.
    """

    q: np.ndarray

    def __post_init__(self):
        q = la.as_matrix(self.q, "symbol")
        if q.shape[0] != q.shape[1]:
            raise DimensionMismatch(f"symbol must be square, got {q.shape}")
        object.__setattr__(self, "q", _freeze(q))

    @property
    def dim(self) -> int:
        return self.q.shape[0]

    def eigvals(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.q)


@dataclass(frozen=True, eq=False)
class BlockSymbol:
    """Partitioned symbol ``(A, B, C)`` on ``H1 + H2``.

    Only shapes are checked on construction, so that invalid blocks can be
    represented and rejected by :func:`assemble` or
    :func:`restated_positivity_check`.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = la.as_matrix(self.a, "A")
        c = la.as_matrix(self.c, "C")
        d1, d2 = a.shape[0], c.shape[0]
        b = np.asarray(self.b, dtype=complex)
        if b.size == 0:
            b = np.zeros((d1, d2), dtype=complex)
        b = la.as_matrix(b, "B")
        if a.shape != (d1, d1) or c.shape != (d2, d2):
            raise DimensionMismatch("A and C must be square")
        if b.shape != (d1, d2):
            raise DimensionMismatch(f"B has shape {b.shape}, expected {(d1, d2)}")
        for name, arr in (("a", a), ("b", b), ("c", c)):
            object.__setattr__(self, name, _freeze(arr))

    @property
    def d1(self) -> int:
        return self.a.shape[0]

    @property
    def d2(self) -> int:
        return self.c.shape[0]

    def matrix(self) -> np.ndarray:
        """The assembled ``(d1 + d2)``-mode matrix, without validation."""
        return np.block([[self.a, self.b], [la.dag(self.b), self.c]])


def validate_symbol(m, tol: Tolerances = DEFAULT_TOL) -> Symbol:
    """Check Hermiticity and ``0 <= m <= 1``, returning a :class:`Symbol`.

    Eigenvalues within ``tol.psd`` outside ``[0, 1]`` are clipped back into
    the interval; anything further out raises :class:`SpectrumOutOfRange`.
    """
    if isinstance(m, Symbol):
        m = m.q
    m = la.as_matrix(m, "symbol")
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"symbol must be square, got {m.shape}")
    if m.size and np.linalg.norm(m - la.dag(m), 2) > tol.herm:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    m = la.hermitize(m)
    if m.size == 0:
        return Symbol(m)
    w, v = np.linalg.eigh(m)
    if w[0] < -tol.psd:
        raise SpectrumOutOfRange(w[0])
    if w[-1] > 1.0 + tol.psd:
        raise SpectrumOutOfRange(w[-1])
    if w[0] < 0.0 or w[-1] > 1.0:
        m = la.hermitize((v * np.clip(w, 0.0, 1.0)) @ la.dag(v))
    return Symbol(m)


def assemble(block: BlockSymbol, tol: Tolerances = DEFAULT_TOL) -> Symbol:
    return validate_symbol(block.matrix(), tol)


def positivity_witnesses(block: BlockSymbol, tol: Tolerances = DEFAULT_TOL):
    """Contractions ``D1, D2`` with ``B = A^½ D1 C^½ = (1-A)^½ D2 (1-C)^½``.

    Returns
    -------
    D1, D2 : ndarray (d1, d2)
    residual : float
        Largest reconstruction error of the two factorizations.

    Raises
    ------
    ReconstructionFailed
        If a factorization does not reproduce ``B`` or a factor is not a
        contraction, which happens exactly for invalid blocks.
    """
    a, b, c = block.a, block.b, block.c
    eye1, eye2 = np.eye(block.d1), np.eye(block.d2)
    factors = [(a, c), (eye1 - a, eye2 - c)]
    ds, residual = [], 0.0
    for left, right in factors:
        d = la.pinv_sqrtm_psd(left, tol.psd) @ b @ la.pinv_sqrtm_psd(right, tol.psd)
        back = la.sqrtm_psd(left) @ d @ la.sqrtm_psd(right)
        residual = max(residual, la.op_norm(back - b))
        if la.op_norm(d) > 1.0 + tol.psd:
            raise ReconstructionFailed(f"factor has norm {la.op_norm(d):.6g} > 1")
        ds.append(d)
    if residual > tol.psd:
        raise ReconstructionFailed(f"reconstruction residual {residual:.3g}")
    return ds[0], ds[1], residual


def require_strict(c: np.ndarray, tol: Tolerances, what: str = "C"):
    if c.shape[0] == 0:
        return
    w = np.linalg.eigvalsh(la.hermitize(c))
    if w[0] <= tol.psd or w[-1] >= 1.0 - tol.psd:
        raise SingularC(f"{what} or 1 - {what} is singular; trim the block first")


def restated_positivity_check(block: BlockSymbol, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Schur-complement form of ``0 <= Q <= 1`` for blocks with ``0 < C < 1``.

    True iff ``B C^-1 B* <= A`` and ``B (1-C)^-1 B* <= 1 - A`` within ``tol.psd``.
    """
    require_strict(block.c, tol)
    a, c = block.a, block.c
    if la.op_norm(a - la.dag(a)) > tol.herm or la.op_norm(c - la.dag(c)) > tol.herm:
        return False
    lower, upper = correlation_terms(block)
    eye1 = np.eye(block.d1)
    return la.min_eig(a - lower) >= -tol.psd and la.min_eig(eye1 - a - upper) >= -tol.psd


def correlation_terms(block: BlockSymbol):
    """``B C^-1 B*`` and ``B (1-C)^-1 B*``; requires ``0 < C < 1``."""
    b, c = block.b, block.c
    if block.d2 == 0:
        z = np.zeros((block.d1, block.d1), dtype=complex)
        return z, z.copy()
    through_c = la.hermitize(b @ np.linalg.solve(c, la.dag(b)))
    through_1mc = la.hermitize(b @ np.linalg.solve(np.eye(block.d2) - c, la.dag(b)))
    return through_c, through_1mc


def spectral_subspaces(q, tol: Tolerances = DEFAULT_TOL):
    """Isometries onto ``ker Q``, the strictly mixed part, and ``ker(1 - Q)``."""
    q = q.q if isinstance(q, Symbol) else la.as_matrix(q)
    w, v = np.linalg.eigh(la.hermitize(q))
    empty = w <= tol.psd
    full = w >= 1.0 - tol.psd
    mixed = ~(empty | full)
    return v[:, empty], v[:, mixed], v[:, full]


def kernel_decomposition(q: Symbol, tol: Tolerances = DEFAULT_TOL):
    """Orthogonal projectors ``P0, P~, P1`` onto ``ker Q``, the mixed part and ``ker(1-Q)``."""
    return tuple(v @ la.dag(v) for v in spectral_subspaces(q, tol))


def trim(block: BlockSymbol, tol: Tolerances = DEFAULT_TOL):
    """Drop ``ker C`` and ``ker(1 - C)`` from ``H2``.

    Both kernels are annihilated by ``B`` for a valid block and carry no
    correlations. Returns the restricted block together with the isometry
    ``W`` (d2 x r) whose columns span the retained subspace; the new blocks
    are ``B W`` and ``W* C W``.
    """
    _, w, _ = spectral_subspaces(block.c, tol)
    return BlockSymbol(block.a, block.b @ w, la.dag(w) @ block.c @ w), w


def is_trimmed(block: BlockSymbol, tol: Tolerances = DEFAULT_TOL) -> bool:
    try:
        require_strict(block.c, tol)
    except SingularC:
        return False
    return True


def modular_hamiltonian(q: Symbol, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``h = ln(1 - Q) - ln Q``, so that ``Q = (1 + e^h)^-1``."""
    q = q.q if isinstance(q, Symbol) else la.as_matrix(q)
    w, v = np.linalg.eigh(la.hermitize(q))
    if w.size and (w[0] <= tol.psd or w[-1] >= 1.0 - tol.psd):
        raise SingularSpectrum("symbol has eigenvalues at 0 or 1")
    return (v * (np.log1p(-w) - np.log(w))) @ la.dag(v)


def symbol_from_hamiltonian(h) -> np.ndarray:
    """Inverse of :func:`modular_hamiltonian`: the Fermi function ``(1 + e^h)^-1``."""
    return la.herm_func(la.as_matrix(h), lambda w: 0.5 * (1.0 - np.tanh(0.5 * w)))


def random_block_symbol(d1: int, d2: int, seed, margin: float = 0.05) -> BlockSymbol:
    """Random valid block symbol with assembled spectrum in ``[margin, 1 - margin]``.

    A GUE matrix is sampled and its spectrum mapped affinely onto the
    interval; deterministic in ``seed``.
    """
    if not 0.0 < margin < 0.5:
        raise ValueError("margin must lie in (0, 0.5)")
    rng = np.random.default_rng(seed)
    d = d1 + d2
    w, v = np.linalg.eigh(la.random_hermitian(rng, d))
    span = w[-1] - w[0]
    if span > 0:
        w = margin + (1.0 - 2.0 * margin) * (w - w[0]) / span
    else:
        w = np.full_like(w, 0.5)
    q = la.hermitize((v * w) @ la.dag(v))
    return BlockSymbol(q[:d1, :d1], q[:d1, d1:], q[d1:, d1:])


def random_symbol(rng: np.random.Generator, n: int, pinned: float = 0.0) -> Symbol:
    """Random symbol with Haar eigenvectors and uniform eigenvalues in ``[0, 1]``.

    Each eigenvalue is independently pinned to exactly 0 or 1 with probability
    ``pinned``, which exercises the Fock and anti-Fock factors.
    """
    w = rng.uniform(0.0, 1.0, n)
    pin = rng.uniform(size=n) < pinned
    w[pin] = rng.integers(0, 2, int(pin.sum()))
    u = la.random_unitary(rng, n)
    return Symbol(la.hermitize((u * w) @ la.dag(u)))
