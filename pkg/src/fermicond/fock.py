"""Brute-force Fock-space representation of the CAR algebra.

Everything here works with dense ``2**n x 2**n`` matrices and serves as the
independent ground truth for the closed-form formulas elsewhere in the
package.

Conventions
-----------
Occupation-number basis with mode 1 as the fastest-varying bit, so basis
index ``s`` has mode ``i`` (0-based) occupied iff ``s >> i & 1``; index 0 is
the vacuum. The Jordan-Wigner annihilators are

    a_i = Z x ... x Z x sigma^- x 1 x ... x 1     (i - 1 factors of Z)

with the tensor factors listed from mode 1 upwards and
``sigma^- = [[0, 1], [0, 0]]`` in the ``(|0>, |1>)`` basis. ``a(phi)`` is
antilinear and ``a*(phi)`` linear in ``phi``.
"""

import logging
import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg as la
from .errors import DimensionMismatch, NotGaugeInvariant, NotPositive, TooManyModes
from .jsonio import matrix_to_json
from .symbols import Symbol, validate_symbol

logger = logging.getLogger(__name__)

DEFAULT_MAX_MODES = 10
HARD_MAX_MODES = 12


def max_modes() -> int:
    """Mode cap, overridable through ``FERMICOND_MAX_MODES`` up to the hard cap."""
    raw = os.environ.get("FERMICOND_MAX_MODES")
    if raw is None:
        return DEFAULT_MAX_MODES
    cap = int(raw)
    if cap > HARD_MAX_MODES:
        logger.warning("FERMICOND_MAX_MODES=%d exceeds hard cap %d", cap, HARD_MAX_MODES)
        cap = HARD_MAX_MODES
    return cap


def check_modes(n: int, cap: int | None = None) -> None:
    cap = max_modes() if cap is None else min(cap, HARD_MAX_MODES)
    if n < 1 or n > cap:
        raise TooManyModes(f"{n} modes requested, allowed range is 1..{cap}")
    if n > DEFAULT_MAX_MODES:
        logger.warning("dense Fock matrices of dimension %d use %.0f MiB each",
                       2**n, 16 * 4.0**n / 2**20)


@dataclass(frozen=True, eq=False)
class FockRep:
    """Annihilation operators ``a_1 .. a_n`` on the ``2**n``-dimensional Fock space."""

    n_modes: int
    ann: tuple
    number_op: np.ndarray

    @property
    def dim(self) -> int:
        return 2**self.n_modes

    def a(self, phi) -> np.ndarray:
        phi = la.as_vector(phi, self.n_modes, "mode vector")
        return sum(np.conj(c) * op for c, op in zip(phi, self.ann))

    def adag(self, phi) -> np.ndarray:
        return la.dag(self.a(phi))

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def occupations(self) -> np.ndarray:
        """Total particle number of every basis state."""
        s = np.arange(self.dim)
        return np.array([bin(x).count("1") for x in s])


def build_rep(n: int, cap: int | None = None) -> FockRep:
    check_modes(n, cap)
    dim = 2**n
    states = np.arange(dim)
    ann = []
    for i in range(n):
        occupied = states[(states >> i) & 1 == 1]
        lower_bits = occupied & ((1 << i) - 1)
        signs = np.array([(-1) ** bin(x).count("1") for x in lower_bits], dtype=float)
        op = np.zeros((dim, dim), dtype=complex)
        op[occupied - (1 << i), occupied] = signs
        op.setflags(write=False)
        ann.append(op)
    number = np.diag(np.array([bin(x).count("1") for x in states], dtype=complex))
    number.setflags(write=False)
    return FockRep(n, tuple(ann), number)


def gamma_fock(rep: FockRep, a_mat) -> np.ndarray:
    """Second quantization ``Gamma(A) = sum_kl A_kl a*_k a_l``."""
    a_mat = la.as_matrix(a_mat)
    if a_mat.shape != (rep.n_modes, rep.n_modes):
        raise DimensionMismatch(f"operator shape {a_mat.shape} for {rep.n_modes} modes")
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for k in range(rep.n_modes):
        cre = la.dag(rep.ann[k])
        for l in range(rep.n_modes):
            if a_mat[k, l] != 0:
                out += a_mat[k, l] * (cre @ rep.ann[l])
    return out


def exp_element(rep: FockRep, x) -> np.ndarray:
    """``E(X) = exp(Gamma(log X))`` for ``X`` with a principal logarithm."""
    return scipy.linalg.expm(gamma_fock(rep, la.logm_principal(x)))


def monomial_op(rep: FockRep, creators, annihilators) -> np.ndarray:
    """``a*(phi_1) ... a*(phi_n) a(psi_m) ... a(psi_1)`` with factors in list order.

    ``annihilators`` is given left to right as it appears in the product, i.e.
    ``[psi_m, ..., psi_1]``. Counts need not agree.
    """
    op = rep.identity()
    for phi in creators:
        op = op @ rep.adag(phi)
    for psi in annihilators:
        op = op @ rep.a(psi)
    return op


@dataclass(frozen=True, eq=False)
class FockState:
    rho: np.ndarray

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.rho @ op))


def free_density_matrix(q, rep: FockRep | None = None) -> FockState:
    """Density matrix of the free state with symbol ``q``.

    Built in the eigenmodes ``u_k`` of ``Q`` as the product of the commuting
    single-mode factors ``(1 - q_k)(1 - n_k) + q_k n_k`` with
    ``n_k = a*(u_k) a(u_k)``; eigenvalues 0 and 1 give exact Fock and anti-Fock
    factors.
    """
    q = validate_symbol(q)
    if rep is None:
        rep = build_rep(q.dim)
    elif rep.n_modes != q.dim:
        raise DimensionMismatch("representation and symbol disagree on mode count")
    w, v = np.linalg.eigh(q.q)
    eye = rep.identity()
    rho = eye
    for k in range(q.dim):
        b = rep.a(v[:, k])
        n_k = la.dag(b) @ b
        rho = rho @ ((1.0 - w[k]) * (eye - n_k) + w[k] * n_k)
    return FockState(la.hermitize(rho))


def is_gauge_invariant(rep: FockRep, y: np.ndarray, atol: float = 1e-10) -> bool:
    comm = rep.number_op @ y - y @ rep.number_op
    return la.op_norm(comm) <= atol * max(1.0, la.op_norm(y))


def embed_second_party(y2: np.ndarray, d1: int) -> np.ndarray:
    """Embed an even operator on the modes of ``H2`` into the ``H1 + H2`` Fock space.

    With ``H1`` occupying the low bits, the Jordan-Wigner strings of even
    ``H2`` elements cancel and the embedding is ``Y2 x 1``.
    """
    return np.kron(y2, np.eye(2**d1, dtype=complex))


def commutator_sides(fs: FockState, rep: FockRep, q: Symbol, phi, y: np.ndarray):
    """Left side and the two candidate right sides of the commutator identity.

    Returns ``(lhs, rhs_smeared, rhs_plain)`` where the correlation term is
    ``{a(Q phi), [a*(Q phi), Y]}`` resp. ``{a(phi), [a*(phi), Y]}``.
    """
    phi = la.as_vector(phi, rep.n_modes)
    a_phi, ad_phi = rep.a(phi), rep.adag(phi)
    lhs = fs.expect(ad_phi @ y @ a_phi)
    base = fs.expect(ad_phi @ a_phi) * fs.expect(y)

    def corr(vec):
        a, ad = rep.a(vec), rep.adag(vec)
        comm = ad @ y - y @ ad
        return fs.expect(a @ comm + comm @ a)

    return lhs, base + corr(q.q @ phi), base + corr(phi)


def lemma1_residual(q, phi, y, variant: str = "smeared", rep: FockRep | None = None) -> float:
    """``|LHS - RHS|`` of the commutator/anticommutator identity for gauge-invariant ``y``."""
    q = validate_symbol(q)
    rep = rep or build_rep(q.dim)
    y = la.as_matrix(y)
    if not is_gauge_invariant(rep, y):
        raise NotGaugeInvariant("Y does not commute with the number operator")
    lhs, smeared, plain = commutator_sides(free_density_matrix(q, rep), rep, q, phi, y)
    rhs = {"smeared": smeared, "plain": plain}[variant]
    return abs(lhs - rhs)


def lemma1_variants(q, phi, y, rep: FockRep | None = None) -> dict:
    """Residuals of both readings of the correlation term."""
    q = validate_symbol(q)
    rep = rep or build_rep(q.dim)
    lhs, smeared, plain = commutator_sides(free_density_matrix(q, rep), rep, q, phi, la.as_matrix(y))
    return {"smeared": abs(lhs - smeared), "plain": abs(lhs - plain)}


def e_map_bounds_check(rep: FockRep, a_pos) -> dict:
    """Norm bounds of ``E(1 + A)`` for ``A >= 0``.

    Checks ``1 + |A|_1 <= |E(1+A)| <= exp(|A|_1)`` and
    ``|E(1+A) - 1| <= exp(|A|_1) - 1``; margins are reported so that
    non-negative means satisfied.
    """
    a_pos = la.as_matrix(a_pos)
    if la.min_eig(a_pos) < -1e-12 or la.op_norm(a_pos - la.dag(a_pos)) > 1e-12:
        raise NotPositive("A must be positive semidefinite")
    t1 = float(np.trace(a_pos).real)
    e = exp_element(rep, np.eye(rep.n_modes) + a_pos)
    norm_e = la.op_norm(e)
    norm_diff = la.op_norm(e - rep.identity())
    margins = {
        "lower": norm_e - (1.0 + t1),
        "upper": np.exp(t1) - norm_e,
        "difference": (np.exp(t1) - 1.0) - norm_diff,
    }
    return {"trace_norm": t1, "norm": norm_e, "norm_minus_identity": norm_diff,
            "margins": margins, "pass": min(margins.values()) >= -1e-10 * max(1.0, np.exp(t1))}


def random_gauge_invariant_positive(rep: FockRep, q, seed) -> np.ndarray:
    """Random ``Y >= 0`` commuting with the number operator, with ``omega_Q(Y) = 1``.

    Each particle-number sector gets an independent random positive block of
    random rank.
    """
    q = validate_symbol(q)
    rng = np.random.default_rng(seed)
    occ = rep.occupations()
    y = np.zeros((rep.dim, rep.dim), dtype=complex)
    for n in range(rep.n_modes + 1):
        idx = np.flatnonzero(occ == n)
        k = len(idx)
        r = int(rng.integers(1, k + 1))
        g = rng.standard_normal((k, r)) + 1j * rng.standard_normal((k, r))
        y[np.ix_(idx, idx)] = g @ la.dag(g) * rng.uniform(0.0, 2.0)
    norm = free_density_matrix(q, rep).expect(y).real
    return la.hermitize(y / norm)


def random_gauge_invariant(rep: FockRep, rng: np.random.Generator) -> np.ndarray:
    """Random (not necessarily positive) operator commuting with the number operator."""
    occ = rep.occupations()
    y = np.zeros((rep.dim, rep.dim), dtype=complex)
    for n in range(rep.n_modes + 1):
        idx = np.flatnonzero(occ == n)
        k = len(idx)
        y[np.ix_(idx, idx)] = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return y


def number_sector_projector(rep: FockRep, n: int) -> np.ndarray:
    return np.diag((rep.occupations() == n).astype(complex))


def dump_rep(rep: FockRep) -> dict:
    """JSON-ready dump of the annihilators for cross-implementation diffing."""
    return {"n_modes": rep.n_modes, "ann": [matrix_to_json(op) for op in rep.ann]}
