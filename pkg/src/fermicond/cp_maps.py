"""Gauge-invariant free completely positive maps and the minimal conditional model.

A free, identity preserving CP map ``A(H) -> A(K)`` is fixed by ``R: H -> K``
and ``S`` on ``H`` with ``0 <= S <= 1 - R*R``. On two-point monomials it acts
as ``a*(phi) a(psi) -> a*(R phi) a(R psi) + <psi, S phi>``, hence pulls the
free state with symbol ``T`` back to the one with symbol ``R* T R + S``.
"""

from dataclasses import dataclass

import numpy as np

from . import fock
from . import linalg as la
from .conditioning import Membership, conditional_bounds, conditional_symbol, membership
from .errors import DimensionMismatch, RankDeficient, SExceedsComplement, SNotPositive
from .symbols import DEFAULT_TOL, BlockSymbol, Symbol, Tolerances, validate_symbol


@dataclass(frozen=True, eq=False)
class FreeCPMap:
    r: np.ndarray
    s: np.ndarray

    @property
    def source_dim(self) -> int:
        return self.s.shape[0]

    @property
    def target_dim(self) -> int:
        return self.r.shape[0]


def validate_cp_map(r, s, tol: Tolerances = DEFAULT_TOL) -> FreeCPMap:
    s = la.as_matrix(s, "S")
    r = np.asarray(r, dtype=complex)
    if r.size == 0:
        r = np.zeros((0, s.shape[0]), dtype=complex)
    r = la.as_matrix(r, "R")
    if s.shape[0] != s.shape[1] or r.shape[1] != s.shape[0]:
        raise DimensionMismatch(f"R {r.shape} and S {s.shape} are incompatible")
    if la.op_norm(s - la.dag(s)) > tol.herm:
        raise SNotPositive("S is not Hermitian")
    s = la.hermitize(s)
    if la.min_eig(s) < -tol.psd:
        raise SNotPositive(f"S has eigenvalue {la.min_eig(s):.3g} < 0")
    slack = la.min_eig(np.eye(s.shape[0]) - la.dag(r) @ r - s)
    if slack < -tol.psd:
        raise SExceedsComplement(f"S > 1 - R*R by {-slack:.3g}")
    return FreeCPMap(r, s)


def pullback_symbol(cp: FreeCPMap, t, tol: Tolerances = DEFAULT_TOL) -> Symbol:
    t = validate_symbol(t, tol)
    if t.dim != cp.target_dim:
        raise DimensionMismatch(f"T acts on {t.dim} modes, map targets {cp.target_dim}")
    return validate_symbol(la.dag(cp.r) @ t.q @ cp.r + cp.s, tol)


def pullback_two_point_fock(cp: FreeCPMap, t, phi, psi) -> complex:
    """``omega_T(Gamma(a*(phi) a(psi)))`` evaluated on the Fock space of ``K``."""
    t = validate_symbol(t)
    phi, psi = la.as_vector(phi), la.as_vector(psi)
    s_term = la.vdot(psi, cp.s @ phi)
    if cp.target_dim == 0:
        return s_term
    rep = fock.build_rep(cp.target_dim)
    fs = fock.free_density_matrix(t, rep)
    return fs.expect(rep.adag(cp.r @ phi) @ rep.a(cp.r @ psi)) + s_term


def minimal_model(block: BlockSymbol, tol: Tolerances = DEFAULT_TOL) -> FreeCPMap:
    """Free CP map onto ``K = ran B`` whose pull-backs are the closed conditional set.

    ``S = A - B C^-1 B*`` and ``R = U* M^½`` with ``M = B C^-1 B* + B (1-C)^-1 B*``,
    where the columns of ``U`` are the left singular vectors of ``B`` spanning
    its range; this identifies ``K`` with ``C^rank(B)``.
    """
    bounds = conditional_bounds(block, tol)
    spread = la.hermitize(bounds.upper - bounds.lower)
    basis = la.range_basis(block.b, tol.psd)
    if basis.shape[1] != la.rank(spread, tol.psd):
        raise RankDeficient("rank of B and of the bound spread disagree")
    r = la.dag(basis) @ la.sqrtm_psd(spread)
    return validate_cp_map(r, bounds.lower, tol)


def recover_t(cp: FreeCPMap, a_tilde, tol: Tolerances = DEFAULT_TOL):
    """Solve ``R* T R + S = A~`` by pseudo-inverses, clipping ``T`` into ``[0, 1]``.

    Returns ``(T, residual)`` with the residual measured in operator norm.
    """
    a_tilde = a_tilde.q if isinstance(a_tilde, Symbol) else la.as_matrix(a_tilde)
    r_pinv = la.pinv(cp.r, tol.psd)
    t = la.hermitize(la.dag(r_pinv) @ (a_tilde - cp.s) @ r_pinv)
    if t.size:
        t = la.herm_func(t, lambda w: np.clip(w, 0.0, 1.0))
    residual = la.op_norm(la.dag(cp.r) @ t @ cp.r + cp.s - a_tilde)
    return t, residual


def _random_t(rng: np.random.Generator, k: int) -> np.ndarray:
    u = la.random_unitary(rng, k) if k else np.zeros((0, 0))
    return (u * rng.uniform(0.0, 1.0, k)) @ la.dag(u)


def _random_conditioner(rng: np.random.Generator, d2: int) -> np.ndarray:
    u = la.random_unitary(rng, d2)
    return (u * np.exp(rng.uniform(-4.0, 4.0, d2))) @ la.dag(u)


def model_equivalence_check(block: BlockSymbol, trials: int, seed, tol: Tolerances = DEFAULT_TOL) -> dict:
    """Compare the pull-back set of :func:`minimal_model` with the conditional set.

    Random ``0 <= T <= 1`` must pull back into the closed bounds, and random
    conditional symbols (from exponential conditioners) must be recovered as
    pull-backs. Failures are recorded in the report, never raised.
    """
    rng = np.random.default_rng(seed)
    cp = minimal_model(block, tol)
    bounds = conditional_bounds(block, tol)
    outside = 0
    for _ in range(trials):
        cls = membership(block, la.dag(cp.r) @ _random_t(rng, cp.target_dim) @ cp.r + cp.s, tol)
        outside += cls is Membership.OUTSIDE
    residuals, interior = [], 0
    for _ in range(trials):
        a_tilde = conditional_symbol(block, _random_conditioner(rng, block.d2), tol)
        interior += membership(block, a_tilde, tol) is Membership.INTERIOR
        residuals.append(recover_t(cp, a_tilde, tol)[1])
    endpoint = max(
        la.op_norm(pullback_symbol(cp, np.zeros((cp.target_dim,) * 2), tol).q - bounds.lower),
        la.op_norm(pullback_symbol(cp, np.eye(cp.target_dim), tol).q - bounds.upper),
    )
    max_res = max(residuals, default=0.0)
    return {
        "target_dim": cp.target_dim,
        "rank_b": la.rank(block.b, tol.psd),
        "pullbacks_outside": int(outside),
        "targets_interior": int(interior),
        "max_recovery_residual": float(max_res),
        "endpoint_residual": float(endpoint),
        "pass": outside == 0 and max_res < tol.oracle and endpoint < 10 * tol.psd,
    }
