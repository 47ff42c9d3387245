"""Conditional free states on ``H1`` induced by perturbations on ``H2``.

For a block symbol ``[[A, B], [B*, C]]`` with ``0 < C < 1`` the two-point
matrix of any conditional state lies in the operator interval

    A - B C^-1 B*  <=  A~  <=  A + B (1 - C)^-1 B*,

and exponential conditioners ``E(L) / omega_Q(E(L))`` with ``L >= 0`` sweep
out this interval: ``L = 0`` gives the upper end exactly, ``L -> infinity``
the lower end.
"""

import enum
from dataclasses import dataclass

import numpy as np

from . import fock
from . import linalg as la
from .errors import (
    NotGaugeInvariant,
    NotNormalized,
    NotPositive,
    SingularResolvent,
    TargetNotReachable,
    TargetOutOfRange,
)
from .symbols import (
    DEFAULT_TOL,
    BlockSymbol,
    Symbol,
    Tolerances,
    require_strict,
    assemble,
    correlation_terms,
    validate_symbol,
)

# relative deviation of omega_Q(Y) from 1 that is silently renormalized
NORMALIZATION_SLACK = 1e-6


@dataclass(frozen=True, eq=False)
class ExponentialConditioner:
    """Positive ``L`` on ``H2`` standing for ``E(L) / omega_Q(E(L))``."""

    l: np.ndarray
    normalization: float


@dataclass(frozen=True, eq=False)
class ConditionalBounds:
    lower: np.ndarray
    upper: np.ndarray


class Membership(enum.Enum):
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"
    OUTSIDE = "Outside"


def _resolvent(block: BlockSymbol, l: np.ndarray) -> np.ndarray:
    return np.eye(block.d2) - block.c + block.c @ l


def exponential_conditioner(block: BlockSymbol, l, tol: Tolerances = DEFAULT_TOL) -> ExponentialConditioner:
    """Validate ``L >= 0`` and attach the normalization ``det(1 - C + CL)``."""
    l = la.as_matrix(l, "L")
    if l.shape != (block.d2, block.d2):
        raise ValueError(f"L has shape {l.shape}, expected {(block.d2, block.d2)}")
    if la.op_norm(l - la.dag(l)) > tol.herm * max(1.0, la.op_norm(l)):
        raise NotPositive("L is not Hermitian")
    l = la.hermitize(l)
    if la.min_eig(l) < -tol.psd * max(1.0, la.op_norm(l)):
        raise NotPositive(f"L has eigenvalue {la.min_eig(l):.3g} < 0")
    norm = np.linalg.det(_resolvent(block, l)) if block.d2 else 1.0
    if abs(norm) <= tol.det:
        raise SingularResolvent(f"det(1 - C + CL) = {abs(norm):.3g}")
    return ExponentialConditioner(l, float(np.real(norm)))


def conditional_symbol(block: BlockSymbol, cond, tol: Tolerances = DEFAULT_TOL) -> Symbol:
    """``A~ = A - B (L - 1)(1 - C + CL)^-1 B*``."""
    if not isinstance(cond, ExponentialConditioner):
        cond = exponential_conditioner(block, cond, tol)
    if block.d2 == 0:
        return validate_symbol(block.a, tol)
    l = cond.l
    shift = (l - np.eye(block.d2)) @ np.linalg.solve(_resolvent(block, l), la.dag(block.b))
    return validate_symbol(la.hermitize(block.a - block.b @ shift), tol)


def conditional_bounds(block: BlockSymbol, tol: Tolerances = DEFAULT_TOL) -> ConditionalBounds:
    require_strict(block.c, tol)
    through_c, through_1mc = correlation_terms(block)
    a = la.hermitize(block.a)
    return ConditionalBounds(a - through_c, a + through_1mc)


def membership(block: BlockSymbol, candidate, tol: Tolerances = DEFAULT_TOL) -> Membership:
    """Classify a symbol on ``H1`` against the closed interval of conditional symbols."""
    cand = candidate.q if isinstance(candidate, Symbol) else la.as_matrix(candidate)
    bounds = conditional_bounds(block, tol)
    worst = min(la.min_eig(cand - bounds.lower), la.min_eig(bounds.upper - cand))
    if worst > tol.psd:
        return Membership.INTERIOR
    if worst >= -tol.psd:
        return Membership.BOUNDARY
    return Membership.OUTSIDE


def target_kernel(block: BlockSymbol, target, eps: float = 1e-3, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Operator ``K`` on ``H2`` with ``target = A + B K B*`` inside the shrunk K-interval.

    The interval is ``-(1-eps) C^-1 <= K <= (1-eps)(1-C)^-1``. The
    minimum-norm solution ``B+ (target - A) B*+`` is used when it lies in the
    interval. Otherwise ``K`` is built as

        K = (1-eps) [-C^-1 + F (V* T V + (1 - V* V)/2) F]

    with ``F = (C(1-C))^-1/2``, ``B F = M^½ V`` the polar decomposition and
    ``T = M^-½ (D / (1-eps) + B C^-1 B*) M^-½`` clipped to ``[0, 1]``, where
    ``D = target - A``. This solves the equation exactly whenever the
    target satisfies the shrunk bounds.

    Raises
    ------
    TargetNotReachable
        ``target - A`` has components outside ``ran B``.
    TargetOutOfRange
        The target violates the ``eps``-shrunk bounds.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    require_strict(block.c, tol)
    target = validate_symbol(target, tol)
    a, b, c = la.hermitize(block.a), block.b, la.hermitize(block.c)
    delta = la.hermitize(target.q - a)
    scale = max(1.0, la.op_norm(delta))

    ub = la.range_basis(b, tol.psd)
    proj = ub @ la.dag(ub)
    if la.op_norm(delta - proj @ delta @ proj) > tol.psd * scale:
        raise TargetNotReachable("target - A is not supported on ran(B)")

    through_c, through_1mc = correlation_terms(block)
    if (la.min_eig(delta + (1 - eps) * through_c) < -tol.psd * scale
            or la.min_eig((1 - eps) * through_1mc - delta) < -tol.psd * scale):
        raise TargetOutOfRange(f"target outside the eps={eps:g} shrunk bounds")

    eye2 = np.eye(block.d2)
    c_inv = np.linalg.inv(c)
    one_minus_c_inv = np.linalg.inv(eye2 - c)

    def admissible(k):
        return (la.min_eig(k + (1 - eps) * c_inv) >= -tol.psd * la.op_norm(c_inv)
                and la.min_eig((1 - eps) * one_minus_c_inv - k) >= -tol.psd * la.op_norm(one_minus_c_inv))

    k = la.hermitize(la.pinv(b, tol.psd) @ delta @ la.pinv(la.dag(b), tol.psd))
    if admissible(k):
        return k

    f = la.herm_func(c, lambda w: 1.0 / np.sqrt(w * (1.0 - w)))
    u, s, wh = np.linalg.svd(b @ f)
    r = int(np.sum(s > tol.psd * s[0])) if s.size and s[0] > 0 else 0
    u_r, s_r, w_r = u[:, :r], s[:r], la.dag(wh[:r])
    t = (la.dag(u_r) @ (delta / (1 - eps) + through_c) @ u_r) / np.outer(s_r, s_r)
    t = la.herm_func(t, lambda w: np.clip(w, 0.0, 1.0)) if r else t
    inner = w_r @ t @ la.dag(w_r) + 0.5 * (eye2 - w_r @ la.dag(w_r))
    return la.hermitize((1 - eps) * (-c_inv + f @ inner @ f))


def conditioner_from_kernel(block: BlockSymbol, k, tol: Tolerances = DEFAULT_TOL) -> ExponentialConditioner:
    """``L = 1 + N`` with ``N = -K (1 + CK)^-1``.

    Singularity is judged by the smallest singular value of ``1 + CK``: in
    the shrunk interval its eigenvalues stay above ``eps`` while the
    determinant can fall like ``eps**d2``.
    """
    k = la.as_matrix(k)
    eye2 = np.eye(block.d2)
    resolvent = eye2 + block.c @ k
    if block.d2 and np.linalg.svd(resolvent, compute_uv=False)[-1] <= tol.det:
        raise SingularResolvent("1 + CK is singular")
    l = la.hermitize(eye2 - k @ np.linalg.inv(resolvent))
    return exponential_conditioner(block, l, tol)


def conditioner_for_target(block: BlockSymbol, target, eps: float = 1e-3,
                           tol: Tolerances = DEFAULT_TOL) -> ExponentialConditioner:
    """Exponential conditioner whose conditional symbol equals ``target``.

    ``target`` must lie within the ``eps``-shrunk bounds; targets on the
    unshrunk boundary need weak-* limits and are rejected.
    """
    if block.d2 == 0:
        if la.op_norm(validate_symbol(target, tol).q - block.a) > tol.psd:
            raise TargetNotReachable("no correlations: only A itself is reachable")
        return ExponentialConditioner(np.zeros((0, 0), dtype=complex), 1.0)
    return conditioner_from_kernel(block, target_kernel(block, target, eps, tol), tol)


def oracle_conditional_symbol(block: BlockSymbol, y_fock, tol: Tolerances = DEFAULT_TOL,
                              rep: fock.FockRep | None = None) -> Symbol:
    """Conditional two-point matrix computed on the Fock space.

    ``y_fock`` is an operator on the ``2**d2``-dimensional Fock space of
    ``H2``. Entries are arranged as ``A~[l, k] = omega_Q(a*(e_k) a(e_l) Y)``
    so that ``<psi, A~ phi> = omega_Q(a*(phi) a(psi) Y)``.

    Raises
    ------
    NotGaugeInvariant, NotPositive, NotNormalized
    """
    y = la.as_matrix(y_fock, "Y")
    rep2 = fock.build_rep(block.d2, cap=fock.HARD_MAX_MODES)
    if y.shape != (rep2.dim, rep2.dim):
        raise ValueError(f"Y has shape {y.shape}, expected {(rep2.dim, rep2.dim)}")
    if not fock.is_gauge_invariant(rep2, y):
        raise NotGaugeInvariant("Y does not commute with the number operator of H2")
    if la.op_norm(y - la.dag(y)) > tol.herm * max(1.0, la.op_norm(y)) \
            or la.min_eig(y) < -tol.psd * max(1.0, la.op_norm(y)):
        raise NotPositive("Y is not positive semidefinite")

    q = assemble(block, tol)
    rep = rep or fock.build_rep(q.dim)
    fs = fock.free_density_matrix(q, rep)
    y_full = fock.embed_second_party(la.hermitize(y), block.d1)
    norm = fs.expect(y_full).real
    if abs(norm - 1.0) > NORMALIZATION_SLACK:
        raise NotNormalized(f"omega_Q(Y) = {norm:.6g}, expected 1")
    weighted = fs.rho @ y_full / norm
    a_tilde = np.empty((block.d1, block.d1), dtype=complex)
    for k in range(block.d1):
        left = weighted @ la.dag(rep.ann[k])
        for l in range(block.d1):
            a_tilde[l, k] = np.trace(left @ rep.ann[l])
    return validate_symbol(la.hermitize(a_tilde), Tolerances(herm=tol.oracle, psd=tol.oracle,
                                                             det=tol.det, oracle=tol.oracle))


def normalized_exp_conditioner_fock(block: BlockSymbol, l, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``E(L) / det(1 - C + CL)`` as a Fock-space operator on ``H2``."""
    cond = l if isinstance(l, ExponentialConditioner) else exponential_conditioner(block, l, tol)
    rep2 = fock.build_rep(block.d2, cap=fock.HARD_MAX_MODES)
    return fock.exp_element(rep2, cond.l) / cond.normalization
