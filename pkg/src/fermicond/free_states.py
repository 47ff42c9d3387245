"""Closed-form expectations in gauge-invariant free states.

Inner products are antilinear in the first argument, so the two-point
function reads ``omega_Q(a*(phi) a(psi)) = <psi, Q phi>``. Swapping the
arguments silently exchanges ``B`` and ``B*`` in every block formula.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch
from .symbols import DEFAULT_TOL, Symbol, Tolerances, spectral_subspaces, validate_symbol


@dataclass(frozen=True, eq=False)
class FreeState:
    symbol: Symbol

    @classmethod
    def from_matrix(cls, q, tol: Tolerances = DEFAULT_TOL) -> "FreeState":
        return cls(validate_symbol(q, tol))

    @property
    def dim(self) -> int:
        return self.symbol.dim


@dataclass(frozen=True, eq=False)
class Monomial:
    """``a*(phi_1) ... a*(phi_n) a(psi_n) ... a(psi_1)``.

    ``annihilators`` is stored in product order ``[psi_n, ..., psi_1]`` so the
    Wick matrix can be written down exactly as printed.
    """

    creators: tuple
    annihilators: tuple

    def __post_init__(self):
        cre = tuple(la.as_vector(v) for v in self.creators)
        ann = tuple(la.as_vector(v) for v in self.annihilators)
        if len(cre) != len(ann):
            raise DimensionMismatch("gauge-invariant monomials need equal creator/annihilator counts")
        object.__setattr__(self, "creators", cre)
        object.__setattr__(self, "annihilators", ann)

    @property
    def order(self) -> int:
        return len(self.creators)

    def adjoint(self) -> "Monomial":
        """``a*(psi_1) ... a*(psi_n) a(phi_n) ... a(phi_1)``."""
        return Monomial(self.annihilators[::-1], self.creators[::-1])


def _check_dim(state: FreeState, *vectors):
    for v in vectors:
        if v.shape[0] != state.dim:
            raise DimensionMismatch(f"vector of length {v.shape[0]} for {state.dim} modes")


def two_point(state: FreeState, phi, psi) -> complex:
    phi, psi = la.as_vector(phi), la.as_vector(psi)
    _check_dim(state, phi, psi)
    return la.vdot(psi, state.symbol.q @ phi)


def wick_matrix(state: FreeState, m: Monomial) -> np.ndarray:
    """``[<psi_k, Q phi_l>]_{k,l}``."""
    n = m.order
    _check_dim(state, *m.creators, *m.annihilators)
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    psi = np.array(m.annihilators[::-1])  # row k holds psi_{k+1}
    phi = np.array(m.creators)
    return np.conj(psi) @ state.symbol.q @ phi.T


def wick_expectation(state: FreeState, m: Monomial) -> complex:
    if m.order == 0:
        return 1.0 + 0.0j
    if m.order == 1:
        return two_point(state, m.creators[0], m.annihilators[0])
    return complex(np.linalg.det(wick_matrix(state, m)))


def exp_expectation(state: FreeState, x) -> complex:
    """``omega_Q(E(X)) = det(1 - Q + QX)``; ``X`` need not be invertible."""
    x = la.as_matrix(x)
    if x.shape != (state.dim, state.dim):
        raise DimensionMismatch(f"X has shape {x.shape} for {state.dim} modes")
    q = state.symbol.q
    return complex(np.linalg.det(np.eye(state.dim) - q + q @ x))


class FreeFactor(NamedTuple):
    """Restriction of a free state to a subspace with isometry ``v`` (columns span it)."""

    state: FreeState
    isometry: np.ndarray

    @property
    def projector(self) -> np.ndarray:
        return self.isometry @ la.dag(self.isometry)

    def pull_back(self, vec) -> np.ndarray:
        """Coordinates of a vector of the subspace in the isometry's basis."""
        return la.dag(self.isometry) @ la.as_vector(vec)


def factorize(state: FreeState, tol: Tolerances = DEFAULT_TOL):
    """Split into Fock (``Q = 0``), strictly mixed and anti-Fock (``Q = 1``) factors.

    Returns three :class:`FreeFactor` objects whose restricted symbols are
    ``V* Q V``; the Fock and anti-Fock symbols are exactly 0 and 1.
    """
    v0, vm, v1 = spectral_subspaces(state.symbol, tol)
    q = state.symbol.q
    mixed = Symbol(la.hermitize(la.dag(vm) @ q @ vm))
    return (
        FreeFactor(FreeState(Symbol(np.zeros((v0.shape[1],) * 2))), v0),
        FreeFactor(FreeState(mixed), vm),
        FreeFactor(FreeState(Symbol(np.eye(v1.shape[1]))), v1),
    )
