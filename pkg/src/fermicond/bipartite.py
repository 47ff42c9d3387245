"""Conditional states of finite-dimensional bipartite density matrices.

Tensor ordering is the usual Kronecker one: index ``i * d2 + k`` for
``e_i (x) f_k``, so the first party is the slow index.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, NotNormalizable, NotNormalized, NotPositive

NORMALIZATION_SLACK = 1e-6
SCHMIDT_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    rho: np.ndarray
    dims: tuple

    @property
    def d1(self) -> int:
        return self.dims[0]

    @property
    def d2(self) -> int:
        return self.dims[1]

    def tensor(self) -> np.ndarray:
        """``rho[i, k, j, l] = <e_i f_k, rho e_j f_l>``."""
        return self.rho.reshape(self.d1, self.d2, self.d1, self.d2)


def density_matrix(rho, dims, tol: float = 1e-9) -> DensityMatrix:
    rho = la.as_matrix(rho, "rho")
    d1, d2 = (int(d) for d in dims)
    if rho.shape != (d1 * d2, d1 * d2):
        raise DimensionMismatch(f"rho has shape {rho.shape} for dims {(d1, d2)}")
    if la.op_norm(rho - la.dag(rho)) > tol:
        raise NotPositive("rho is not Hermitian")
    rho = la.hermitize(rho)
    if la.min_eig(rho) < -tol:
        raise NotPositive(f"rho has eigenvalue {la.min_eig(rho):.3g}")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise NotNormalized(f"trace rho = {np.trace(rho).real:.6g}")
    return DensityMatrix(rho, (d1, d2))


def pure_density(omega, dims) -> DensityMatrix:
    omega = la.as_vector(omega, dims[0] * dims[1])
    return density_matrix(np.outer(omega, np.conj(omega)), dims)


def conditional_functional(rho: DensityMatrix, a2, tol: float = 1e-9) -> np.ndarray:
    """Density matrix ``sigma`` on ``H1`` with ``tr(sigma A1) = <A1 (x) A2>``.

    ``A2 >= 0`` is renormalized so that ``<1 (x) A2> = 1`` when it is off by
    at most ``1e-6``.
    """
    a2 = la.as_matrix(a2, "A2")
    if a2.shape != (rho.d2, rho.d2):
        raise DimensionMismatch(f"A2 has shape {a2.shape}, expected {(rho.d2, rho.d2)}")
    if la.op_norm(a2 - la.dag(a2)) > tol or la.min_eig(a2) < -tol * max(1.0, la.op_norm(a2)):
        raise NotPositive("A2 must be positive semidefinite")
    sigma = np.einsum("ikjl,lk->ij", rho.tensor(), a2)
    norm = np.trace(sigma).real
    if norm <= tol:
        raise NotNormalizable("<1 (x) A2> vanishes")
    if abs(norm - 1.0) > NORMALIZATION_SLACK:
        raise NotNormalized(f"<1 (x) A2> = {norm:.6g}; rescale A2")
    return la.hermitize(sigma / norm)


def realignment(rho: DensityMatrix) -> np.ndarray:
    """Matrix of ``A2 -> (A1 -> <A1 (x) A2>)`` with rows ``(i, j)`` and columns ``(k, l)``."""
    return rho.tensor().transpose(0, 2, 1, 3).reshape(rho.d1**2, rho.d2**2)


def correlation_dimension(rho: DensityMatrix, tol: float = 1e-9) -> int:
    return la.rank(realignment(rho), tol)


@dataclass(frozen=True, eq=False)
class PureBipartite:
    """Normalized vector together with its Schmidt data.

    ``omega = sum_i coefficients[i] * left[:, i] (x) right[:, i]`` with the
    coefficients (square roots of the Schmidt weights) in descending order.
    """

    omega: np.ndarray
    dims: tuple
    coefficients: np.ndarray
    left: np.ndarray
    right: np.ndarray

    @property
    def rank(self) -> int:
        return self.coefficients.size

    @property
    def weights(self) -> np.ndarray:
        return self.coefficients**2

    def reconstruct(self) -> np.ndarray:
        return np.einsum("i,ai,bi->ab", self.coefficients, self.left, self.right).reshape(-1)


def schmidt(omega, dims, tol: float = 1e-9) -> PureBipartite:
    d1, d2 = (int(d) for d in dims)
    omega = la.as_vector(omega, d1 * d2)
    if abs(np.linalg.norm(omega) - 1.0) > tol:
        raise NotNormalized(f"|omega| = {np.linalg.norm(omega):.6g}")
    u, s, vh = np.linalg.svd(omega.reshape(d1, d2), full_matrices=False)
    p = int(np.sum(s > SCHMIDT_CUTOFF * s[0]))
    return PureBipartite(omega, (d1, d2), s[:p], u[:, :p], vh[:p].T)


def pure_conditional_model(pb: PureBipartite):
    """Superoperators ``Lambda`` and ``Gamma`` as 4-index arrays.

    ``X(A1)[k, l] = sum_ij X[k, l, i, j] A1[i, j]`` in the basis of the
    right Schmidt vectors, with

        Lambda(A1) = sum_kl r_k^½ r_l^½ <e_k, A1 e_l> |f_k><f_l|
        Gamma(A1)  = Lambda(1)^-½ Lambda(A1) Lambda(1)^-½.

    ``Lambda(1) = diag(r)`` is inverted on its support.
    """
    c = pb.coefficients
    e = pb.left
    # <e_k, A e_l> = sum_ij conj(e[i, k]) A[i, j] e[j, l]
    compress = np.einsum("ik,jl->klij", np.conj(e), e)
    lam = compress * np.outer(c, c)[:, :, None, None]
    lam1 = np.einsum("klii->kl", lam)
    inv_sqrt = la.pinv_sqrtm_psd(lam1, SCHMIDT_CUTOFF)
    gam = np.einsum("ka,abij,bl->klij", inv_sqrt, lam, inv_sqrt)
    return lam, gam


def apply_superop(x: np.ndarray, a1) -> np.ndarray:
    return np.einsum("klij,ij->kl", x, la.as_matrix(a1))


def choi_matrix(x: np.ndarray) -> np.ndarray:
    """``sum_ij |i><j| (x) X(|i><j|)``."""
    p, _, d, _ = x.shape
    return x.transpose(2, 0, 3, 1).reshape(d * p, d * p)


def model_state(pb: PureBipartite, a2) -> np.ndarray:
    """State ``sigma'`` on ``C^p`` with ``<A1 (x) A2> = tr(sigma' Gamma(A1))``.

    For a pure state ``sigma' = D conj(F* A2 F) D`` with ``D = diag(r^½)`` and
    ``F`` the right Schmidt vectors.
    """
    f = pb.right
    g = la.dag(f) @ la.as_matrix(a2) @ f
    sigma = pb.coefficients[:, None] * np.conj(g) * pb.coefficients[None, :]
    return la.hermitize(sigma / np.trace(sigma).real)


def model_residual(pb: PureBipartite, a2) -> float:
    """Distance between the conditional functional and its model ``E sigma' E*``."""
    sigma = conditional_functional(pure_density(pb.omega, pb.dims), a2)
    model = pb.left @ model_state(pb, a2) @ la.dag(pb.left)
    return la.op_norm(sigma - model)


def random_schmidt_state(rng: np.random.Generator, d1: int, d2: int, p: int) -> np.ndarray:
    """Random unit vector of exact Schmidt rank ``p``."""
    if not 1 <= p <= min(d1, d2):
        raise ValueError(f"Schmidt rank {p} impossible for dims {(d1, d2)}")
    u = la.random_unitary(rng, d1)[:, :p]
    v = la.random_unitary(rng, d2)[:, :p]
    c = rng.uniform(0.2, 1.0, p)
    c /= np.linalg.norm(c)
    return np.einsum("i,ai,bi->ab", c, u, v).reshape(-1)
