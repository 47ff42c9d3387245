"""Dense Hermitian matrix functions and small linear-algebra helpers.

All matrix functions of Hermitian arguments go through ``numpy.linalg.eigh``;
the non-Hermitian logarithm uses an eigendecomposition and rejects defective
or branch-cut inputs instead of approximating them.
"""

import numpy as np

from .errors import Defective, DimensionMismatch, NoPrincipalLog

# condition number of the eigenvector matrix above which an input counts as defective
DEFECTIVE_COND = 1e8


def dag(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dag(m))


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Convert to a 2-d complex array, rejecting non-finite entries."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_vector(v, dim: int | None = None, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=complex).reshape(-1)
    if dim is not None and arr.shape[0] != dim:
        raise DimensionMismatch(f"{name} has length {arr.shape[0]}, expected {dim}")
    return arr


def vdot(psi: np.ndarray, phi: np.ndarray) -> complex:
    """Inner product ``<psi, phi>``, antilinear in the first argument."""
    return complex(np.vdot(psi, phi))


def herm_func(m: np.ndarray, f) -> np.ndarray:
    """Apply the scalar function ``f`` to the spectrum of the Hermitian ``m``."""
    w, v = np.linalg.eigh(hermitize(m))
    return (v * f(w)) @ dag(v)


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    return herm_func(m, lambda w: np.sqrt(np.clip(w, 0.0, None)))


def pinv_sqrtm_psd(m: np.ndarray, rcond: float) -> np.ndarray:
    """Pseudo-inverse square root; eigenvalues below ``rcond * max`` count as zero."""
    w, v = np.linalg.eigh(hermitize(m))
    cut = rcond * max(float(np.max(np.abs(w), initial=0.0)), np.finfo(float).tiny)
    inv = np.zeros_like(w)
    keep = w > cut
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (v * inv) @ dag(v)


def pinv(m: np.ndarray, rcond: float) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with a relative singular-value cutoff."""
    if m.size == 0:
        return np.zeros((m.shape[1], m.shape[0]), dtype=complex)
    return np.linalg.pinv(m, rcond=rcond)


def min_eig(m: np.ndarray) -> float:
    if m.shape[0] == 0:
        return np.inf
    return float(np.linalg.eigvalsh(hermitize(m))[0])


def max_eig(m: np.ndarray) -> float:
    if m.shape[0] == 0:
        return -np.inf
    return float(np.linalg.eigvalsh(hermitize(m))[-1])


def op_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def trace_norm(m: np.ndarray) -> float:
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def rank(m: np.ndarray, rcond: float) -> int:
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > rcond * s[0]))


def range_basis(m: np.ndarray, rcond: float) -> np.ndarray:
    """Orthonormal columns spanning the numerical range of ``m``."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(m)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((m.shape[0], 0), dtype=complex)
    return u[:, : int(np.sum(s > rcond * s[0]))]


def logm_principal(x: np.ndarray) -> np.ndarray:
    """Principal logarithm of a diagonalizable matrix.

    Raises
    ------
    NoPrincipalLog
        If an eigenvalue is zero or lies on the closed negative real axis.
    Defective
        If the eigenvector matrix is numerically singular.
    """
    x = as_matrix(x)
    if np.allclose(x, dag(x), atol=1e-14 * max(1.0, op_norm(x))):
        w, v = np.linalg.eigh(hermitize(x))
        if np.any(w <= 0.0):
            raise NoPrincipalLog(f"eigenvalue {w.min():.3g} on the closed negative axis")
        return (v * np.log(w)) @ dag(v)
    w, v = np.linalg.eig(x)
    scale = max(1.0, float(np.max(np.abs(w))))
    on_cut = (np.abs(w.imag) <= 1e-12 * scale) & (w.real <= 0.0)
    if np.any(on_cut) or np.any(np.abs(w) == 0.0):
        raise NoPrincipalLog("eigenvalue on the closed negative real axis")
    if np.linalg.cond(v) > DEFECTIVE_COND:
        raise Defective("matrix is not (numerically) diagonalizable")
    return (v * np.log(w)) @ np.linalg.inv(v)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + dag(z))


def random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)
