"""Dense complex linear algebra kernel for small Hermitian problems.

All functions are pure, operate on plain ``numpy.ndarray`` values and keep
no global state, so they are safe to call concurrently.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError, NotPSDError, RankDeficiencyError

# Relative tolerance for accepting a nearly-Hermitian matrix.
HERMITIAN_RTOL = 1e-12
# Eigenvalues of nominally-PSD inputs below this are a hard error; negatives
# above it are clamped to zero (finite-precision input files).
PSD_REJECT = -1e-8
# Full-rank threshold (smallest eigenvalue) for inverse square roots.
RANK_TOL = 1e-14

__all__ = [
    "hermitize",
    "hermitian_eig",
    "psd_sqrt",
    "psd_inv_sqrt",
    "sqrt_adjoint",
    "hermitian_expi",
    "partial_trace",
    "givens",
]


def _as_matrix(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return m


def _as_square(m, name: str = "matrix") -> np.ndarray:
    m = _as_matrix(m, name)
    if m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {m.shape}")
    return m


def hermitize(m) -> np.ndarray:
    """Hermitian part (M + M†)/2."""
    m = _as_square(m)
    return (m + m.conj().T) / 2


def _require_hermitian(m, name: str = "matrix") -> np.ndarray:
    """Validate M = M† within tolerance and return the symmetrized copy."""
    m = _as_square(m, name)
    scale = max(1.0, float(np.linalg.norm(m)))
    if np.linalg.norm(m - m.conj().T) > HERMITIAN_RTOL * scale * m.shape[0]:
        raise InvalidInputError(f"{name} is not Hermitian")
    return (m + m.conj().T) / 2


def hermitian_eig(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues ``w`` and a unitary ``v`` whose
    columns are the matching eigenvectors, so ``m = v @ diag(w) @ v†``.
    """
    m = _require_hermitian(m)
    w, v = np.linalg.eigh(m)
    return w, v


def psd_sqrt(m) -> np.ndarray:
    """Principal square root of a PSD Hermitian matrix."""
    w, v = hermitian_eig(m)
    if w[0] < PSD_REJECT:
        raise NotPSDError(f"eigenvalue {w[0]:.3e} below PSD threshold")
    w = np.clip(w, 0.0, None)
    s = (v * np.sqrt(w)) @ v.conj().T
    return (s + s.conj().T) / 2


def psd_inv_sqrt(m) -> np.ndarray:
    """Inverse square root of a strictly positive definite matrix."""
    w, v = hermitian_eig(m)
    if w[0] <= RANK_TOL:
        raise RankDeficiencyError(
            f"smallest eigenvalue {w[0]:.3e} <= {RANK_TOL:g}; input is rank deficient"
        )
    r = (v / np.sqrt(w)) @ v.conj().T
    return (r + r.conj().T) / 2


def sqrt_adjoint(m, cotangent) -> np.ndarray:
    """Adjoint (vector-Jacobian product) of :func:`psd_sqrt` at ``m``.

    With S = sqrt(M), a perturbation obeys S·dS + dS·S = dM, so the pullback
    of a Hermitian cotangent G is the solution W of the Sylvester equation
    S·W + W·S = G.  Solved in the eigenbasis of M, where the Sylvester
    operator is diagonal with entries sqrt(λi) + sqrt(λj) > 0; this stays
    well-posed for clustered or repeated eigenvalues, unlike formulas built
    from eigenvector derivatives.
    """
    w, v = hermitian_eig(m)
    if w[0] <= RANK_TOL:
        raise RankDeficiencyError(
            f"smallest eigenvalue {w[0]:.3e} <= {RANK_TOL:g}; sqrt adjoint needs M > 0"
        )
    g = _require_hermitian(cotangent, "cotangent")
    s = np.sqrt(w)
    ghat = v.conj().T @ g @ v
    what = ghat / (s[:, None] + s[None, :])
    out = v @ what @ v.conj().T
    return (out + out.conj().T) / 2


def hermitian_expi(h) -> np.ndarray:
    """Unitary exp(iH) for Hermitian H, via eigendecomposition."""
    w, v = hermitian_eig(h)
    return (v * np.exp(1j * w)) @ v.conj().T


def partial_trace(m, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one tensor factor of a (d_A·d_B)-dimensional operator.

    ``keep=0`` keeps subsystem A (traces out B), ``keep=1`` keeps B.
    """
    m = _as_square(m)
    da, db = int(dims[0]), int(dims[1])
    if da < 1 or db < 1 or da * db != m.shape[0]:
        raise InvalidInputError(
            f"dims {dims} incompatible with matrix of size {m.shape[0]}"
        )
    if keep not in (0, 1):
        raise InvalidInputError(f"keep must be 0 or 1, got {keep}")
    r = m.reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("abcb->ac", r)
    return np.einsum("abad->bd", r)


def givens(n: int, s: int, theta: float, phi: float) -> np.ndarray:
    """Complex Givens rotation acting on adjacent coordinates (s, s+1).

    ``s`` is 1-based with 1 <= s <= n-1.  The 2x2 block is
    [[e^{iφ}cosθ, e^{-iφ}sinθ], [-e^{iφ}sinθ, e^{-iφ}cosθ]].
    """
    if not 1 <= s <= n - 1:
        raise InvalidInputError(f"block index s={s} out of range for n={n}")
    g = np.eye(n, dtype=np.complex128)
    c, sn = np.cos(theta), np.sin(theta)
    ep, em = np.exp(1j * phi), np.exp(-1j * phi)
    a = s - 1
    g[a, a] = ep * c
    g[a, a + 1] = em * sn
    g[a + 1, a] = -ep * sn
    g[a + 1, a + 1] = em * c
    return g
