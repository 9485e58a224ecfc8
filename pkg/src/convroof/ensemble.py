"""Density matrices, their spectral preparation, and auxiliary ensembles.

A point X on St(n, d) together with the spectral decomposition of a state
rho defines n unnormalized pure states (rows of an n×d array) whose Gram
accumulation reproduces rho exactly whenever X†X = I.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidStateError

# Numerical-rank threshold for eigenvalues of a density matrix.
RANK_TOL = 1e-12
# Validation tolerances for density matrices.
STATE_ATOL = 1e-10

__all__ = [
    "DensityMatrix",
    "SpectralPrep",
    "AuxiliaryEnsemble",
    "spectral_prep",
    "auxiliary_states",
    "grad_wrt_stiefel",
]


@dataclass(frozen=True)
class DensityMatrix:
    """Validated Hermitian, PSD, unit-trace matrix with optional factors."""

    matrix: np.ndarray
    factors: tuple[int, ...] | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density matrix must be square, got {m.shape}")
        if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
            raise InvalidStateError("density matrix has non-finite entries")
        if np.linalg.norm(m - m.conj().T) > STATE_ATOL * max(1.0, np.linalg.norm(m)):
            raise InvalidStateError("density matrix is not Hermitian")
        m = (m + m.conj().T) / 2
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > STATE_ATOL:
            raise InvalidStateError(f"trace is {tr}, expected 1")
        wmin = float(np.linalg.eigvalsh(m)[0])
        if wmin < -STATE_ATOL:
            raise InvalidStateError(f"minimum eigenvalue {wmin:.3e} < -{STATE_ATOL:g}")
        if self.factors is not None:
            factors = tuple(int(f) for f in self.factors)
            if any(f < 1 for f in factors) or int(np.prod(factors)) != m.shape[0]:
                raise InvalidStateError(
                    f"factors {factors} do not multiply to dim {m.shape[0]}"
                )
            object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class SpectralPrep:
    """Descending eigenvalues and matching eigenvectors of a density matrix.

    All d eigenpairs are kept, zero eigenvalues included, so ensembles live
    on St(n, d) and zero-weight directions drop out automatically.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    rank: int
    sqrt_eigenvalues: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sqrt_eigenvalues", np.sqrt(self.eigenvalues))

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


@dataclass(frozen=True)
class AuxiliaryEnsemble:
    """Unnormalized pure states (rows) with their weights p_i = <ψi|ψi>."""

    states: np.ndarray
    probs: np.ndarray

    @property
    def size(self) -> int:
        return self.states.shape[0]

    @property
    def dim(self) -> int:
        return self.states.shape[1]

    def reconstruct(self) -> np.ndarray:
        """Sum of |ψi><ψi| over the ensemble; equals rho when X†X = I."""
        return self.states.T @ self.states.conj()

    def normalized(self, threshold: float = 1e-15):
        """(probability, normalized state) pairs for reporting.

        Entries with negligible weight are skipped; objectives never use
        normalized states, which would divide by these near-zero weights.
        """
        out = []
        for p, psi in zip(self.probs, self.states):
            if p > threshold:
                out.append((float(p), psi / np.sqrt(p)))
        return out


def spectral_prep(rho: DensityMatrix) -> SpectralPrep:
    """Eigendecomposition of a density matrix, eigenvalues descending."""
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(np.asarray(rho))
    w, v = np.linalg.eigh(rho.matrix)
    w = np.clip(w[::-1], 0.0, None)
    v = v[:, ::-1].copy()
    rank = int(np.sum(w > RANK_TOL))
    # spurious sub-tolerance eigenvalues would be sqrt-amplified into the
    # auxiliary states; their directions stay as columns with zero weight
    w[w <= RANK_TOL] = 0.0
    return SpectralPrep(eigenvalues=w, eigenvectors=v, rank=rank)


def auxiliary_states(prep: SpectralPrep, x: np.ndarray) -> AuxiliaryEnsemble:
    """Ensemble ψi = Σj sqrt(λj) X_ij |λj> for a Stiefel point X on St(n, d)."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[1] != prep.dim:
        raise InvalidInputError(
            f"Stiefel point must be n×{prep.dim}, got {x.shape}"
        )
    states = x @ (prep.sqrt_eigenvalues[:, None] * prep.eigenvectors.T)
    probs = np.einsum("ij,ij->i", states, states.conj()).real
    return AuxiliaryEnsemble(states=states, probs=probs)


def grad_wrt_stiefel(
    prep: SpectralPrep, x: np.ndarray, grad_states: np.ndarray
) -> np.ndarray:
    """Pull per-state cotangents back to the Stiefel matrix entries.

    The map X -> states is linear, so (grad_X)_{ij} = sqrt(λj) <λj|g_i>.
    """
    grad_states = np.asarray(grad_states, dtype=np.complex128)
    x = np.asarray(x, dtype=np.complex128)
    if grad_states.shape != x.shape[:1] + (prep.dim,):
        raise InvalidInputError(
            f"cotangents must be {x.shape[0]}×{prep.dim}, got {grad_states.shape}"
        )
    return (grad_states @ prep.eigenvectors.conj()) * prep.sqrt_eigenvalues[None, :]
