"""Benchmark state families, channels, and closed-form oracles.

The oracles here (Wootters entanglement of formation, SLD quantum Fisher
information, the noisy-coherent-state coherence formula, PPT separability
on families where it is exact) are deliberately independent of the solver
so they can certify it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensemble import DensityMatrix
from .errors import InvalidInputError, InvalidStateError
from .paulis import pauli_labels, pauli_matrix

__all__ = [
    "PauliSet",
    "Channel",
    "werner",
    "noisy_coherent",
    "coherence_analytic",
    "bloch_qubit",
    "haar_random_state",
    "random_hermitian",
    "pauli_group",
    "wootters_eof_oracle",
    "qfi_sld_oracle",
    "partial_transpose",
    "ppt_check",
    "depolarizing_channel",
    "identity_channel",
]


@dataclass(frozen=True)
class PauliSet:
    """All 4^n Pauli strings for n qubits, identity included."""

    n_qubits: int
    labels: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.labels)

    def matrix(self, index: int) -> np.ndarray:
        return pauli_matrix(self.labels[index])

    def matrices(self) -> list[np.ndarray]:
        return [pauli_matrix(label) for label in self.labels]


@dataclass(frozen=True)
class Channel:
    """Kraus representation of a completely positive trace-preserving map."""

    kraus: tuple[np.ndarray, ...]
    dim_in: int
    dim_out: int

    def __post_init__(self):
        kraus = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus)
        acc = np.zeros((self.dim_in, self.dim_in), dtype=np.complex128)
        for k in kraus:
            if k.shape != (self.dim_out, self.dim_in):
                raise InvalidInputError(
                    f"Kraus operator shape {k.shape} != ({self.dim_out}, {self.dim_in})"
                )
            acc += k.conj().T @ k
        if np.linalg.norm(acc - np.eye(self.dim_in)) > 1e-10:
            raise InvalidInputError("Kraus set is not trace preserving")
        object.__setattr__(self, "kraus", kraus)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        out = np.zeros((self.dim_out, self.dim_out), dtype=np.complex128)
        for k in self.kraus:
            out += k @ rho @ k.conj().T
        return out


def swap_operator(d: int) -> np.ndarray:
    """The swap F on a d⊗d space: F(|i>|j>) = |j>|i>."""
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def werner(d: int, alpha: float) -> DensityMatrix:
    """Werner state (I - αF)/(d² - dα) on a d⊗d space."""
    if d < 2:
        raise InvalidInputError(f"Werner states need local dimension >= 2, got {d}")
    f = swap_operator(d)
    mat = (np.eye(d * d) - alpha * f) / (d * d - d * alpha)
    return DensityMatrix(mat, factors=(d, d))


def werner_separable_alpha_max(d: int) -> float:
    """Exact separability boundary of the Werner family: α <= 1/d."""
    return 1.0 / d


def maximally_coherent_state(d: int) -> np.ndarray:
    return np.full(d, 1.0 / np.sqrt(d), dtype=np.complex128)


def noisy_coherent(d: int, p: float) -> DensityMatrix:
    """p|ψ+><ψ+| + (1-p) I/d with the maximally coherent |ψ+>."""
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"purity parameter p={p} outside [0, 1]")
    psi = maximally_coherent_state(d)
    mat = p * np.outer(psi, psi.conj()) + (1.0 - p) * np.eye(d) / d
    return DensityMatrix(mat)


def coherence_analytic(d: int, p: float) -> float:
    """Closed-form geometric coherence of the noisy coherent state."""
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"purity parameter p={p} outside [0, 1]")
    root = (d - 1) * np.sqrt(1.0 - p) + np.sqrt(1.0 + (d - 1) * p)
    return float(1.0 - root**2 / d**2)


def bloch_qubit(x: float, y: float, z: float) -> DensityMatrix:
    """Qubit state (I + xX + yY + zZ)/2 for a Bloch vector inside the ball."""
    if x * x + y * y + z * z > 1.0 + 1e-12:
        raise InvalidStateError(f"Bloch vector ({x}, {y}, {z}) outside the unit ball")
    mat = 0.5 * np.array(
        [[1.0 + z, x - 1j * y], [x + 1j * y, 1.0 - z]], dtype=np.complex128
    )
    return DensityMatrix(mat)


def octahedron_member(x: float, y: float, z: float, tol: float = 0.0) -> bool:
    """Whether a Bloch vector lies in the stabilizer octahedron |x|+|y|+|z| <= 1."""
    return abs(x) + abs(y) + abs(z) <= 1.0 + tol


def haar_random_state(dims, rank: int, seed: int) -> DensityMatrix:
    """Normalized W W† for a d×rank complex Gaussian W; deterministic in seed."""
    dims = tuple(int(x) for x in dims)
    d = int(np.prod(dims))
    if not 1 <= rank <= d:
        raise InvalidInputError(f"rank {rank} out of range for dimension {d}")
    rng = np.random.default_rng(seed)
    w = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = w @ w.conj().T
    mat /= np.trace(mat).real
    return DensityMatrix(mat, factors=dims if len(dims) > 1 else None)


def random_hermitian(d: int, seed: int) -> np.ndarray:
    """Random Hermitian observable with Gaussian entries; deterministic in seed."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + a.conj().T) / 2


def pauli_group(n_qubits: int) -> PauliSet:
    """The 4^n Pauli strings, identity first (lexicographic order)."""
    return PauliSet(n_qubits=n_qubits, labels=pauli_labels(n_qubits))


def wootters_eof_oracle(rho: DensityMatrix) -> float:
    """Closed-form two-qubit entanglement of formation, in nats.

    Concurrence from the spin-flipped spectrum, then the binary entropy of
    (1 + sqrt(1 - C²))/2 evaluated with the natural logarithm.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if mat.shape != (4, 4):
        raise InvalidInputError("Wootters formula needs a two-qubit state")
    yy = np.kron(pauli_matrix("Y"), pauli_matrix("Y"))
    rho_tilde = yy @ mat.conj() @ yy
    evals = np.linalg.eigvals(mat @ rho_tilde)
    s = np.sqrt(np.clip(evals.real, 0.0, None))
    s.sort()
    c = max(0.0, s[-1] - s[-2] - s[-3] - s[-4])
    if c <= 0.0:
        return 0.0
    x = (1.0 + np.sqrt(1.0 - c * c)) / 2.0
    if x >= 1.0:
        return float(np.log(2.0))  # C = 1
    return float(-x * np.log(x) - (1.0 - x) * np.log(1.0 - x))


def qfi_sld_oracle(rho: DensityMatrix, hamiltonian: np.ndarray) -> float:
    """Quantum Fisher information via the symmetric logarithmic derivative.

    F = 2 Σ_{k,l} (λk - λl)² / (λk + λl) |<k|H|l>|² over pairs with
    λk + λl above a numerical floor.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    h = np.asarray(hamiltonian, dtype=np.complex128)
    if h.shape != mat.shape:
        raise InvalidInputError("observable and state dimensions differ")
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    hmat = v.conj().T @ h @ v
    lsum = w[:, None] + w[None, :]
    ldiff = w[:, None] - w[None, :]
    mask = lsum > 1e-12
    ratio = np.where(mask, ldiff**2 / np.where(mask, lsum, 1.0), 0.0)
    return float(2.0 * np.sum(ratio * np.abs(hmat) ** 2))


def partial_transpose(mat: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    """Transpose the second tensor factor of a bipartite operator."""
    da, db = int(dims[0]), int(dims[1])
    if mat.shape != (da * db, da * db):
        raise InvalidInputError(f"dims {dims} incompatible with shape {mat.shape}")
    r = mat.reshape(da, db, da, db)
    return r.transpose(0, 3, 2, 1).reshape(da * db, da * db)


def ppt_check(rho: DensityMatrix, dims: tuple[int, int] | None = None) -> bool:
    """Positivity of the partial transpose (min eigenvalue >= -1e-10).

    An exact separability criterion only on 2⊗2, 2⊗3 and for the
    swap-symmetric Werner family; elsewhere NPT merely implies entangled.
    """
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if dims is None:
        if not (isinstance(rho, DensityMatrix) and rho.factors and len(rho.factors) == 2):
            raise InvalidInputError("ppt_check needs a bipartition")
        dims = rho.factors
    pt = partial_transpose(mat, dims)
    return bool(np.linalg.eigvalsh(pt)[0] >= -1e-10)


def _weyl_operators(d: int) -> list[np.ndarray]:
    """The d² Heisenberg-Weyl unitaries X^a Z^b (identity included)."""
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    ops = []
    xa = np.eye(d, dtype=np.complex128)
    for _ in range(d):
        zb = np.eye(d, dtype=np.complex128)
        for _ in range(d):
            ops.append(xa @ zb)
            zb = zb @ clock
        xa = xa @ shift
    return ops


def identity_channel(d: int) -> Channel:
    return Channel(kraus=(np.eye(d, dtype=np.complex128),), dim_in=d, dim_out=d)


def depolarizing_channel(d: int, lam: float) -> Channel:
    """N(ρ) = (1-λ)ρ + λ I/d via a Weyl-operator Kraus set."""
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"depolarizing strength {lam} outside [0, 1]")
    ops = _weyl_operators(d)
    kraus = [np.sqrt(1.0 - lam + lam / d**2) * np.eye(d, dtype=np.complex128)]
    coeff = np.sqrt(lam) / d
    kraus.extend(coeff * w for w in ops[1:])
    return Channel(kraus=tuple(kraus), dim_in=d, dim_out=d)
