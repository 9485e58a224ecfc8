"""Pauli-string enumeration and matrix-free application to state vectors."""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .errors import InvalidInputError

__all__ = ["pauli_labels", "apply_pauli_string", "pauli_matrix"]

_SINGLE = {
    "I": np.eye(2, dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
}


@lru_cache(maxsize=None)
def pauli_labels(n_qubits: int) -> tuple[str, ...]:
    """All 4^n Pauli strings in lexicographic I < X < Y < Z order."""
    if n_qubits < 1:
        raise InvalidInputError(f"n_qubits must be >= 1, got {n_qubits}")
    return tuple("".join(p) for p in product("IXYZ", repeat=n_qubits))


def pauli_matrix(label: str) -> np.ndarray:
    """Dense matrix of one Pauli string."""
    out = _SINGLE[label[0]]
    for ch in label[1:]:
        out = np.kron(out, _SINGLE[ch])
    return out


def apply_pauli_string(label: str, vecs: np.ndarray) -> np.ndarray:
    """Apply a Pauli string to a batch of state vectors, matrix-free.

    ``vecs`` has shape (batch, 2**n); each qubit factor is applied along
    its own tensor axis, so no 2**n × 2**n matrix is ever formed.
    """
    nq = len(label)
    batch = vecs.shape[0]
    out = vecs.reshape((batch,) + (2,) * nq).copy()
    for q, ch in enumerate(label):
        if ch == "I":
            continue
        axis = q + 1
        if ch == "X":
            out = np.flip(out, axis=axis)
        elif ch == "Z":
            idx = [slice(None)] * out.ndim
            idx[axis] = 1
            out[tuple(idx)] *= -1.0
        else:  # Y
            out = np.flip(out, axis=axis)
            lo = [slice(None)] * out.ndim
            hi = [slice(None)] * out.ndim
            lo[axis], hi[axis] = 0, 1
            out[tuple(lo)] *= -1j
            out[tuple(hi)] *= 1j
    return np.ascontiguousarray(out.reshape(batch, -1))
