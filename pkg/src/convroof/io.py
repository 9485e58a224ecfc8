"""File formats: states, Hermitian observables, channels, and run records.

Matrices are stored as nested arrays of [re, im] pairs in row-major order,
inside JSON documents.  JSON doubles round-trip losslessly through Python's
float repr, so stored fixtures survive a load/save cycle bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone

import numpy as np

from .catalog import Channel
from .ensemble import DensityMatrix
from .errors import InvalidInputError

__all__ = [
    "matrix_to_pairs",
    "pairs_to_matrix",
    "state_to_dict",
    "state_from_dict",
    "load_state",
    "save_state",
    "load_hermitian",
    "save_hermitian",
    "load_channel",
    "save_channel",
    "RunRecord",
]


def matrix_to_pairs(mat: np.ndarray) -> list:
    mat = np.asarray(mat, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


def pairs_to_matrix(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed matrix entries: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InvalidInputError(
            f"matrix must be nested [re, im] pairs, got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_dict(rho: DensityMatrix) -> dict:
    doc = {"dim": rho.dim, "matrix": matrix_to_pairs(rho.matrix)}
    if rho.factors is not None:
        doc["factors"] = list(rho.factors)
    return doc


def state_from_dict(doc: dict) -> DensityMatrix:
    if "matrix" not in doc:
        raise InvalidInputError("state file is missing the 'matrix' field")
    mat = pairs_to_matrix(doc["matrix"])
    dim = int(doc.get("dim", mat.shape[0]))
    if mat.shape != (dim, dim):
        raise InvalidInputError(
            f"declared dim {dim} does not match matrix shape {mat.shape}"
        )
    factors = doc.get("factors")
    return DensityMatrix(mat, factors=tuple(factors) if factors else None)


def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from None


def load_state(path) -> DensityMatrix:
    return state_from_dict(_load_json(path))


def save_state(rho: DensityMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(rho), fh, indent=1)
        fh.write("\n")


def load_hermitian(path) -> np.ndarray:
    doc = _load_json(path)
    if "matrix" not in doc:
        raise InvalidInputError(f"{path} is missing the 'matrix' field")
    mat = pairs_to_matrix(doc["matrix"])
    if np.linalg.norm(mat - mat.conj().T) > 1e-10 * max(1.0, np.linalg.norm(mat)):
        raise InvalidInputError(f"{path} does not hold a Hermitian matrix")
    return (mat + mat.conj().T) / 2


def save_hermitian(mat: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(
            {"dim": mat.shape[0], "matrix": matrix_to_pairs(mat)}, fh, indent=1
        )
        fh.write("\n")


def load_channel(path) -> Channel:
    doc = _load_json(path)
    if "kraus" not in doc or not doc["kraus"]:
        raise InvalidInputError(f"{path} is missing a non-empty 'kraus' list")
    kraus = tuple(pairs_to_matrix(k) for k in doc["kraus"])
    dim_out, dim_in = kraus[0].shape
    return Channel(
        kraus=kraus,
        dim_in=int(doc.get("dim_in", dim_in)),
        dim_out=int(doc.get("dim_out", dim_out)),
    )


def save_channel(channel: Channel, path) -> None:
    doc = {
        "dim_in": channel.dim_in,
        "dim_out": channel.dim_out,
        "kraus": [matrix_to_pairs(k) for k in channel.kraus],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


@dataclass
class RunRecord:
    """Everything needed to reproduce a solve and what it returned."""

    input: dict
    measure: dict
    config: dict
    result: dict
    version: str
    timestamp: str

    @classmethod
    def create(cls, input_desc, measure_desc, config_desc, result_desc, version):
        return cls(
            input=input_desc,
            measure=measure_desc,
            config=config_desc,
            result=result_desc,
            version=version,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))
