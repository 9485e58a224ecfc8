"""Objective functions for the convex-roof measures.

Every objective maps an auxiliary ensemble to a real value and the gradient
with respect to the unnormalized state entries (Wirtinger convention:
derivative with respect to the conjugated entries; dL = 2 Re Σ g†·dψ).
All formulas are written in unnormalized quantities — the weights p_i and
the unnormalized reduced/output operators — so no state is ever divided by
its own near-zero norm.  Division by p_i, where unavoidable, is clamped at
the smallest positive normal double, and x·ln(x) is truncated below that
threshold so values and gradients stay finite as p_i -> 0.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

from .ensemble import AuxiliaryEnsemble
from .errors import InvalidInputError
from .paulis import apply_pauli_string, pauli_labels

#: Smallest positive normal double; the truncation/clamp threshold.
EPSILON = sys.float_info.min

#: Default log-sum-exp temperature for the smoothed coherence objective.
LSE_TEMPERATURE = 0.3

KINDS = ("eof", "linear-entropy", "coherence", "stabilizer-purity", "qfi", "holevo")

#: Accepted aliases -> canonical kind names.
KIND_ALIASES = {
    "geometric-coherence": "coherence",
    "qfi-variance": "qfi",
}

__all__ = [
    "EPSILON",
    "LSE_TEMPERATURE",
    "KINDS",
    "StabilityConfig",
    "MeasureSpec",
    "xlnx",
    "xlnx_grad",
    "eof_objective",
    "linear_entropy_objective",
    "coherence_objective",
    "coherence_exact_eval",
    "stabilizer_purity_objective",
    "stabilizer_entropy_from_purity",
    "qfi_variance_objective",
    "holevo_objective",
    "make_objective",
    "canonical_kind",
]


@dataclass(frozen=True)
class StabilityConfig:
    """Numerical-stability knobs shared by the objectives."""

    epsilon: float = EPSILON
    lse_temperature: float = LSE_TEMPERATURE

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidInputError("epsilon must be positive")
        if self.lse_temperature <= 0:
            raise InvalidInputError("lse_temperature must be positive")


def canonical_kind(kind: str) -> str:
    kind = KIND_ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise InvalidInputError(f"unknown measure kind {kind!r}")
    return kind


@dataclass(frozen=True)
class MeasureSpec:
    """Which pure-state functional is extended, plus its context.

    ``dims`` is the bipartition (d_A, d_B) for the entanglement kinds,
    ``alpha``/``n_qubits`` configure stabilizer purity, ``hamiltonian`` is
    the observable for the variance/QFI kind, and ``kraus`` lists the
    channel operators for the constrained Holevo capacity.
    """

    kind: str
    dims: tuple[int, int] | None = None
    alpha: float | None = None
    n_qubits: int | None = None
    hamiltonian: np.ndarray | None = None
    kraus: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", canonical_kind(self.kind))
        if self.dims is not None:
            object.__setattr__(self, "dims", (int(self.dims[0]), int(self.dims[1])))
        if self.kraus is not None:
            kraus = tuple(np.asarray(k, dtype=np.complex128) for k in self.kraus)
            object.__setattr__(self, "kraus", kraus)
        if self.hamiltonian is not None:
            h = np.asarray(self.hamiltonian, dtype=np.complex128)
            if h.ndim != 2 or h.shape[0] != h.shape[1]:
                raise InvalidInputError("hamiltonian must be a square matrix")
            if np.linalg.norm(h - h.conj().T) > 1e-10 * max(1.0, np.linalg.norm(h)):
                raise InvalidInputError("hamiltonian must be Hermitian")
            object.__setattr__(self, "hamiltonian", (h + h.conj().T) / 2)

    @property
    def direction(self) -> str:
        # stabilizer purity is maximized over decompositions; everything
        # else is minimized.  The solver always minimizes the raw objective.
        return "maximize" if self.kind == "stabilizer-purity" else "minimize"

    def validate_for_dim(self, d: int) -> None:
        if self.kind in ("eof", "linear-entropy"):
            if self.dims is None:
                raise InvalidInputError(f"{self.kind} needs a bipartition (d_A, d_B)")
            da, db = self.dims
            if da < 1 or db < 1 or da * db != d:
                raise InvalidInputError(
                    f"bipartition {self.dims} does not match dimension {d}"
                )
        elif self.kind == "stabilizer-purity":
            if self.alpha is None or self.alpha < 2:
                raise InvalidInputError(
                    "stabilizer purity needs a Renyi index alpha >= 2 "
                    "(the monotone regime)"
                )
            nq = self.n_qubits if self.n_qubits is not None else _qubit_count(d)
            if 2**nq != d:
                raise InvalidInputError(
                    f"dimension {d} is not 2**{nq}; stabilizer purity needs qubits"
                )
        elif self.kind == "qfi":
            if self.hamiltonian is None:
                raise InvalidInputError("qfi needs a Hermitian observable")
            if self.hamiltonian.shape != (d, d):
                raise InvalidInputError(
                    f"observable has shape {self.hamiltonian.shape}, state dim is {d}"
                )
        elif self.kind == "holevo":
            if not self.kraus:
                raise InvalidInputError("holevo needs a Kraus operator list")
            din = self.kraus[0].shape[1]
            if din != d:
                raise InvalidInputError(
                    f"channel input dimension {din} does not match state dim {d}"
                )
            _check_trace_preserving(self.kraus)


def _qubit_count(d: int) -> int:
    nq = int(round(np.log2(d)))
    if 2**nq != d:
        raise InvalidInputError(f"dimension {d} is not a power of two")
    return nq


def _check_trace_preserving(kraus) -> None:
    din = kraus[0].shape[1]
    acc = np.zeros((din, din), dtype=np.complex128)
    for k in kraus:
        if k.ndim != 2 or k.shape[1] != din:
            raise InvalidInputError("Kraus operators must share one input dimension")
        acc += k.conj().T @ k
    if np.linalg.norm(acc - np.eye(din)) > 1e-10:
        raise InvalidInputError("Kraus set is not trace preserving")


def xlnx(x, epsilon: float = EPSILON):
    """Truncated x·ln(x): exact above ``epsilon``, x·ln(epsilon) below.

    Keeps both the value and the gradient finite as x -> 0+ (plain ln(0)
    would produce inf and then 0·inf = NaN).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidInputError("xlnx needs x >= 0")
    safe = np.where(x > epsilon, x, 1.0)
    out = np.where(x > epsilon, x * np.log(safe), x * np.log(epsilon))
    return out if out.ndim else float(out)


def xlnx_grad(x, epsilon: float = EPSILON):
    """Derivative of the truncated x·ln(x): ln(x)+1 above, ln(epsilon) below."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidInputError("xlnx_grad needs x >= 0")
    safe = np.where(x > epsilon, x, 1.0)
    out = np.where(x > epsilon, np.log(safe) + 1.0, np.log(epsilon))
    return out if out.ndim else float(out)


def _split_bipartite(ens: AuxiliaryEnsemble, dims) -> np.ndarray:
    da, db = int(dims[0]), int(dims[1])
    if da * db != ens.dim:
        raise InvalidInputError(
            f"bipartition {dims} does not match ensemble dimension {ens.dim}"
        )
    return ens.states.reshape(ens.size, da, db)


def _entropy_terms(probs, sigmas, epsilon):
    """Σi [xlnx(p_i) - Σj xlnx(λij)] and the spectral cotangents.

    ``sigmas`` is a stack of unnormalized PSD operators, one per entry.
    Returns the value and the matrix stack U f'(Λ) U† used by the callers'
    chain rules; the trace term's derivative is a spectral function, so it
    needs no eigenvector derivatives even for degenerate spectra.
    """
    w, u = np.linalg.eigh(sigmas)
    w = np.clip(w, 0.0, None)
    value = float(np.sum(xlnx(probs, epsilon)) - np.sum(xlnx(w, epsilon)))
    fprime = xlnx_grad(w, epsilon)
    cot = np.einsum("nij,nj,nkj->nik", u, fprime, u.conj())
    return value, cot


def eof_objective(ens: AuxiliaryEnsemble, dims, epsilon: float = EPSILON):
    """Ensemble average of the reduced-state von Neumann entropy (nats).

    Written as Σi [p_i ln p_i - Tr(ρ̃i ln ρ̃i)] in the unnormalized reduced
    operators ρ̃i = Tr_B |ψi><ψi|.
    """
    mats = _split_bipartite(ens, dims)
    rhos = mats @ mats.conj().transpose(0, 2, 1)
    value, cot = _entropy_terms(ens.probs, rhos, epsilon)
    grad = xlnx_grad(ens.probs, epsilon)[:, None] * ens.states
    grad = grad - np.einsum("nab,nbk->nak", cot, mats).reshape(ens.size, ens.dim)
    return value, grad


def linear_entropy_objective(ens: AuxiliaryEnsemble, dims, epsilon: float = EPSILON):
    """1 - Σi Tr(ρ̃i²)/p_i with the denominator clamped at epsilon."""
    mats = _split_bipartite(ens, dims)
    rhos = mats @ mats.conj().transpose(0, 2, 1)
    tr2 = np.einsum("nab,nba->n", rhos, rhos).real
    clamped = ens.probs < epsilon
    denom = np.where(clamped, epsilon, ens.probs)
    value = float(1.0 - np.sum(tr2 / denom))
    grad = -2.0 / denom[:, None] * np.einsum(
        "nab,nbk->nak", rhos, mats
    ).reshape(ens.size, ens.dim)
    # the p-dependence of the denominator only flows where it is not clamped
    grad += np.where(clamped, 0.0, tr2 / denom**2)[:, None] * ens.states
    return value, grad


def coherence_objective(ens: AuxiliaryEnsemble, cfg: StabilityConfig | None = None):
    """Smoothed geometric-coherence objective 1 - Σi LSE_T(diag ρ̃i).

    The per-entry max over reference-basis populations is replaced by
    T·log Σj exp(x_j/T) so the gradient stays continuous across ties.
    """
    cfg = cfg or StabilityConfig()
    t = cfg.lse_temperature
    x = np.abs(ens.states) ** 2
    m = x.max(axis=1, keepdims=True)
    e = np.exp((x - m) / t)
    z = e.sum(axis=1, keepdims=True)
    lse = m + t * np.log(z)
    value = float(1.0 - lse.sum())
    weights = e / z
    grad = -weights * ens.states
    return value, grad


def coherence_exact_eval(ens: AuxiliaryEnsemble) -> float:
    """Exact reported value 1 - Σi max_j ρ̃i,jj (ties: lowest index)."""
    x = np.abs(ens.states) ** 2
    return float(1.0 - x.max(axis=1).sum())


def stabilizer_purity_objective(
    ens: AuxiliaryEnsemble,
    alpha: float,
    n_qubits: int | None = None,
    epsilon: float = EPSILON,
):
    """Negated ensemble stabilizer purity -2^{-n} Σi p_i^{1-2α} Σ_P <P>^{2α}.

    The sign makes this a minimization objective; -value is the ensemble
    purity Σi p_i P_α(ψi).  Denominators p_i^{2α-1} below epsilon are
    clamped to epsilon.
    """
    if alpha < 2:
        raise InvalidInputError("stabilizer purity needs alpha >= 2")
    nq = n_qubits if n_qubits is not None else _qubit_count(ens.dim)
    if 2**nq != ens.dim:
        raise InvalidInputError(f"ensemble dimension {ens.dim} is not 2**{nq}")
    labels = pauli_labels(nq)
    scale = 2.0**-nq
    # pass 1: all expectations m[i, P] = <ψi|P|ψi> (real for Hermitian P)
    small = 4**nq * ens.size * ens.dim <= 1_000_000
    applied = []
    m = np.empty((ens.size, len(labels)))
    for j, label in enumerate(labels):
        pv = apply_pauli_string(label, ens.states)
        if small:
            applied.append(pv)
        m[:, j] = np.einsum("ik,ik->i", ens.states.conj(), pv).real
    msq = m * m
    s_p = (msq**alpha).sum(axis=1)
    powers = ens.probs ** (2.0 * alpha - 1.0)
    clamped = powers < epsilon
    denom = np.where(clamped, epsilon, powers)
    value = float(-scale * np.sum(s_p / denom))
    # pass 2: Σ_P m^{2α-1} P ψ, reusing the applied strings when cached
    acc = np.zeros_like(ens.states)
    weights = m * msq ** (alpha - 1.0)  # sign-correct m^{2α-1}
    for j, label in enumerate(labels):
        pv = applied[j] if small else apply_pauli_string(label, ens.states)
        acc += weights[:, j : j + 1] * pv
    grad = -scale * 2.0 * alpha / denom[:, None] * acc
    with np.errstate(divide="ignore"):
        term2 = np.where(
            clamped, 0.0, scale * s_p * (2.0 * alpha - 1.0) / (denom * ens.probs)
        )
    grad += term2[:, None] * ens.states
    return value, grad


def stabilizer_entropy_from_purity(p_alpha: float, alpha: float):
    """(M_α, M_α^lin) from a stabilizer purity value."""
    if not 0.0 < p_alpha <= 1.0 + 1e-10:
        raise InvalidInputError(f"purity {p_alpha} outside (0, 1]")
    p_alpha = min(p_alpha, 1.0)
    m_alpha = float(np.log(p_alpha) / (1.0 - alpha))
    return m_alpha, float(1.0 - p_alpha)


def qfi_variance_objective(
    ens: AuxiliaryEnsemble, hamiltonian: np.ndarray, epsilon: float = EPSILON
):
    """Σi [<ψi|H²|ψi> - <ψi|H|ψi>²/p_i], the convex-roof variance sum.

    The solver multiplies the minimized value by 4 to report the quantum
    Fisher information.
    """
    h = np.asarray(hamiltonian, dtype=np.complex128)
    if h.shape != (ens.dim, ens.dim):
        raise InvalidInputError(
            f"observable has shape {h.shape}, ensemble dimension is {ens.dim}"
        )
    hv = ens.states @ h.T
    h2v = hv @ h.T
    e2 = np.einsum("ik,ik->i", ens.states.conj(), h2v).real
    e1 = np.einsum("ik,ik->i", ens.states.conj(), hv).real
    clamped = ens.probs < epsilon
    denom = np.where(clamped, epsilon, ens.probs)
    value = float(np.sum(e2 - e1**2 / denom))
    grad = h2v - (2.0 * e1 / denom)[:, None] * hv
    grad += np.where(clamped, 0.0, e1**2 / denom**2)[:, None] * ens.states
    return value, grad


def holevo_objective(ens: AuxiliaryEnsemble, kraus, epsilon: float = EPSILON):
    """Σi p_i S(N(|ψi><ψi|)) written stably in unnormalized channel outputs.

    Identical in structure to the entanglement-of-formation objective with
    the channel replacing the partial trace (which is itself a channel):
    Σi [p_i ln p_i - Tr(σ̃i ln σ̃i)] with σ̃i = N(|ψi><ψi|).
    """
    kraus = [np.asarray(k, dtype=np.complex128) for k in kraus]
    _check_trace_preserving(kraus)
    if kraus[0].shape[1] != ens.dim:
        raise InvalidInputError(
            f"channel input dimension {kraus[0].shape[1]} != ensemble dim {ens.dim}"
        )
    kstack = np.stack(kraus)
    vs = np.einsum("kab,ib->ika", kstack, ens.states)
    sigmas = np.einsum("ika,ikb->iab", vs, vs.conj())
    value, cot = _entropy_terms(ens.probs, sigmas, epsilon)
    grad = xlnx_grad(ens.probs, epsilon)[:, None] * ens.states
    wv = np.einsum("iab,ikb->ika", cot, vs)
    grad -= np.einsum("kac,ika->ic", kstack.conj(), wv)
    return value, grad


def make_objective(spec: MeasureSpec, d: int, cfg: StabilityConfig | None = None):
    """Callable ens -> (value, grad_states) for the given measure kind.

    Per-kind context (Pauli strings, H², Kraus stack) is resolved once so
    repeated evaluation inside the optimizer stays cheap.
    """
    cfg = cfg or StabilityConfig()
    spec.validate_for_dim(d)
    kind = spec.kind
    if kind == "eof":
        dims = spec.dims
        return lambda ens: eof_objective(ens, dims, cfg.epsilon)
    if kind == "linear-entropy":
        dims = spec.dims
        return lambda ens: linear_entropy_objective(ens, dims, cfg.epsilon)
    if kind == "coherence":
        return lambda ens: coherence_objective(ens, cfg)
    if kind == "stabilizer-purity":
        alpha = float(spec.alpha)
        nq = spec.n_qubits if spec.n_qubits is not None else _qubit_count(d)
        return lambda ens: stabilizer_purity_objective(ens, alpha, nq, cfg.epsilon)
    if kind == "qfi":
        h = spec.hamiltonian
        return lambda ens: qfi_variance_objective(ens, h, cfg.epsilon)
    if kind == "holevo":
        kraus = spec.kraus
        return lambda ens: holevo_objective(ens, kraus, cfg.epsilon)
    raise InvalidInputError(f"unknown measure kind {kind!r}")
