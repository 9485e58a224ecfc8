"""Multi-start quasi-Newton minimization over trivialized Stiefel parameters."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .ensemble import (
    AuxiliaryEnsemble,
    DensityMatrix,
    auxiliary_states,
    grad_wrt_stiefel,
    spectral_prep,
)
from .errors import InvalidInputError, RankDeficiencyError, SolverFailureError
from .manifold import get_trivialization
from .measures import (
    EPSILON,
    LSE_TEMPERATURE,
    MeasureSpec,
    StabilityConfig,
    coherence_exact_eval,
    make_objective,
    stabilizer_entropy_from_purity,
    xlnx,
)

# Fresh random draws allowed when a restart hits a rank-deficient polar point
# (a measure-zero event; re-initialization is the prescribed remedy).
_MAX_REINIT = 5
# Warm-restart cycles guarding against premature single-step stalls.
_MAX_POLISH = 6

__all__ = ["SolverConfig", "SolveResult", "RestartTrace", "LbfgsResult",
           "lbfgs_minimize", "solve"]


@dataclass(frozen=True)
class SolverConfig:
    """Hyperparameters of the multi-start optimization.

    ``ensemble_size=None`` resolves to 2d once the state dimension is
    known.  Sizes start at d (all eigenvector columns are kept); the
    Caratheodory bound d² already suffices for an optimal decomposition,
    but larger ensembles are allowed — the extra slots smooth multi-modal
    landscapes (notably stabilizer purity) at moderate cost.
    """

    ensemble_size: int | None = None
    restarts: int = 3
    tol: float = 1e-14
    max_iterations: int = 1000
    memory: int = 10
    trivialization: str = "polar"
    seed: int = 0
    lse_temperature: float = LSE_TEMPERATURE
    epsilon: float = EPSILON
    debug_checks: bool = False

    def __post_init__(self):
        if self.tol <= 0:
            raise InvalidInputError("tol must be positive")
        if self.restarts < 1:
            raise InvalidInputError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")

    def resolve_n(self, d: int) -> int:
        n = 2 * d if self.ensemble_size is None else int(self.ensemble_size)
        if n < d:
            raise InvalidInputError(
                f"ensemble size {n} < dimension {d}; St(n, d) needs n >= d"
            )
        return n

    def stability(self) -> StabilityConfig:
        return StabilityConfig(
            epsilon=self.epsilon, lse_temperature=self.lse_temperature
        )


@dataclass(frozen=True)
class LbfgsResult:
    x: np.ndarray
    value: float
    iterations: int
    grad_norm: float
    converged: bool
    message: str


@dataclass(frozen=True)
class RestartTrace:
    value: float
    raw_objective: float
    iterations: int
    grad_norm: float
    converged: bool


@dataclass(frozen=True)
class SolveResult:
    """Best restart's reported value, ensemble and diagnostics."""

    value: float
    raw_objective: float
    ensemble: AuxiliaryEnsemble
    converged: bool
    iterations: tuple[int, ...]
    best_restart: int
    gradient_norm: float
    wall_time: float
    restarts: tuple[RestartTrace, ...]
    derived: dict = field(default_factory=dict)


def lbfgs_minimize(f_and_grad, x0: np.ndarray, config: SolverConfig) -> LbfgsResult:
    """Limited-memory BFGS with strong-Wolfe line search (SciPy L-BFGS-B).

    Terminates on the relative objective decrease falling below ``tol``,
    on the gradient max-norm falling below ``tol``, or at
    ``max_iterations``.  Because a single stalled line-search step can
    trip the per-step decrease test while descent directions remain, the
    run is polished by warm restarts until one full restart cycle gains
    less than tol·max(1, |f|).  A line-search failure returns the best
    point seen with converged=False.
    """
    x0 = np.asarray(x0, dtype=float)
    f_prev, g0 = f_and_grad(x0)
    if not np.isfinite(f_prev) or not np.all(np.isfinite(g0)):
        raise InvalidInputError("objective is not finite at the initial point")
    x = x0
    total_nit = 0
    converged = False
    res = None
    for _ in range(_MAX_POLISH):
        res = minimize(
            f_and_grad,
            x,
            jac=True,
            method="L-BFGS-B",
            options={
                "maxiter": config.max_iterations - total_nit,
                "maxcor": config.memory,
                "ftol": config.tol,
                "gtol": config.tol,
            },
        )
        x = np.asarray(res.x, dtype=float)
        total_nit += int(res.nit)
        if abs(f_prev - res.fun) <= config.tol * max(1.0, abs(res.fun)):
            converged = True
            break
        f_prev = float(res.fun)
        if total_nit >= config.max_iterations:
            break
    grad_norm = float(np.max(np.abs(res.jac))) if res.jac is not None else np.inf
    return LbfgsResult(
        x=x,
        value=float(res.fun),
        iterations=total_nit,
        grad_norm=grad_norm,
        converged=converged,
        message=str(res.message),
    )


def _entropy_of(matrix: np.ndarray, epsilon: float) -> float:
    w = np.clip(np.linalg.eigvalsh(matrix), 0.0, None)
    return float(-np.sum(xlnx(w, epsilon)))


def _report(kind, raw, ens, spec, config):
    """Post-transform the raw minimum into the reported measure value."""
    derived = {}
    if kind == "coherence":
        value = coherence_exact_eval(ens)
        derived["smoothed_objective"] = raw
    elif kind == "stabilizer-purity":
        purity = -raw
        m_alpha, m_lin = stabilizer_entropy_from_purity(purity, spec.alpha)
        value = m_lin
        derived["stabilizer_purity"] = purity
        derived["renyi_stabilizer_entropy"] = m_alpha
    elif kind == "qfi":
        value = 4.0 * raw
    elif kind == "holevo":
        out = np.zeros_like(spec.kraus[0] @ spec.kraus[0].conj().T)
        rho = ens.reconstruct()
        for k in spec.kraus:
            out = out + k @ rho @ k.conj().T
        s_out = _entropy_of(out, config.epsilon)
        value = s_out - raw
        derived["output_entropy"] = s_out
    else:
        value = raw
    return float(value), derived


def _better(kind: str, a: float, b: float) -> bool:
    """True when reported value ``a`` beats ``b`` for this measure kind."""
    return a > b if kind == "holevo" else a < b


def solve(
    rho: DensityMatrix, spec: MeasureSpec, config: SolverConfig | None = None
) -> SolveResult:
    """Convex-roof value of a measure for a density matrix.

    Runs ``restarts`` independent L-BFGS descents from seeded random
    initializations (seeds seed, seed+1, ...), each over the raw real
    parameters of the configured trivialization, and keeps the restart
    whose post-transformed reported value is best.
    """
    t_start = time.perf_counter()
    config = config or SolverConfig()
    if not isinstance(rho, DensityMatrix):
        rho = DensityMatrix(np.asarray(rho))
    d = rho.dim
    if spec.kind in ("eof", "linear-entropy") and spec.dims is None and rho.factors:
        if len(rho.factors) != 2:
            raise InvalidInputError(
                f"state has {len(rho.factors)} factors; a bipartition is needed"
            )
        spec = MeasureSpec(kind=spec.kind, dims=rho.factors)
    spec.validate_for_dim(d)
    n = config.resolve_n(d)
    prep = spectral_prep(rho)
    objective = make_objective(spec, d, config.stability())
    triv = get_trivialization(config.trivialization, n, d)

    def f_and_grad(params):
        x, ctx = triv.forward(params)
        ens = auxiliary_states(prep, x)
        if config.debug_checks:
            resid = np.linalg.norm(ens.reconstruct() - rho.matrix)
            assert resid <= 1e-10, f"ensemble reconstruction residual {resid:.3e}"
        value, grad_states = objective(ens)
        grad_x = grad_wrt_stiefel(prep, x, grad_states)
        return value, triv.pullback(ctx, grad_x)

    traces = []
    ensembles = []
    failures = []
    for k in range(config.restarts):
        rng = np.random.default_rng(config.seed + k)
        result = None
        for _ in range(_MAX_REINIT):
            try:
                result = lbfgs_minimize(f_and_grad, triv.initial_params(rng), config)
                break
            except RankDeficiencyError as exc:  # measure-zero; redraw
                failures.append(str(exc))
        if result is None:
            continue
        x_opt, _ = triv.forward(result.x)
        ens = auxiliary_states(prep, x_opt)
        value, derived = _report(spec.kind, result.value, ens, spec, config)
        traces.append(
            (
                RestartTrace(
                    value=value,
                    raw_objective=result.value,
                    iterations=result.iterations,
                    grad_norm=result.grad_norm,
                    converged=result.converged,
                ),
                derived,
            )
        )
        ensembles.append(ens)
    if not traces:
        raise SolverFailureError(
            "all restarts failed: " + "; ".join(failures or ["no diagnostics"])
        )

    best = 0
    for k in range(1, len(traces)):
        if _better(spec.kind, traces[k][0].value, traces[best][0].value):
            best = k
    best_trace, derived = traces[best]
    return SolveResult(
        value=best_trace.value,
        raw_objective=best_trace.raw_objective,
        ensemble=ensembles[best],
        converged=best_trace.converged,
        iterations=tuple(t.iterations for t, _ in traces),
        best_restart=best,
        gradient_norm=best_trace.grad_norm,
        wall_time=time.perf_counter() - t_start,
        restarts=tuple(t for t, _ in traces),
        derived=derived,
    )
