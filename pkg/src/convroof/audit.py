"""Finite-difference gradient audits and oracle-comparison suites.

These drive both the ``gradcheck`` / ``oracle-compare`` CLI commands and
the acceptance tests, so solver and oracles are exercised through exactly
one code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import catalog
from .ensemble import auxiliary_states, grad_wrt_stiefel, spectral_prep
from .errors import InvalidInputError
from .manifold import get_trivialization
from .measures import MeasureSpec, StabilityConfig, make_objective
from .solver import SolverConfig, solve

GRAD_TOL = 1e-5
FD_STEP = 1e-6
UPPER_BOUND_SLACK = 1e-9

SUITES = ("eof-2qubit", "qfi", "coherence", "magic-octahedron")

#: Maximum tolerated |solver - oracle| per suite.
SUITE_DEVIATION_TOL = {
    "eof-2qubit": 1e-6,
    "qfi": 1e-6,
    "coherence": 1e-8,
    "magic-octahedron": 1e-9,
}

__all__ = [
    "GRAD_TOL",
    "FD_STEP",
    "SUITES",
    "SUITE_DEVIATION_TOL",
    "gradcheck_spec",
    "gradcheck",
    "OracleComparison",
    "run_suite",
]


def gradcheck_spec(kind: str, d: int, seed: int) -> tuple[MeasureSpec, int]:
    """A measure spec plus state seed suitable for auditing ``kind`` at dim d."""
    if kind in ("eof", "linear-entropy"):
        if d < 4 or d % 2:
            raise InvalidInputError(f"{kind} gradcheck needs an even dimension >= 4")
        return MeasureSpec(kind=kind, dims=(2, d // 2)), seed
    if kind == "coherence":
        return MeasureSpec(kind=kind), seed
    if kind == "stabilizer-purity":
        nq = int(round(np.log2(d)))
        if 2**nq != d:
            raise InvalidInputError("stabilizer gradcheck needs a power-of-two dim")
        return MeasureSpec(kind=kind, alpha=2.0, n_qubits=nq), seed
    if kind == "qfi":
        return MeasureSpec(kind=kind, hamiltonian=catalog.random_hermitian(d, seed + 77)), seed
    if kind == "holevo":
        return MeasureSpec(kind=kind, kraus=catalog.depolarizing_channel(d, 0.4).kraus), seed
    raise InvalidInputError(f"unknown measure kind {kind!r}")


def gradcheck(
    kind: str,
    d: int,
    trivialization: str = "polar",
    seed: int = 0,
    points: int = 20,
    step: float = FD_STEP,
) -> np.ndarray:
    """Relative errors between analytic and central-FD gradients.

    Evaluates the full chain objective(ensemble(trivialize(params))) at
    ``points`` random parameter vectors and differentiates it both ways.
    """
    spec, state_seed = gradcheck_spec(kind, d, seed)
    rho = catalog.haar_random_state(
        spec.dims if spec.dims else (d,), rank=d, seed=state_seed
    )
    prep = spectral_prep(rho)
    n = 2 * d
    triv = get_trivialization(trivialization, n, d)
    objective = make_objective(spec, d, StabilityConfig())

    def value_only(params):
        x, _ = triv.forward(params)
        return objective(auxiliary_states(prep, x))[0]

    def value_and_grad(params):
        x, ctx = triv.forward(params)
        ens = auxiliary_states(prep, x)
        value, grad_states = objective(ens)
        return value, triv.pullback(ctx, grad_wrt_stiefel(prep, x, grad_states))

    rng = np.random.default_rng(seed)
    errors = np.empty(points)
    for i in range(points):
        params = triv.initial_params(rng)
        _, analytic = value_and_grad(params)
        fd = np.empty_like(analytic)
        for j in range(params.size):
            up = params.copy()
            dn = params.copy()
            up[j] += step
            dn[j] -= step
            fd[j] = (value_only(up) - value_only(dn)) / (2.0 * step)
        errors[i] = np.linalg.norm(analytic - fd) / max(1.0, np.linalg.norm(fd))
    return errors


@dataclass(frozen=True)
class OracleComparison:
    """Per-suite summary of solver-vs-oracle deviations."""

    suite: str
    trials: int
    max_abs_deviation: float
    mean_abs_deviation: float
    upper_bound_violations: int
    deviations: tuple[float, ...]

    @property
    def passed(self) -> bool:
        return (
            self.upper_bound_violations == 0
            and self.max_abs_deviation <= SUITE_DEVIATION_TOL[self.suite]
        )


def _summarize(suite, solved, oracle) -> OracleComparison:
    solved = np.asarray(solved, dtype=float)
    oracle = np.asarray(oracle, dtype=float)
    dev = solved - oracle
    return OracleComparison(
        suite=suite,
        trials=solved.size,
        max_abs_deviation=float(np.max(np.abs(dev))),
        mean_abs_deviation=float(np.mean(np.abs(dev))),
        upper_bound_violations=int(np.sum(dev < -UPPER_BOUND_SLACK)),
        deviations=tuple(float(x) for x in dev),
    )


def run_suite(suite: str, trials: int, seed: int = 0) -> OracleComparison:
    """Solve a batch of oracle-known instances and compare."""
    if suite == "eof-2qubit":
        spec = MeasureSpec(kind="eof", dims=(2, 2))
        config = SolverConfig(seed=seed)
        solved, oracle = [], []
        for t in range(trials):
            rho = catalog.haar_random_state((2, 2), rank=1 + t % 4, seed=seed + 1000 + t)
            solved.append(solve(rho, spec, config).value)
            oracle.append(catalog.wootters_eof_oracle(rho))
        return _summarize(suite, solved, oracle)
    if suite == "qfi":
        config = SolverConfig(seed=seed)
        solved, oracle = [], []
        for t in range(trials):
            d = 2 if t % 2 == 0 else 3
            rho = catalog.haar_random_state((d,), rank=1 + t % d, seed=seed + 2000 + t)
            h = catalog.random_hermitian(d, seed + 3000 + t)
            spec = MeasureSpec(kind="qfi", hamiltonian=h)
            solved.append(solve(rho, spec, config).value)
            oracle.append(catalog.qfi_sld_oracle(rho, h))
        return _summarize(suite, solved, oracle)
    if suite == "coherence":
        spec = MeasureSpec(kind="coherence")
        config = SolverConfig(seed=seed)
        rng = np.random.default_rng(seed)
        dims = (2, 4, 8, 16)
        solved, oracle = [], []
        for t in range(trials):
            d = dims[t % len(dims)]
            p = float(rng.uniform(0.0, 1.0))
            rho = catalog.noisy_coherent(d, p)
            solved.append(solve(rho, spec, config).value)
            oracle.append(catalog.coherence_analytic(d, p))
        return _summarize(suite, solved, oracle)
    if suite == "magic-octahedron":
        spec = MeasureSpec(kind="stabilizer-purity", alpha=2.0, n_qubits=1)
        # the qubit magic landscape is multi-modal at n = 2d; a larger
        # ensemble plus extra restarts makes the global basin dominant
        config = SolverConfig(seed=seed, ensemble_size=8, restarts=12)
        rng = np.random.default_rng(seed)
        points = [
            (1.0, 0.0, 0.0), (-1.0, 0.0, 0.0),
            (0.0, 1.0, 0.0), (0.0, -1.0, 0.0),
            (0.0, 0.0, 1.0), (0.0, 0.0, -1.0),
        ]
        while len(points) < 6 + trials:
            v = rng.uniform(-1.0, 1.0, size=3)
            if np.sum(np.abs(v)) <= 1.0:
                points.append(tuple(v))
        solved = [
            solve(catalog.bloch_qubit(*pt), spec, config).value for pt in points
        ]
        return _summarize(suite, solved, np.zeros(len(points)))
    raise InvalidInputError(f"unknown suite {suite!r}; options: {SUITES}")
