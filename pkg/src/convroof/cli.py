"""Command-line front end.

Subcommands: ``solve`` (one state, one measure, JSON run record), ``sweep``
(parameter grids written as delimited tables plus a rendered figure),
``gradcheck`` (finite-difference audit of the adjoint chain) and
``oracle-compare`` (solver vs closed-form oracles).

Exit codes: 0 success/converged, 1 usage or input error, 2 numerical
non-convergence or audit failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import __version__, audit, catalog, io
from .errors import ConvroofError, InvalidInputError
from .manifold import KINDS as TRIVIALIZATION_KINDS
from .measures import KINDS as MEASURE_KINDS
from .measures import LSE_TEMPERATURE, MeasureSpec
from .solver import SolverConfig, solve

_FLOAT_FMT = "{!r}"


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; the documented contract is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self._usage_exit(message))

    def _usage_exit(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        return 1


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return _FLOAT_FMT.format(float(value))
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _write_table(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _parse_factors(text):
    try:
        parts = tuple(int(p) for p in text.lower().split("x"))
    except ValueError:
        raise InvalidInputError(f"cannot parse --factors {text!r}; expected dAxdB")
    if len(parts) != 2 or any(p < 1 for p in parts):
        raise InvalidInputError(f"cannot parse --factors {text!r}; expected dAxdB")
    return parts


def _parse_n(text, d):
    text = text.strip().lower()
    if text.endswith("d"):
        try:
            return int(text[:-1] or "1") * d
        except ValueError:
            pass
    else:
        try:
            return int(text)
        except ValueError:
            pass
    raise InvalidInputError(f"--n must be an integer or a multiple like '2d', got {text!r}")


def _config_from_args(args, d):
    return SolverConfig(
        ensemble_size=_parse_n(args.n, d),
        restarts=args.restarts,
        tol=args.tol,
        max_iterations=args.max_iterations,
        trivialization=args.trivialization,
        seed=args.seed,
        lse_temperature=args.lse_temperature,
    )


def _add_solver_flags(p, n_default="2d", restarts_default=3):
    p.add_argument(
        "--n", default=n_default, help="ensemble size (integer or multiple like '2d')"
    )
    p.add_argument(
        "--restarts", type=int, default=restarts_default, help="independent restarts"
    )
    p.add_argument("--tol", type=float, default=1e-14, help="optimization tolerance")
    p.add_argument(
        "--max-iterations", type=int, default=1000, help="L-BFGS iteration cap"
    )
    p.add_argument(
        "--trivialization",
        choices=TRIVIALIZATION_KINDS,
        default="polar",
        help="Stiefel trivialization map",
    )
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument(
        "--lse-temperature",
        type=float,
        default=LSE_TEMPERATURE,
        help="log-sum-exp smoothing temperature (coherence)",
    )


def _measure_spec_from_args(args, rho):
    kind = args.measure
    if kind in ("eof", "linear-entropy"):
        if args.factors:
            dims = _parse_factors(args.factors)
        elif rho.factors and len(rho.factors) == 2:
            dims = rho.factors
        else:
            raise InvalidInputError(
                f"--measure {kind} needs --factors dAxdB (or factors in the state file)"
            )
        return MeasureSpec(kind=kind, dims=dims)
    if kind == "coherence":
        return MeasureSpec(kind=kind)
    if kind == "stabilizer-purity":
        return MeasureSpec(kind=kind, alpha=args.alpha)
    if kind == "qfi":
        if not args.hamiltonian:
            raise InvalidInputError("--measure qfi needs --hamiltonian FILE")
        return MeasureSpec(kind=kind, hamiltonian=io.load_hermitian(args.hamiltonian))
    if kind == "holevo":
        if not args.channel:
            raise InvalidInputError("--measure holevo needs --channel FILE")
        return MeasureSpec(kind=kind, kraus=io.load_channel(args.channel).kraus)
    raise InvalidInputError(f"unknown measure {kind!r}")


def cmd_solve(args) -> int:
    rho = io.load_state(args.state)
    spec = _measure_spec_from_args(args, rho)
    config = _config_from_args(args, rho.dim)
    result = solve(rho, spec, config)
    record = io.RunRecord.create(
        input_desc={
            "state_file": str(args.state),
            "dim": rho.dim,
            "factors": list(rho.factors) if rho.factors else None,
        },
        measure_desc={
            "kind": spec.kind,
            "factors": list(spec.dims) if spec.dims else None,
            "alpha": spec.alpha,
            "hamiltonian_file": args.hamiltonian,
            "channel_file": args.channel,
        },
        config_desc={
            "n": config.resolve_n(rho.dim),
            "restarts": config.restarts,
            "tol": config.tol,
            "max_iterations": config.max_iterations,
            "trivialization": config.trivialization,
            "seed": config.seed,
            "lse_temperature": config.lse_temperature,
            "epsilon": config.epsilon,
        },
        result_desc={
            "value": result.value,
            "raw_objective": result.raw_objective,
            "converged": result.converged,
            "iterations": list(result.iterations),
            "best_restart": result.best_restart,
            "gradient_norm": result.gradient_norm,
            "wall_time": result.wall_time,
            "restart_values": [t.value for t in result.restarts],
            "derived": result.derived,
        },
        version=__version__,
    )
    text = record.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    print(f"{spec.kind} = {result.value!r}  (converged={result.converged})")
    return 0 if result.converged else 2


def _plot_path(args, table_path):
    if args.no_plot:
        return None
    if args.plot:
        return args.plot
    return str(Path(table_path).with_suffix(".png"))


def cmd_sweep_werner(args) -> int:
    from .plots import plot_sweep_curves

    alphas = np.linspace(args.alpha_start, args.alpha_stop, args.alpha_steps)
    boundary = catalog.werner_separable_alpha_max(args.d)
    rows = []
    for a in alphas:
        rho = catalog.werner(args.d, float(a))
        res = solve(
            rho, MeasureSpec(kind="eof", dims=(args.d, args.d)),
            _config_from_args(args, args.d**2),
        )
        oracle = (
            catalog.wootters_eof_oracle(rho)
            if args.d == 2
            else (0.0 if a <= boundary else None)
        )
        err = abs(res.value - oracle) if oracle is not None else None
        rows.append(
            [args.d, float(a), res.value, oracle, err,
             res.iterations[res.best_restart], res.converged]
        )
    _write_table(
        args.out,
        ["d", "alpha", "eof", "oracle", "abs_error", "iterations", "converged"],
        rows,
    )
    fig_path = _plot_path(args, args.out)
    if fig_path:
        solved = np.array([r[2] for r in rows])
        known = [(r[1], r[3]) for r in rows if r[3] is not None]
        oracle_series = {}
        if known:
            ox, oy = zip(*known)
            oracle_series[f"oracle d={args.d}"] = (np.array(ox), np.array(oy))
        plot_sweep_curves(
            {f"solved d={args.d}": (alphas, solved)},
            "alpha", "entanglement of formation (nats)", fig_path,
            oracle_series=oracle_series,
        )
        print(f"figure: {fig_path}")
    print(f"table: {args.out} ({len(rows)} rows)")
    return 0


def cmd_sweep_coherent(args) -> int:
    from .plots import plot_sweep_curves

    dims = [int(x) for x in args.dims.split(",")]
    ps = np.linspace(args.p_start, args.p_stop, args.p_steps)
    rows = []
    series, oracle_series = {}, {}
    for d in dims:
        solved = []
        oracle = []
        for p in ps:
            rho = catalog.noisy_coherent(d, float(p))
            res = solve(
                rho, MeasureSpec(kind="coherence"), _config_from_args(args, d)
            )
            ref = catalog.coherence_analytic(d, float(p))
            rows.append(
                [d, float(p), res.value, ref, abs(res.value - ref),
                 res.iterations[res.best_restart], res.converged]
            )
            solved.append(res.value)
            oracle.append(ref)
        series[f"solved d={d}"] = (ps, np.array(solved))
        oracle_series[f"analytic d={d}"] = (ps, np.array(oracle))
    _write_table(
        args.out,
        ["d", "p", "coherence", "oracle", "abs_error", "iterations", "converged"],
        rows,
    )
    fig_path = _plot_path(args, args.out)
    if fig_path:
        plot_sweep_curves(
            series, "p", "geometric coherence", fig_path, oracle_series=oracle_series
        )
        print(f"figure: {fig_path}")
    print(f"table: {args.out} ({len(rows)} rows)")
    return 0


_PLANES = {
    # (u, v) -> Bloch vector; coordinate sections through the origin plus
    # the plane of the (+,+,+) octahedron face, x+y+z = 1.
    "z0": lambda u, v: (u, v, 0.0),
    "y0": lambda u, v: (u, 0.0, v),
    "x0": lambda u, v: (0.0, u, v),
    "face": lambda u, v: (
        1.0 / 3.0 + u / np.sqrt(2.0) + v / np.sqrt(6.0),
        1.0 / 3.0 - u / np.sqrt(2.0) + v / np.sqrt(6.0),
        1.0 / 3.0 - 2.0 * v / np.sqrt(6.0),
    ),
}


def cmd_sweep_bloch(args) -> int:
    from .plots import plot_plane_heatmap

    to_xyz = _PLANES[args.plane]
    half = np.sqrt(2.0 / 3.0) if args.plane == "face" else 1.0
    us = np.linspace(-half, half, args.grid)
    vs = np.linspace(-half, half, args.grid)
    spec = MeasureSpec(kind="stabilizer-purity", alpha=2.0, n_qubits=1)
    rows = []
    grid_vals = np.full((args.grid, args.grid), np.nan)
    for i, u in enumerate(us):
        for j, v in enumerate(vs):
            x, y, z = to_xyz(float(u), float(v))
            if x * x + y * y + z * z > 1.0:
                continue
            inside = catalog.octahedron_member(x, y, z)
            res = solve(catalog.bloch_qubit(x, y, z), spec, _config_from_args(args, 2))
            oracle = 0.0 if inside else None
            err = abs(res.value - oracle) if oracle is not None else None
            rows.append(
                [float(u), float(v), x, y, z, inside, res.value, oracle, err,
                 res.iterations[res.best_restart], res.converged]
            )
            grid_vals[i, j] = res.value
    _write_table(
        args.out,
        ["u", "v", "x", "y", "z", "in_octahedron", "m2_lin", "oracle",
         "abs_error", "iterations", "converged"],
        rows,
    )
    fig_path = _plot_path(args, args.out)
    if fig_path:
        plot_plane_heatmap(
            us, vs, grid_vals, "u", "v",
            f"linear stabilizer entropy, plane {args.plane}", fig_path,
        )
        print(f"figure: {fig_path}")
    print(f"table: {args.out} ({len(rows)} rows)")
    return 0


def cmd_gradcheck(args) -> int:
    kinds = list(MEASURE_KINDS) if args.measure == "all" else [args.measure]
    trivs = (
        list(TRIVIALIZATION_KINDS)
        if args.trivialization == "all"
        else [args.trivialization]
    )
    worst = 0.0
    failed = False
    for kind in kinds:
        d = args.d if args.d else audit_default_dim(kind)
        for triv in trivs:
            errors = audit.gradcheck(
                kind, d, trivialization=triv, seed=args.seed, points=args.points
            )
            worst = max(worst, float(errors.max()))
            status = "ok" if errors.max() <= audit.GRAD_TOL else "FAIL"
            failed |= status == "FAIL"
            print(
                f"{kind:17s} {triv:6s} d={d:<3d} points={args.points} "
                f"max_rel_err={errors.max():.3e} {status}"
            )
            if args.verbose:
                for i, e in enumerate(errors):
                    print(f"    point {i:3d}: rel_err={e:.3e}")
    print(f"gradcheck worst relative error: {worst:.3e} (tol {audit.GRAD_TOL:g})")
    return 2 if failed else 0


def audit_default_dim(kind: str) -> int:
    return {"eof": 4, "linear-entropy": 4, "coherence": 4,
            "stabilizer-purity": 4, "qfi": 3, "holevo": 3}[kind]


def cmd_oracle_compare(args) -> int:
    result = audit.run_suite(args.suite, trials=args.trials, seed=args.seed)
    print(
        f"suite={result.suite} trials={result.trials} "
        f"max_abs_dev={result.max_abs_deviation:.3e} "
        f"mean_abs_dev={result.mean_abs_deviation:.3e} "
        f"upper_bound_violations={result.upper_bound_violations}"
    )
    tol = audit.SUITE_DEVIATION_TOL[args.suite]
    print(f"tolerance: {tol:g}; {'PASS' if result.passed else 'FAIL'}")
    return 0 if result.passed else 2


def build_parser() -> _Parser:
    parser = _Parser(
        prog="convroof",
        description="Convex-roof quantum resource measures by Stiefel-trivialized descent.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one state / one measure")
    p_solve.add_argument(
        "--measure", choices=MEASURE_KINDS, required=True, help="measure kind"
    )
    p_solve.add_argument("--state", required=True, help="state JSON file")
    p_solve.add_argument("--factors", help="bipartition dAxdB (entanglement kinds)")
    p_solve.add_argument(
        "--alpha", type=float, default=2.0, help="Renyi index (stabilizer purity)"
    )
    p_solve.add_argument("--hamiltonian", help="observable JSON file (qfi)")
    p_solve.add_argument("--channel", help="Kraus channel JSON file (holevo)")
    p_solve.add_argument("--out", help="write the run record to this file")
    _add_solver_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="grid sweeps -> CSV table + figure")
    sweep_sub = p_sweep.add_subparsers(dest="sweep_kind", required=True)

    p_w = sweep_sub.add_parser(
        "werner",
        help="entanglement of formation over the Werner family",
        epilog="table columns: d, alpha, eof, oracle, abs_error, iterations, converged",
    )
    p_w.add_argument("--d", type=int, default=2, help="local dimension")
    p_w.add_argument("--alpha-start", type=float, default=0.0)
    p_w.add_argument("--alpha-stop", type=float, default=1.0)
    p_w.add_argument("--alpha-steps", type=int, default=11)
    p_w.add_argument("--out", required=True, help="CSV output path")
    p_w.add_argument("--plot", help="figure path (default: table path with .png)")
    p_w.add_argument("--no-plot", action="store_true", help="skip the figure")
    _add_solver_flags(p_w)
    p_w.set_defaults(func=cmd_sweep_werner)

    p_c = sweep_sub.add_parser(
        "coherent",
        help="geometric coherence of noisy coherent states",
        epilog="table columns: d, p, coherence, oracle, abs_error, iterations, converged",
    )
    p_c.add_argument("--dims", default="2,4", help="comma-separated dimensions")
    p_c.add_argument("--p-start", type=float, default=0.0)
    p_c.add_argument("--p-stop", type=float, default=1.0)
    p_c.add_argument("--p-steps", type=int, default=11)
    p_c.add_argument("--out", required=True, help="CSV output path")
    p_c.add_argument("--plot", help="figure path (default: table path with .png)")
    p_c.add_argument("--no-plot", action="store_true", help="skip the figure")
    _add_solver_flags(p_c)
    p_c.set_defaults(func=cmd_sweep_coherent)

    p_b = sweep_sub.add_parser(
        "bloch-section",
        help="linear stabilizer entropy (alpha=2) on a Bloch-ball cross section",
        epilog=(
            "table columns: u, v, x, y, z, in_octahedron, m2_lin, oracle, "
            "abs_error, iterations, converged"
        ),
    )
    p_b.add_argument("--plane", choices=sorted(_PLANES), default="z0")
    p_b.add_argument("--grid", type=int, default=15, help="grid points per axis")
    p_b.add_argument("--out", required=True, help="CSV output path")
    p_b.add_argument("--plot", help="figure path (default: table path with .png)")
    p_b.add_argument("--no-plot", action="store_true", help="skip the figure")
    # the n=2d qubit magic landscape is multi-modal; larger defaults keep
    # the stabilizer region at exactly zero across the whole section
    _add_solver_flags(p_b, n_default="4d", restarts_default=12)
    p_b.set_defaults(func=cmd_sweep_bloch)

    p_g = sub.add_parser("gradcheck", help="finite-difference gradient audit")
    p_g.add_argument(
        "--measure", choices=MEASURE_KINDS + ("all",), default="all"
    )
    p_g.add_argument("--d", type=int, help="dimension (default per measure)")
    p_g.add_argument(
        "--trivialization", choices=TRIVIALIZATION_KINDS + ("all",), default="all"
    )
    p_g.add_argument("--seed", type=int, default=0)
    p_g.add_argument("--points", type=int, default=20)
    p_g.add_argument("--verbose", action="store_true", help="per-point errors")
    p_g.set_defaults(func=cmd_gradcheck)

    p_o = sub.add_parser("oracle-compare", help="solver vs closed-form oracles")
    p_o.add_argument("--suite", choices=audit.SUITES, required=True)
    p_o.add_argument("--trials", type=int, default=20)
    p_o.add_argument("--seed", type=int, default=0)
    p_o.set_defaults(func=cmd_oracle_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse raises for --help (code 0) and usage errors (mapped to 1)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConvroofError as exc:
        print(f"convroof: error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
