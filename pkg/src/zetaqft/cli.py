"""Command-line entry point: ``zetaqft <command> [options]``.

Output goes to ``--output`` if given, else to ``$ZETAQFT_OUTPUT_DIR/<command>.<format>``
when that variable is set, else to stdout.  Exit codes: 1 invalid
configuration, 2 numerical failure, 3 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path

from . import matrixmodel, odeeigen, qftsim, susyqm, zerofinder
from .errors import ConfigError, NumericalError, ResourceLimitError, ZetaQFTError
from .wavefuncs import DEFAULT_WINDOWS, DeformationParams, FunctionId, Grid, Space, fmt_real, sample_curve

OUTPUT_DIR_ENV = "ZETAQFT_OUTPUT_DIR"
UNGATED_MATRIX_N = 250

# epsilon values shown for each function
FIGURE_EPSILONS = {
    FunctionId.F1_quartic: (0.0, 0.1, 0.2),
    FunctionId.F2_cosh: (0.0, 0.1, 0.2),
    FunctionId.F3_xi: (0.0, 0.2, 0.5),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    command: str
    format: str = "csv"
    output_path: str | None = None


def _function(text: str) -> FunctionId:
    try:
        return FunctionId.parse(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _rational(text: str) -> Fraction:
    try:
        return matrixmodel.parse_rational(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetaqft", description="Zeros, QFT simulation, SUSY-QM and matrix-model data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, function=True):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", help="output file (default: stdout or $%s)" % OUTPUT_DIR_ENV)
        if function:
            p.add_argument("--function", type=_function, required=True, help="f1, f2 or f3")

    p = sub.add_parser("sample", help="sample a position- or momentum-space function on a grid")
    common(p)
    p.add_argument("--space", choices=[s.value for s in Space], default="momentum")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--g", type=float, default=1 / 64, help="quartic coupling for f1")
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--points", type=int, default=801)
    p.add_argument("--log", action="store_true", help="add a log10|value| column")

    p = sub.add_parser("zeros", help="zeros on the real momentum axis")
    common(p)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--samples", type=int, default=512)

    p = sub.add_parser("sweep", help="min |f| and zero count for a list of epsilon values")
    common(p)
    p.add_argument("--eps", type=float, nargs="+", help="ascending, starting at 0 (default: figure values)")
    p.add_argument("--window", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--samples", type=int, default=512)

    p = sub.add_parser("qft", help="centred-QFT statevector pipeline")
    common(p)
    p.add_argument("--qubits", type=int, default=6)
    p.add_argument("--dx", type=float)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--log", action="store_true", help="add a log10|value| column")
    p.add_argument("--emit-circuit", metavar="PATH", help="also write the gate list as JSON")

    p = sub.add_parser("susy", help="minus partner potential and ground state")
    common(p)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--g", type=float, help="superpotential coupling (default 1/64 for f1, 1 otherwise)")
    p.add_argument("--dx", type=float, default=0.01)
    p.add_argument("--half-width", type=float, help="grid covers [-w, w] (default 6, 3, 2.5)")

    p = sub.add_parser("matrix", help="(p,1) matrix-model characteristic polynomial")
    common(p, function=False)
    p.add_argument("--p", dest="p_order", type=int, default=3)
    p.add_argument("--n", dest="n_matrix", type=int, default=1)
    p.add_argument("--g", type=_rational, help="rational coupling 'a/b' (default 1/N)")
    p.add_argument("--roots", action="store_true", help="emit certified roots instead of the polynomial")
    p.add_argument("--precision-digits", type=int, default=20)
    p.add_argument("--allow-minutes", action="store_true", help=f"permit N > {UNGATED_MATRIX_N}")
    p.add_argument("--scaling", type=int, nargs="+", metavar="N", help="scaling-limit table for these N")
    p.add_argument("--master", type=int, metavar="N", help="(2,1) master-matrix crosscheck up to N")

    p = sub.add_parser("eigen", help="zeros as linear-potential eigenvalues")
    common(p, function=False)
    p.add_argument("--count", type=int, default=7)
    p.add_argument("--eigenfunction", type=int, metavar="K", help="emit samples of the K-th eigenfunction")
    return parser


# ---------------------------------------------------------------------------


def _rows_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1)


def _window(args, fid):
    if args.window is None:
        return DEFAULT_WINDOWS[fid]
    lo, hi = args.window
    if not hi > lo:
        raise ConfigError("--window needs LO < HI")
    return lo, hi


def _cmd_sample(args) -> str:
    params = DeformationParams(args.epsilon, args.g)
    curve = sample_curve(args.function, Grid(args.points, args.dx), params, Space(args.space))
    return curve.to_csv(log=args.log) if args.format == "csv" else curve.to_json()


def _cmd_zeros(args) -> str:
    fid = args.function
    window = _window(args, fid)
    if args.epsilon == 0:
        report = zerofinder.analytic_zeros(fid, window=window, samples=args.samples)
    else:
        row = zerofinder.epsilon_sweep(fid, [0.0, args.epsilon], window, args.samples)[-1]
        report = zerofinder.ZeroReport(fid, args.epsilon, row.zeros, zerofinder.Method.grid_minimum,
                                       [row.min_abs] * len(row.zeros))
    return report.to_csv() if args.format == "csv" else report.to_json()


def _cmd_sweep(args) -> str:
    fid = args.function
    eps = args.eps if args.eps else FIGURE_EPSILONS[fid]
    rows = zerofinder.epsilon_sweep(fid, eps, _window(args, fid), args.samples)
    if args.format == "csv":
        return zerofinder.sweep_to_csv(rows)
    return _dumps({"type": "EpsilonSweep", "function": fid.value, "rows": [asdict(r) for r in rows]})


def _cmd_qft(args) -> str:
    params = DeformationParams(args.epsilon)
    curve = qftsim.qft_pipeline(args.function, params, args.qubits, args.dx)
    if args.emit_circuit:
        Path(args.emit_circuit).write_text(qftsim.build_centered_qft_circuit(args.qubits).to_json())
    return curve.to_csv(log=args.log) if args.format == "csv" else curve.to_json()


_SUSY_HALF_WIDTH = {FunctionId.F1_quartic: 6.0, FunctionId.F2_cosh: 3.0, FunctionId.F3_xi: 2.5}


def _cmd_susy(args) -> str:
    fid = args.function
    spec = (susyqm.SuperpotentialSpec.standard(fid, args.epsilon) if args.g is None
            else susyqm.SuperpotentialSpec(fid, args.g, args.epsilon))
    half = args.half_width if args.half_width is not None else _SUSY_HALF_WIDTH[fid]
    curve = susyqm.potential_curve(spec, Grid.covering(half, args.dx))
    return curve.to_csv() if args.format == "csv" else curve.to_json()


def _cmd_matrix(args) -> str:
    sizes = [args.n_matrix] + (args.scaling or []) + ([args.master] if args.master else [])
    if max(sizes) > UNGATED_MATRIX_N and not args.allow_minutes:
        raise ResourceLimitError(f"N = {max(sizes)} > {UNGATED_MATRIX_N} needs --allow-minutes", completed=0)
    if args.master is not None:
        rows = matrixmodel.master_matrix_crosscheck(args.master, args.g)
        if args.format == "csv":
            return _rows_csv(["N", "exact_match", "eigen_max_error"],
                             [[r.N, str(r.exact_match).lower(), fmt_real(r.eigen_max_error)] for r in rows])
        return _dumps({"type": "MasterMatrixCrosscheck", "rows": [asdict(r) for r in rows]})
    if args.scaling:
        rows, trend = matrixmodel.scaled_edge_compare(args.scaling, args.p_order)
        if args.format == "csv":
            return matrixmodel.scaling_to_csv(rows)
        return _dumps({"type": "ScalingTable", "distance_decreasing": trend, "rows": [asdict(r) for r in rows]})
    g = args.g if args.g is not None else Fraction(1, max(args.n_matrix, 1))
    poly = matrixmodel.qn_polynomial(matrixmodel.ModelSpec(args.p_order, args.n_matrix, g))
    if args.roots:
        roots = matrixmodel.real_roots(poly, args.precision_digits)
        return roots.to_csv() if args.format == "csv" else roots.to_json()
    if args.format == "csv":
        return _rows_csv(["degree", "coefficient"], [[k, matrixmodel._rat_str(c)]
                                                     for k, c in enumerate(poly.coefficients)])
    return poly.to_json()


def _cmd_eigen(args) -> str:
    table = odeeigen.eigen_zero_table(args.count)
    if args.eigenfunction is not None:
        curve = odeeigen.eigenfunction_samples(args.eigenfunction, table)
        return curve.to_csv() if args.format == "csv" else curve.to_json()
    return table.to_csv() if args.format == "csv" else table.to_json()


_COMMANDS = {
    "sample": _cmd_sample,
    "zeros": _cmd_zeros,
    "sweep": _cmd_sweep,
    "qft": _cmd_qft,
    "susy": _cmd_susy,
    "matrix": _cmd_matrix,
    "eigen": _cmd_eigen,
}


def _destination(config: RunConfig) -> Path | None:
    if config.output_path:
        return Path(config.output_path)
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory:
        return Path(directory) / f"{config.command}.{config.format}"
    return None


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    config = RunConfig(args.command, args.format, args.output)
    try:
        text = _COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"zetaqft: resource limit: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"zetaqft: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ZetaQFTError) as exc:
        print(f"zetaqft: invalid configuration: {exc}", file=sys.stderr)
        return 1
    dest = _destination(config)
    if dest is None:
        sys.stdout.write(text)
    else:
        dest.parent.mkdir(parents=True, exist_ok=True)
        dest.write_text(text)
    return 0


def main(argv: list[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
