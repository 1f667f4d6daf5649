"""
qde_cli.py - Quaternion QDE Lab
Command-line front end.

    python -m qde_cli ddet --input problems/ex61_vectors.json
    python -m qde_cli expat --input problems/zero.json --t 5
    python -m qde_cli check --example ex52
    python -m qde_cli check --random 20

Exit codes: 0 ok, 1 a check gate failed, 2 bad input (problem file or flags),
3 numerical failure. Results go to stdout, diagnostics to stderr.
"""

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np

from qde_config import SEED, Tolerances, configure_logging
from qde_errors import DimensionError, ProblemFileError, QDEError
from qde_linalg import QMatrix, QVector, mat_vec
from qde_oracle import fd_residual, random_matrix, random_vector, rk4_integrate
from qde_pdet import ddet, det_p
from qde_problem import ProblemFile, load_problem, load_vector, render, to_jsonable, to_text
from qde_quat import format_quaternion
from qde_spectra import full_spectrum
from qde_system import (
    exp_at,
    exp_series,
    fundamental_matrix,
    liouville_check,
    solve_diagonal,
)
from qde_worked import DISCREPANCY, worked_example, worked_names

logger = logging.getLogger("qde")

COMMANDS = ("det", "ddet", "eig", "fundmat", "expat", "solve", "diag-solve", "check", "liouville")

# sample times for the ODE-residual and nondegeneracy gates
GATE_TIMES = (0.0, 0.25, 0.5, 1.0)
RK4_STEP = 1e-4

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERICAL = 3


# ---------------------------------------------------------------------------
# Gate suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateResult:
    system: str
    gate: str
    value: float
    limit: float
    passed: bool
    known: bool = False  # a recorded discrepancy: reported, never fails the run

    @property
    def status(self) -> str:
        if self.known:
            return "KNOWN"
        return "PASS" if self.passed else "FAIL"


def _gate(system, gate, value, limit, below=True) -> GateResult:
    passed = bool(value <= limit) if below else bool(value > limit)
    return GateResult(system, gate, float(value), float(limit), passed)


def run_gates(
    a: QMatrix,
    system: str = "A",
    x0: Optional[QVector] = None,
    t: float = 1.0,
    expected: Optional[QVector] = None,
    tolerances: Tolerances = Tolerances(),
) -> List[GateResult]:
    """exp(0) = I, ODE residual, series and RK4 agreement, ddet nondegeneracy."""
    n = a.rows
    basis = fundamental_matrix(a, cluster_tol=tolerances.cluster, rank_tol=tolerances.rank)
    identity = QMatrix.identity(n)
    results = [
        _gate(system, "exp(0)=I", (exp_at(a, 0.0, basis=basis) - identity).norm(), 1e-10),
        _gate(system, "ode-residual", fd_residual(basis, a, GATE_TIMES, h=tolerances.fd_step), tolerances.fd),
    ]
    e_eigen = exp_at(a, t, basis=basis)
    results.append(_gate(system, "series-agreement", (e_eigen - exp_series(a, t, tolerances.series)).norm(), 1e-8))

    x0 = x0 if x0 is not None else QVector.from_entries([1] * n)
    x_eigen = mat_vec(e_eigen, x0)
    rk = rk4_integrate(a, 0.0, x0, t, RK4_STEP, estimate_error=False)
    results.append(_gate(system, "rk4-agreement", (x_eigen - rk.state).norm(), 1e-6))
    worst_ddet = min(ddet(basis.evaluate(s)) for s in GATE_TIMES)
    results.append(_gate(system, "ddet-nondegenerate", worst_ddet, tolerances.independence, below=False))
    if expected is not None:
        results.append(_gate(system, "expected-x(t)", (x_eigen - expected).norm(), 1e-6))
    return results


def printed_form_gates(name: str) -> List[GateResult]:
    example = worked_example(name)
    a = example.matrix
    out = []
    for form in example.printed:
        gates = [_gate(name, f"printed-{form.kind}:ode-residual", fd_residual(form.evaluate, a, GATE_TIMES), 1e-6)]
        if form.kind == "exp":
            at_zero = (form.evaluate(0.0) - QMatrix.identity(a.rows)).norm()
            gates.append(_gate(name, "printed-exp:exp(0)=I", at_zero, 1e-10))
        if form.status == DISCREPANCY:
            if all(g.passed for g in gates):
                logger.warning("%s printed %s is recorded as a discrepancy but passes", name, form.kind)
            gates = [GateResult(g.system, g.gate, g.value, g.limit, g.passed, known=True) for g in gates]
        out.extend(gates)
    return out


def random_gates(count: int, seed: int = SEED) -> List[GateResult]:
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(2, 5))
        a = random_matrix(rng, n)
        out.extend(run_gates(a, system=f"random[{k}] n={n}", x0=random_vector(rng, n)))
    return out


def format_gate_table(results: Sequence[GateResult]) -> str:
    header = ("system", "gate", "value", "limit", "status")
    rows = [(r.system, r.gate, f"{r.value:.3e}", f"{r.limit:.0e}", r.status) for r in results]
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(line, widths)) for line in [header, *rows]]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--input", help="problem file (JSON)")
    src.add_argument("--example", choices=worked_names(), help="use a worked example as the problem")
    common.add_argument("--t", type=float, default=None, help="evaluation time")
    common.add_argument("--t0", type=float, default=None, help="initial time (default 0)")
    common.add_argument("--x0", default=None, help="initial vector file (JSON)")
    common.add_argument("--tol", type=float, default=None, help="gate / residual tolerance override")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--log-file", default=None)
    common.add_argument("--verbose", action="store_true", help="log INFO records to stderr")

    parser = argparse.ArgumentParser(prog="qde", description="Quaternion linear algebra and QDE toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "expat":
            p.add_argument("--method", choices=("eigen", "series"), default="eigen")
        if name == "check":
            p.add_argument("--random", type=int, default=0, metavar="N", help="also gate N seeded random systems")
    return parser


def _load(args) -> ProblemFile:
    if args.example:
        ex = worked_example(args.example)
        problem = ProblemFile(matrix=ex.matrix, name=ex.name)
    elif args.input:
        problem = load_problem(args.input)
    else:
        problem = ProblemFile()

    tol = problem.tolerance
    if args.tol is not None:
        tol = tol.with_overrides(fd=args.tol, residual=args.tol)
    x0 = load_vector(args.x0) if args.x0 else problem.x0
    return ProblemFile(
        matrix=problem.matrix,
        x0=x0,
        t0=args.t0 if args.t0 is not None else problem.t0,
        t=args.t if args.t is not None else problem.t,
        coeffs=problem.coeffs,
        expected=problem.expected,
        tolerance=tol,
        name=problem.name,
    )


def _need(value, what: str):
    if value is None:
        raise ProblemFileError(f"{what} is required (flag or problem file)")
    return value


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _emit(value, fmt: str):
    print(render(value, fmt))


def _cmd_det(p: ProblemFile, args) -> int:
    _emit(det_p(_need(p.matrix, "matrix")), args.format)
    return EXIT_OK


def _cmd_ddet(p: ProblemFile, args) -> int:
    _emit(ddet(_need(p.matrix, "matrix")), args.format)
    return EXIT_OK


def _cmd_eig(p: ProblemFile, args) -> int:
    tol = p.tolerance
    spectrum = full_spectrum(
        _need(p.matrix, "matrix"),
        cluster_tol=tol.cluster,
        rank_tol=tol.rank,
        independence_tol=tol.independence,
        residual_tol=tol.residual,
    )
    if args.format == "json":
        payload = [
            {
                "eigenvalue": e.eigenvalue,
                "multiplicity": e.multiplicity,
                "chains": [list(c.vectors) for c in e.chains],
            }
            for e in spectrum.entries
        ]
        print(json.dumps(to_jsonable(payload)))
        return EXIT_OK
    for e in spectrum.entries:
        print(f"λ = {format_quaternion(e.eigenvalue)}  multiplicity {e.multiplicity}")
        for k, chain in enumerate(e.chains, 1):
            vecs = ", ".join(f"v{l} = {to_text(v)}" for l, v in enumerate(chain.vectors, 1))
            print(f"  chain {k}: {vecs}")
    return EXIT_OK


def _cmd_fundmat(p: ProblemFile, args) -> int:
    tol = p.tolerance
    basis = fundamental_matrix(_need(p.matrix, "matrix"), cluster_tol=tol.cluster, rank_tol=tol.rank)
    if args.format == "json":
        payload = {
            "columns": [
                {"exponent": c.exponent, "coeffs": [{"power": pw, "vector": v} for pw, v in c.coeffs]}
                for c in basis.columns
            ]
        }
        if p.t is not None:
            payload["t"] = p.t
            payload["value"] = basis.evaluate(p.t)
        print(json.dumps(to_jsonable(payload)))
        return EXIT_OK
    for k, col in enumerate(basis.columns, 1):
        print(f"column {k}: exponent {format_quaternion(col.exponent)}")
        for power, vec in col.coeffs:
            print(f"  t^{power}/{power}!  {to_text(vec)}")
    if p.t is not None:
        print(f"M({p.t:g}) =")
        print(to_text(basis.evaluate(p.t)))
    return EXIT_OK


def _exp(a: QMatrix, t: float, method: str, tol: Tolerances) -> QMatrix:
    if method == "series":
        return exp_series(a, t, tol.series)
    basis = fundamental_matrix(a, cluster_tol=tol.cluster, rank_tol=tol.rank, independence_tol=tol.independence)
    return exp_at(a, t, basis=basis)


def _cmd_expat(p: ProblemFile, args) -> int:
    _emit(_exp(_need(p.matrix, "matrix"), _need(p.t, "--t"), args.method, p.tolerance), args.format)
    return EXIT_OK


def _cmd_solve(p: ProblemFile, args) -> int:
    a = _need(p.matrix, "matrix")
    x0 = _need(p.x0, "x0")
    if len(x0) != a.rows:
        raise DimensionError(f"x0 has length {len(x0)}, expected {a.rows}")
    t = _need(p.t, "--t")
    x = x0 if t == p.t0 else mat_vec(_exp(a, t - p.t0, "eigen", p.tolerance), x0)
    _emit(x, args.format)
    return EXIT_OK


def _cmd_diag_solve(p: ProblemFile, args) -> int:
    coeffs = _need(p.coeffs, "coeffs")
    _emit(solve_diagonal(coeffs, p.t0, _need(p.x0, "x0"), _need(p.t, "--t")), args.format)
    return EXIT_OK


def _cmd_check(p: ProblemFile, args) -> int:
    results: List[GateResult] = []
    if p.matrix is not None:
        results.extend(
            run_gates(
                p.matrix,
                system=p.name or "A",
                x0=p.x0,
                t=p.t if p.t is not None else 1.0,
                expected=p.expected,
                tolerances=p.tolerance,
            )
        )
    if args.example:
        results.extend(printed_form_gates(args.example))
    if args.random:
        results.extend(random_gates(args.random))
    if not results:
        raise ProblemFileError("check needs --input, --example or --random")

    if args.format == "json":
        print(json.dumps([dict(asdict(r), status=r.status) for r in results]))
    else:
        print(format_gate_table(results))
    failed = [r for r in results if r.status == "FAIL"]
    for r in failed:
        logger.warning("gate %s failed on %s: %.3e vs %.0e", r.gate, r.system, r.value, r.limit)
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def _cmd_liouville(p: ProblemFile, args) -> int:
    t1 = p.t if p.t is not None else p.t0 + 1.0
    report = liouville_check(_need(p.matrix, "matrix"), p.t0, t1)
    if args.format == "json":
        print(json.dumps(to_jsonable({"factor": report.factor, "max_rel_err": report.max_rel_err})))
    else:
        print(f"factor       {report.factor:.9g}")
        print(f"max_rel_err  {report.max_rel_err:.3e}")
    return EXIT_OK


_HANDLERS = {
    "det": _cmd_det,
    "ddet": _cmd_ddet,
    "eig": _cmd_eig,
    "fundmat": _cmd_fundmat,
    "expat": _cmd_expat,
    "solve": _cmd_solve,
    "diag-solve": _cmd_diag_solve,
    "check": _cmd_check,
    "liouville": _cmd_liouville,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(args.log_file, "INFO" if args.verbose else "WARNING")
    try:
        problem = _load(args)
        return _HANDLERS[args.command](problem, args)
    except ProblemFileError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (QDEError, np.linalg.LinAlgError) as e:
        logger.error("%s failed: %s", args.command, repr(e))
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
