"""Command-line front end: ``qphot {state,pnd,verify,qplanck,floquet}``.

Exit codes: 0 success, 1 unreadable or malformed input, 2 validation
failure, 3 numerical-accuracy or resource failure. Errors go to stderr as a
single line ``error[<kind>]: <message>``.
"""

import argparse
import json
import sys

import numpy as np

from . import fock_oracle, floquet, gaussian_state as gs, photon_distribution as pd, q_planck
from ._parallel import WORKERS_ENV
from .errors import (
    InvalidStateError,
    NoPrincipalLogError,
    NonSymplecticError,
    NumericalAccuracyError,
    ResourceLimitError,
    SingularityError,
)

EXIT_INPUT = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


class CliError(Exception):
    def __init__(self, kind, message, code):
        super().__init__(message)
        self.kind = kind
        self.code = code


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def _json_value(value):
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, np.ndarray):
        return [_json_value(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _jsonl(record):
    return json.dumps(_json_value(record), separators=(",", ":"))


class Table:
    """Accumulates a header mapping and rows, then renders CSV or JSON lines."""

    def __init__(self, columns, header=None):
        self.columns = list(columns)
        self.header = dict(header or {})
        self.rows = []
        self.trailer = {}

    def render(self, output_format):
        lines = []
        if output_format == "csv":
            lines += [f"# {k}={fmt(v)}" for k, v in self.header.items()]
            lines.append(",".join(self.columns))
            lines += [",".join(fmt(v) for v in row) for row in self.rows]
            lines += [f"# {k}={fmt(v)}" for k, v in self.trailer.items()]
        else:
            if self.header:
                lines.append(_jsonl({"type": "header", **self.header}))
            lines += [_jsonl({"type": "row", **dict(zip(self.columns, row))}) for row in self.rows]
            if self.trailer:
                lines.append(_jsonl({"type": "summary", **self.trailer}))
        return "\n".join(lines) + "\n"


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError("input", f"cannot read {path}: {exc.strerror}", EXIT_INPUT) from exc
    except json.JSONDecodeError as exc:
        raise CliError("input", f"malformed document {path}: {exc}", EXIT_INPUT) from exc


def _load_state(path):
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise CliError("input", f"malformed document {path}: expected an object", EXIT_INPUT)
    try:
        state = gs.GaussianState.from_dict(doc)
    except (InvalidStateError, ValueError) as exc:
        raise CliError("input", f"malformed state {path}: {exc}", EXIT_INPUT) from exc
    return state


def _require_valid(state):
    report = gs.validate(state)
    if not report.ok:
        raise CliError("validation", "; ".join(report.violations), EXIT_VALIDATION)


def _parse_complex(text):
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def cmd_state(args):
    if args.input and args.make:
        raise CliError("usage", "give either an input file or --make, not both", EXIT_VALIDATION)
    if args.input:
        state = _load_state(args.input)
    elif args.make == "vacuum":
        state = gs.make_vacuum(args.modes)
    elif args.make == "coherent":
        state = gs.make_coherent(args.alpha or [0j])
    elif args.make == "thermal":
        state = gs.make_thermal(args.nbar or [0.0])
    elif args.make == "squeezed":
        state = gs.make_squeezed_vacuum(args.r, args.phi)
    else:
        raise CliError("usage", "need an input file or --make", EXIT_VALIDATION)

    report = gs.validate(state)
    table = Table(["field", "value"])
    table.rows.append(("valid", report.ok))
    table.rows.append(("symmetry_residual", report.symmetry_residual))
    table.rows.append(("min_symplectic_eigenvalue", report.min_symplectic_eigenvalue))
    for v in report.violations:
        table.rows.append(("violation", v))
    if report.ok:
        table.rows.append(("purity", gs.purity(state)))
        for j in range(state.n_modes):
            table.rows.append((f"mean_photon_number[{j}]", gs.mean_photon_number(state, j)))
    if args.format == "jsonl":
        text = _jsonl({"state": state.to_dict(), "report": dict(table.rows)}) + "\n"
    else:
        text = table.render("csv")
    if not report.ok:
        print(f"error[validation]: {'; '.join(report.violations)}", file=sys.stderr)
        return text, EXIT_VALIDATION
    return text, 0


def cmd_pnd(args):
    state = _load_state(args.input)
    _require_valid(state)
    cutoff = args.cutoff
    if cutoff is None:
        cutoff = pd.adaptive_cutoff(state, args.tail_tol)
    dist = pd.pnd(state, cutoff=cutoff, variant=args.variant)
    cols = [f"n{j + 1}" for j in range(state.n_modes)] + ["probability"]
    table = Table(
        cols,
        {"p0": dist.p0, "tail_mass": dist.tail_mass, "variant": dist.variant_id, "cutoff": dist.cutoff},
    )
    table.rows = [(*n, p) for n, p in dist.rows()]
    return table.render(args.format), 0


def cmd_verify(args):
    state = _load_state(args.input)
    _require_valid(state)
    n = state.n_modes
    if n == 1:
        cutoff = 20 if args.cutoff is None else args.cutoff
        tol = 1e-8 if args.tol is None else args.tol
        values, errors = fock_oracle.oracle_pnd_single_mode_range(state, cutoff)
        oracle = {(k,): (values[k], errors[k]) for k in range(cutoff + 1)}
    elif n == 2:
        cutoff = 2 if args.cutoff is None else args.cutoff
        tol = 1e-6 if args.tol is None else args.tol
        if 2 * cutoff > fock_oracle.TWO_MODE_MAX_ORDER:
            raise CliError(
                "validation",
                f"two-mode verify supports --cutoff <= {fock_oracle.TWO_MODE_MAX_ORDER // 2}",
                EXIT_VALIDATION,
            )
        values, errors = fock_oracle.oracle_pnd_two_mode_table(state, cutoff)
        oracle = {k: (values[k], errors[k]) for k in np.ndindex(values.shape)}
    else:
        raise CliError("validation", "verify supports one- and two-mode states", EXIT_VALIDATION)

    dist = pd.pnd(state, cutoff=cutoff, variant=args.variant)
    cols = [f"n{j + 1}" for j in range(n)] + ["pnd", "oracle", "oracle_error", "abs_deviation"]
    table = Table(cols, {"variant": dist.variant_id, "cutoff": cutoff, "tolerance": tol})
    worst = 0.0
    for idx, p in dist.rows():
        o, e = oracle[idx]
        dev = abs(p - o)
        worst = max(worst, dev)
        table.rows.append((*idx, p, o, e, dev))
    passed = worst <= tol
    table.trailer = {"max_abs_deviation": worst, "passed": passed}
    if not passed:
        print(f"error[numerical]: max deviation {fmt(worst)} exceeds {fmt(tol)}", file=sys.stderr)
        return table.render(args.format), EXIT_NUMERICAL
    return table.render(args.format), 0


def cmd_qplanck(args):
    if args.x is not None:
        xs = [args.x]
    elif None not in (args.x_min, args.x_max):
        if args.x_steps < 1:
            raise CliError("validation", "--x-steps must be >= 1", EXIT_VALIDATION)
        xs = np.linspace(args.x_min, args.x_max, args.x_steps).tolist()
    else:
        raise CliError("usage", "give --x or both --x-min and --x-max", EXIT_VALIDATION)
    if any(x <= 0 for x in xs):
        raise CliError("validation", "all x values must be > 0", EXIT_VALIDATION)
    table = Table(["x", "exact", "approx", "difference"], {"lambda": args.lam})
    table.rows = [tuple(row) for row in q_planck.planck_curve(args.lam, xs)]
    return table.render(args.format), 0


def _load_hamiltonian(args):
    doc = _read_json(args.input)
    family = doc.get("family") if isinstance(doc, dict) else None
    try:
        if family == "constant":
            period = args.period if args.period is not None else doc.get("period")
            if period is None:
                raise CliError("validation", "constant Hamiltonian needs a period", EXIT_VALIDATION)
            return floquet.QuadraticHamiltonian.constant(doc["B"], period)
        if family == "mathieu":
            ham = floquet.QuadraticHamiltonian.mathieu(
                float(doc["omega0"]), float(doc["epsilon"]), float(doc["Omega"])
            )
            if args.period is not None and not np.isclose(args.period, ham.period):
                raise CliError(
                    "validation",
                    f"--period {args.period} conflicts with 2 pi / Omega = {ham.period}",
                    EXIT_VALIDATION,
                )
            return ham
    except (KeyError, TypeError) as exc:
        raise CliError("input", f"malformed Hamiltonian {args.input}: {exc}", EXIT_INPUT) from exc
    raise CliError("input", f"unknown Hamiltonian family {family!r}", EXIT_INPUT)


def cmd_floquet(args):
    ham = _load_hamiltonian(args)
    report = floquet.monodromy(ham, steps=args.steps, samples=args.samples)
    if args.format == "jsonl":
        record = {
            "period": report.period,
            "S_T": report.S_T,
            "eigenvalues": [complex(w) for w in report.eigenvalues],
            "phases": report.phases,
            "conjugacy": list(report.conjugacy),
            "symplectic_residual": report.symplectic_residual,
            "invariance_residual": report.invariance_residual,
        }
        return _jsonl(record) + "\n", 0
    table = Table(["field", "value"])
    table.rows.append(("period", report.period))
    for (i, j), v in np.ndenumerate(report.S_T):
        table.rows.append((f"S_T[{i};{j}]", v))
    for k, phi in enumerate(report.phases):
        table.rows.append((f"phase[{k}]", phi))
    for k, label in enumerate(report.conjugacy):
        table.rows.append((f"conjugacy[{k}]", label))
    table.rows.append(("symplectic_residual", report.symplectic_residual))
    table.rows.append(("invariance_residual", report.invariance_residual))
    return table.render("csv"), 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qphot",
        description="Photon statistics of Gaussian states, q-deformed Planck law, "
        f"Floquet invariants. Worker threads: ${WORKERS_ENV}.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
        p.add_argument("--output", help="write to this file instead of stdout")

    p = sub.add_parser("state", help="validate or construct a Gaussian state")
    p.add_argument("input", nargs="?")
    p.add_argument("--make", choices=["vacuum", "coherent", "thermal", "squeezed"])
    p.add_argument("--modes", type=int, default=1)
    p.add_argument("--alpha", type=_parse_complex, action="append")
    p.add_argument("--nbar", type=float, action="append")
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--phi", type=float, default=0.0)
    common(p)
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("pnd", help="photon-number distribution of a state file")
    p.add_argument("input")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--tail-tol", type=float, default=1e-9)
    p.add_argument("--variant", default=pd.DEFAULT_VARIANT, choices=sorted(pd.VARIANTS))
    common(p)
    p.set_defaults(func=cmd_pnd)

    p = sub.add_parser("verify", help="compare pnd with the phase-space oracle")
    p.add_argument("input")
    p.add_argument("--cutoff", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--variant", default=pd.DEFAULT_VARIANT, choices=sorted(pd.VARIANTS))
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("qplanck", help="exact vs closed-form q-deformed occupation")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--x", type=float)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--x-steps", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_qplanck)

    p = sub.add_parser("floquet", help="monodromy report of a periodic quadratic Hamiltonian")
    p.add_argument("input")
    p.add_argument("--period", type=float)
    p.add_argument("--steps", type=int, default=1024)
    p.add_argument("--samples", type=int, default=8)
    common(p)
    p.set_defaults(func=cmd_floquet)
    return parser


def run(argv=None):
    """Parse ``argv``, execute, and return ``(exit_code, stdout_text)``."""
    args = build_parser().parse_args(argv)
    text, code = args.func(args)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError("output", f"cannot write {args.output}: {exc.strerror}", EXIT_INPUT) from exc
        text = ""
    return code, text


def main(argv=None):
    try:
        code, text = run(argv)
    except CliError as exc:
        kind, code, message = exc.kind, exc.code, str(exc)
    except (InvalidStateError, NonSymplecticError) as exc:
        kind, code, message = "validation", EXIT_VALIDATION, str(exc)
    except (SingularityError, NoPrincipalLogError) as exc:
        kind, code, message = "singular", EXIT_NUMERICAL, str(exc)
    except ResourceLimitError as exc:
        kind, code, message = "resource", EXIT_NUMERICAL, str(exc)
    except NumericalAccuracyError as exc:
        kind, code, message = "numerical", EXIT_NUMERICAL, str(exc)
    except ValueError as exc:
        kind, code, message = "validation", EXIT_VALIDATION, str(exc)
    else:
        sys.stdout.write(text)
        return code
    print(f"error[{kind}]: {' '.join(message.split())}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
