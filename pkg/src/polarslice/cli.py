"""Command-line entry point.

Exit codes: 0 ok, 2 invalid input, 3 numeric failure, 4 expectation mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import catalog, polarity, rep as rep_io, transfer

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERIC = 3
EXIT_MISMATCH = 4


@dataclass
class CommandResult:
    exit_code: int
    payload: Any = None
    text: str = ""
    error: str | None = None
    format: str = "text"


class _Mismatch(Exception):
    def __init__(self, payload, text):
        self.payload = payload
        self.text = text


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _read_matrix(path: str) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    A = np.array(data, dtype=float)
    if A.ndim != 2:
        raise ValueError(f"{path}: expected a JSON array of rows")
    return A


def _meta(args) -> dict:
    return {"seed": args.seed, "trials": args.trials, "tol": args.tol}


def _matrix_text(M) -> str:
    return "\n".join("  " + " ".join(f"{x: .12g}" for x in row) for row in np.asarray(M))


# -- handlers -------------------------------------------------------------------


def _catalog_list(args):
    items = [
        {
            "family_id": t.family_id,
            "params": {k: {"min": lo} for k, lo in t.params.items()},
            "requires_n_le_m": t.n_le_m,
            "description": t.description,
            "reference": t.reference,
            "smallest": t.smallest,
            "polar": t.polar,
        }
        for t in catalog.catalog_list()
    ]
    text = "\n".join(f"{t['family_id']:<22} {t['description']}" for t in items)
    return items, text


def _catalog_export(args):
    params = {k: v for k, v in (("n", args.n), ("m", args.m)) if v is not None}
    rep, _ = catalog.catalog_build(args.family_id, **params)
    if args.out:
        rep_io.save(rep, args.out)
        return {"name": rep.name, "dim": rep.dim, "out": args.out}, f"wrote {rep.name} (dim {rep.dim}) to {args.out}"
    return rep_io.to_dict(rep), rep_io.dumps(rep)


def _polarity_test(args):
    rep = rep_io.load(args.rep)
    report = polarity.polarity_test(rep, args.seed, args.trials, method=args.method)
    payload = report.to_dict()
    payload["name"] = rep.name
    text = (
        f"{rep.name}: {report.verdict.value}  orbit_dim={report.orbit_dim} "
        f"cohomogeneity={report.cohomogeneity} samples={report.trials}"
    )
    if report.witness is not None:
        text += f"\nwitness: generator {report.witness.generator_index} fails at seed {report.used_samples()[0].seed}"
    if args.expect is not None:
        wanted = polarity.Verdict.POLAR if args.expect == "polar" else polarity.Verdict.NOT_POLAR
        payload["expect"] = wanted.value
        payload["expectation_met"] = report.verdict is wanted
        if report.verdict is not wanted:
            raise _Mismatch(payload, text + f"\nexpected {wanted.value}")
    return payload, text


def _polarity_slice(args):
    rep = rep_io.load(args.rep)
    report = polarity.polarity_test(rep, args.seed, args.trials, method=args.method)
    if report.verdict is not polarity.Verdict.POLAR:
        raise ValueError(f"{rep.name} is not polar; no slice to extract")
    v = report.used_samples()[0].vector
    sl = polarity.extract_slice(rep, v, orbit_dim=report.orbit_dim)
    check = polarity.verify_slice(rep, sl, args.seed, args.trials)
    if check.certified:
        sl = sl.certified()
    payload = {
        "name": rep.name,
        "dim": rep.dim,
        "status": sl.status.value,
        "slice": sl.rref().to_strings() if sl.dim else [],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1)
            fh.write("\n")
        payload["out"] = args.out
    text = f"{rep.name}: slice of dimension {sl.dim} ({sl.status.value})\n" + "\n".join(
        "  " + " ".join(vec) for vec in payload["slice"]
    )
    return payload, text


def _spectrum_problem(args):
    if args.lambda_ is None:
        raise ValueError("--lambda is required")
    return transfer.SpectrumProblem(_read_matrix(args.data), args.lambda_)


def _singular_problem(args):
    if args.sigma is None:
        raise ValueError("--sigma is required")
    return transfer.SingularValueProblem(_read_matrix(args.data), args.sigma)


def _nearest(args):
    if args.family == "spectrum":
        problem = _spectrum_problem(args)
        B = transfer.nearest_with_spectrum(problem, args.tol)
    else:
        problem = _singular_problem(args)
        B = transfer.nearest_with_singular_values(problem, args.tol)
    dist = float(np.sum((problem.data - B) ** 2))
    payload = {"point": B.tolist(), "squared_distance": dist}
    return payload, f"nearest point (squared distance {dist:.12g}):\n{_matrix_text(B)}"


def _critical(args):
    if args.family == "spectrum":
        crit = transfer.critical_points_spectrum(_spectrum_problem(args), args.tol)
    else:
        crit = transfer.critical_points_singular_values(_singular_problem(args), args.tol)
    payload = {
        "ed_degree_expected": crit.ed_degree_expected,
        "count": len(crit),
        "points": [P.tolist() for P in crit.points],
        "assignments": [list(a) for a in crit.assignments],
        "squared_distances": crit.distances.tolist(),
        "residuals": crit.residuals.tolist(),
    }
    lines = [f"{len(crit)} critical points (expected {crit.ed_degree_expected})"]
    for a, d, r in zip(crit.assignments, crit.distances, crit.residuals):
        lines.append(f"  diag {list(a)}  squared distance {d:.12g}  residual {r:.2e}")
    return payload, "\n".join(lines)


def _eddeg(args):
    if args.kind == "spectrum":
        if args.lambda_ is None:
            raise ValueError("--lambda is required")
        value = transfer.ed_degree_spectrum(args.lambda_)
    else:
        if args.n is None:
            raise ValueError("--n is required")
        value = transfer.ed_degree_adjoint_orbit(args.n)
    return value, str(value)


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="text")
    common.add_argument("--seed", type=int, default=polarity.DEFAULT_SEED)
    common.add_argument("--trials", type=int, default=polarity.DEFAULT_TRIALS)
    common.add_argument("--tol", type=float, default=transfer.DEFAULT_TOL)
    common.add_argument("--out", default=None)

    parser = argparse.ArgumentParser(prog="polarslice", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="group", required=True)

    cat = sub.add_parser("catalog", help="built-in representations").add_subparsers(dest="action", required=True)
    p = cat.add_parser("list", parents=[common])
    p.set_defaults(handler=_catalog_list)
    p = cat.add_parser("export", parents=[common])
    p.add_argument("family_id")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.set_defaults(handler=_catalog_export)

    pol = sub.add_parser("polarity", help="polarity test and slices").add_subparsers(dest="action", required=True)
    p = pol.add_parser("test", parents=[common])
    p.add_argument("rep")
    p.add_argument("--expect", choices=("polar", "not-polar"))
    p.add_argument("--method", choices=("auto", "exact"), default="auto")
    p.set_defaults(handler=_polarity_test)
    p = pol.add_parser("slice", parents=[common])
    p.add_argument("rep")
    p.add_argument("--method", choices=("auto", "exact"), default="auto")
    p.set_defaults(handler=_polarity_slice)

    def add_problem_args(p):
        p.add_argument("family", choices=("spectrum", "singular"))
        p.add_argument("--data", required=True)
        p.add_argument("--lambda", dest="lambda_", type=_floats)
        p.add_argument("--sigma", type=_floats)

    p = sub.add_parser("nearest", parents=[common], help="closest point on the variety")
    add_problem_args(p)
    p.set_defaults(handler=_nearest)

    crit = sub.add_parser("critical", help="ED critical points").add_subparsers(dest="action", required=True)
    p = crit.add_parser("enumerate", parents=[common])
    add_problem_args(p)
    p.set_defaults(handler=_critical)

    p = sub.add_parser("eddeg", parents=[common], help="ED degree counts")
    p.add_argument("kind", choices=("spectrum", "adjoint"))
    p.add_argument("--lambda", dest="lambda_", type=_floats)
    p.add_argument("--n", type=int)
    p.set_defaults(handler=_eddeg)
    return parser


def dispatch(argv: Sequence[str]) -> CommandResult:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:  # argparse already wrote usage to stderr
        return CommandResult(int(exc.code or 0))
    command = " ".join(x for x in (args.group, getattr(args, "action", None),
                                   getattr(args, "family", None) or getattr(args, "kind", None)) if x)
    envelope = lambda result: {"command": command, "result": result, "meta": _meta(args)}
    try:
        result, text = args.handler(args)
    except _Mismatch as exc:
        return CommandResult(EXIT_MISMATCH, envelope(exc.payload), exc.text, format=args.format)
    except (transfer.NumericError, polarity.PolarityError) as exc:
        return CommandResult(EXIT_NUMERIC, error=f"numeric failure: {exc}", format=args.format)
    except (ValueError, TypeError, OSError) as exc:
        return CommandResult(EXIT_INVALID, error=f"invalid input: {exc}", format=args.format)
    return CommandResult(EXIT_OK, envelope(result), text, format=args.format)


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    res = dispatch(argv)
    if res.error:
        print(res.error, file=sys.stderr)
    if res.payload is not None:
        if res.format == "json":
            print(json.dumps(res.payload, sort_keys=True))
        else:
            print(res.text)
    return res.exit_code


if __name__ == "__main__":
    sys.exit(main())
