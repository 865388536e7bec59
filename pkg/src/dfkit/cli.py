"""Command-line front end.

Usage::

    dfkit validate FILE
    dfkit represent FILE --mode vector|operator
    dfkit classify FILE
    dfkit qmeasure check|represent FILE
    dfkit history FILE
    dfkit opqm FILE
    dfkit fixture NAME

Every analysis subcommand accepts ``--tol``, ``--seed``, ``--output json|text``
and ``--max-atoms``. Exit codes: 0 success / property holds, 1 negative
verdict, 2 input error.
"""

import argparse
import hashlib
import json
import sys

import numpy as np

from . import __version__
from .errors import DFKitError
from .events import grade2_check, grade2_pairwise_check, indicator_matrix, interference
from .functional import (
    EVENT_TABLE_MAX_ATOMS,
    check_axioms,
    classify_classicality,
    from_event_table,
    validate,
)
from .history import HistoryScenario, cyclicity_criterion, history_operator_rep, induced_functional
from .io import (
    SchemaError,
    encode_real_array,
    functional_doc,
    load_json,
    operator_rep_doc,
    opmeasure_doc,
    parse_functional,
    parse_opmeasure,
    parse_qmeasure,
    parse_scenario,
    qmeasure_doc,
    scenario_doc,
    vector_rep_doc,
)
from .linalg import Tolerance, max_abs
from .opmeasure import (
    OperatorValuedMeasure,
    classify_operator_decoherence,
    grade2_operator_check,
    regularity_check,
)
from .qmeasure import build_qmeasure_rep, strong_positivity
from .representations import analyze_history_space, build_operator_rep, build_vector_rep, is_cyclic
from . import fixtures

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2

# Pair-level verification of representations is exhaustive up to this size.
PAIR_CHECK_MAX_ATOMS = 8


class InputError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, frozenset, set)):
        items = sorted(x) if isinstance(x, (frozenset, set)) else x
        return [_jsonable(v) for v in items]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return 0.0 if x == 0 else x
    if isinstance(x, complex):
        return [_jsonable(x.real), _jsonable(x.imag)]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _labels(space, A):
    return [space.atom_labels[i] for i in space.members(A)]


# -- subcommands ---------------------------------------------------------------
# Each returns (verdicts, holds).


def _load_functional(doc, args, tol):
    parsed = parse_functional(doc, args.max_atoms)
    if "event_table" in parsed:
        return from_event_table(parsed["event_table"], parsed["normalized"], tol, parsed["space"]), parsed
    return validate(parsed["atom_matrix"], parsed["normalized"], tol, parsed["space"]), parsed


def cmd_validate(doc, args, tol):
    parsed = parse_functional(doc, args.max_atoms)
    space = parsed["space"]
    D2 = "pass (atom-matrix storage)"
    violations = []
    if "event_table" in parsed:
        try:
            D = from_event_table(parsed["event_table"], parsed["normalized"], tol, space)
            M = D.atom_matrix
            D2 = "pass (event table checked)"
        except DFKitError as exc:
            violations = exc.violations
            singles = 1 << np.arange(space.n)
            M = parsed["event_table"][np.ix_(singles, singles)]
            if any(v["check"] == "biadditive" for v in violations):
                D2 = "fail"
                violations = violations + check_axioms(M, parsed["normalized"], tol)
    else:
        M = parsed["atom_matrix"]
        violations = check_axioms(M, parsed["normalized"], tol)
    failed = {v["check"] for v in violations}
    H = (M + M.conj().T) / 2
    eigs = np.linalg.eigvalsh(H)[::-1]
    verdicts = {
        "valid": not violations,
        "n_atoms": space.n,
        "axioms": {
            "D1": ("fail" if "normalized" in failed else "pass") if parsed["normalized"] else "not asserted",
            "D2": D2,
            "D3": "fail" if failed & {"hermitian", "psd"} else "pass",
        },
        "violations": violations,
        "eigenvalues": eigs,
        "min_eigenvalue": float(eigs[-1]),
        "total": complex(M.sum()),
    }
    return verdicts, not violations


def _max_pair_error(D, vecs) -> float:
    """Largest |<E(A), E(B)> - D(A, B)| over all event pairs (atoms only for large n)."""
    if D.n <= PAIR_CHECK_MAX_ATOMS:
        EV = indicator_matrix(D.n) @ vecs
        return max_abs(EV @ EV.conj().T - D.event_table())
    return max_abs(vecs @ vecs.conj().T - D.atom_matrix)


def cmd_represent(doc, args, tol):
    D, _ = _load_functional(doc, args, tol)
    if args.mode == "vector":
        rep = build_vector_rep(D, tol)
        return {
            "mode": "vector",
            "dim": rep.dim,
            "max_pair_error": _max_pair_error(D, rep.atom_vectors),
            "representation": vector_rep_doc(rep),
        }, True
    rep = build_operator_rep(D, seed=args.seed, tol=tol)
    return {
        "mode": "operator",
        "dim": rep.dim,
        "cyclic": is_cyclic(rep, tol),
        "floor_achieved": rep.floor_achieved,
        "max_pair_error": _max_pair_error(D, rep.atom_operators @ rep.psi),
        "representation": operator_rep_doc(rep),
    }, True


def cmd_classify(doc, args, tol):
    D, _ = _load_functional(doc, args, tol)
    v = classify_classicality(D, tol)
    out = {
        "classical": v.classical,
        "weakly_classical": v.weakly_classical,
        "criteria": v.criteria,
        "witness": None if v.witness is None else [_labels(D.space, A) for A in v.witness],
    }
    if v.recovered_measure is not None:
        out["recovered_measure"] = encode_real_array(v.recovered_measure)
    return out, v.classical


def cmd_qmeasure(doc, args, tol):
    mu = parse_qmeasure(doc, args.max_atoms)
    g2 = grade2_check(mu, tol)
    pw = grade2_pairwise_check(mu, tol)
    data = interference(mu)
    out = {
        "action": args.action,
        "grade2": {"holds": g2.holds, "worst_violation": g2.worst_violation,
                   "witness": None if g2.witness is None else [_labels(mu.space, A) for A in g2.witness]},
        "grade2_pairwise": {"holds": pw.holds, "worst_violation": pw.worst_violation},
        "interference": data.I,
        "decoherence_matrix": data.Dmat,
        "decoherence_matrix_unhalved": data.unhalved,
    }
    if not g2.holds:
        out["strongly_positive"] = False
        out["error"] = "not grade-2 additive; strong positivity is undefined"
        return out, False
    sp = strong_positivity(mu, tol)
    out.update({
        "strongly_positive": sp.strongly_positive,
        "atom_eigenvalues": sp.atom_eigenvalues,
        "unhalved_eigenvalues": sp.unhalved_eigenvalues,
        "unhalved_psd": sp.unhalved_psd,
        "conventions_disagree": sp.conventions_disagree,
        "convention_note": sp.convention_note,
    })
    if sp.delta_eigenvalues is not None:
        out["delta_min_eigenvalue"] = float(sp.delta_eigenvalues[-1])
    if args.action == "represent":
        if not sp.strongly_positive:
            out["error"] = "not strongly positive; no vector representation exists"
            return out, False
        rep = build_qmeasure_rep(mu, tol)
        norms = np.sum(np.abs(rep.event_vectors()) ** 2, axis=1)
        out["max_reconstruction_error"] = float(np.max(np.abs(norms - mu.values)))
        out["representation"] = vector_rep_doc(rep)
    return out, sp.strongly_positive


def cmd_history(doc, args, tol):
    try:
        s = HistoryScenario(**parse_scenario(doc))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = {"n_histories": s.n_histories}
    try:
        D = induced_functional(s, tol)
    except DFKitError as exc:
        out.update({"valid": False, "violations": exc.violations})
        return out, False
    rep = history_operator_rep(s)
    total = rep.atom_operators.sum(axis=0)
    cyc = cyclicity_criterion(s, tol)
    hs = analyze_history_space(D, rep, tol)
    out.update({
        "valid": True,
        "normalized_total": complex(D.atom_matrix.sum()),
        "total_evolution_error": max_abs(total - s.total_evolution()),
        "cyclic": cyc.cyclic,
        "missing_sites": sorted(cyc.missing_sites),
        "rank_cyclic": cyc.rank_cyclic,
        "dim_K": hs.dim_K,
        "natural_map_unitary": hs.natural_map_unitary,
    })
    if s.n_histories <= EVENT_TABLE_MAX_ATOMS:
        out["qmeasure_grade2"] = grade2_check(D.qmeasure(), tol).holds
    return out, cyc.cyclic


def cmd_opqm(doc, args, tol):
    E = parse_opmeasure(doc, args.max_atoms)
    g2 = grade2_operator_check(E, tol)
    reg = regularity_check(E, tol)
    cls = classify_operator_decoherence(E, tol)
    out = {
        "grade2": {"holds": g2.holds, "worst_violation": g2.worst_violation, "scale": g2.scale},
        "regularity": {"holds": reg.holds, "premises_triggered": reg.premises_triggered,
                       "worst_ratio": reg.worst_ratio},
        "classical": cls.classical,
        "weakly_classical": cls.weakly_classical,
        "criteria": cls.criteria,
        "witness": None if cls.witness is None else list(cls.witness),
    }
    return out, g2.holds and reg.holds


FIXTURES = {
    "two-atom": lambda: functional_doc(fixtures.TWO_ATOM_MATRIX, fixtures.TWO_ATOM_LABELS, True),
    "not-psd": lambda: functional_doc(np.array([[0, 1], [1, 0]]), None, False),
    "interference-only": lambda: qmeasure_doc(fixtures.interference_only_qmeasure()),
    "three-atom": lambda: qmeasure_doc(fixtures.three_atom_qmeasure()),
    "hadamard": lambda: scenario_doc(2, 2, [fixtures.HADAMARD], [1, 0]),
    "orthogonal-projections": lambda: opmeasure_doc(
        OperatorValuedMeasure(np.array([np.diag([1, 0]), np.diag([0, 1])]))),
}

COMMANDS = {
    "validate": cmd_validate,
    "represent": cmd_represent,
    "classify": cmd_classify,
    "qmeasure": cmd_qmeasure,
    "history": cmd_history,
    "opqm": cmd_opqm,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="relative and absolute tolerance (default 1e-9)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized steps (default 0)")
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--max-atoms", type=int, default=12, help="largest accepted sample space (default 12)")

    parser = argparse.ArgumentParser(prog="dfkit", description="Decoherence functional and quantum measure toolkit")
    parser.add_argument("--version", action="version", version=f"dfkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("validate", "classify", "history", "opqm"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("path")
    p = sub.add_parser("represent", parents=[common])
    p.add_argument("path")
    p.add_argument("--mode", choices=("vector", "operator"), default="vector")
    p = sub.add_parser("qmeasure", parents=[common])
    p.add_argument("action", choices=("check", "represent"))
    p.add_argument("path")
    p = sub.add_parser("fixture", help="print a built-in example input")
    p.add_argument("name", choices=sorted(FIXTURES))
    return parser


def _render_text(report: dict) -> str:
    lines = []

    def walk(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                walk(f"{prefix}.{k}" if prefix else k, value[k])
        else:
            lines.append(f"{prefix}: {json.dumps(value)}")

    walk("", report)
    return "\n".join(lines) + "\n"


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    if args.command == "fixture":
        stdout.write(json.dumps(FIXTURES[args.name](), indent=2, sort_keys=True) + "\n")
        return EXIT_OK

    report = {
        "tool": "dfkit",
        "tool_version": __version__,
        "command": args.command if args.command != "qmeasure" else f"qmeasure {args.action}",
        "seed": args.seed,
        "tolerance": {"rel": args.tol, "abs": args.tol},
        "input_digest": None,
    }
    try:
        with open(args.path, "rb") as fh:
            raw = fh.read()
        report["input_digest"] = "sha256:" + hashlib.sha256(raw).hexdigest()
        if args.tol < 0:
            raise InputError("--tol must be nonnegative")
        doc = load_json(raw.decode("utf-8"))
        verdicts, holds = COMMANDS[args.command](doc, args, Tolerance(args.tol, args.tol))
        report["verdicts"] = verdicts
        report["status"] = "holds" if holds else "negative"
        code = EXIT_OK if holds else EXIT_NEGATIVE
    except (OSError, UnicodeDecodeError, SchemaError, InputError) as exc:
        report["status"] = "input_error"
        report["error"] = str(exc)
        code = EXIT_INPUT
    except DFKitError as exc:
        report["status"] = "negative"
        report["error"] = str(exc)
        report["violations"] = exc.violations
        code = EXIT_NEGATIVE

    report = _jsonable(report)
    if args.output == "json":
        stdout.write(json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n")
    else:
        stdout.write(_render_text(report))
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
