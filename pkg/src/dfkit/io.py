"""JSON encoding: complex numbers as ``[re, im]``, matrices as nested row-major lists."""

import json

import numpy as np

from .events import EventSpace, QMeasure
from .opmeasure import OperatorValuedMeasure
from .representations import OperatorRep, VectorRep


class SchemaError(ValueError):
    """Input file does not match the expected schema."""


def encode_complex(z):
    z = complex(z)
    return [_clean(z.real), _clean(z.imag)]


def _clean(x: float) -> float:
    # normalize -0.0 so reports are byte-stable
    x = float(x)
    return 0.0 if x == 0 else x


def encode_array(a):
    a = np.asarray(a)
    if a.ndim == 0:
        return encode_complex(a)
    return [encode_array(x) for x in a]


def encode_real_array(a):
    return [_clean(x) for x in np.asarray(a, dtype=float).ravel()]


def decode_complex(v):
    if isinstance(v, bool):
        raise SchemaError(f"expected a number or [re, im], got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
        return complex(v[0], v[1])
    raise SchemaError(f"expected a number or [re, im], got {v!r}")


def decode_matrix(rows, name="matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise SchemaError(f"{name} must be a non-empty list of rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise SchemaError(f"{name} rows have unequal lengths")
    return np.array([[decode_complex(x) for x in r] for r in rows], dtype=complex)


def decode_vector(items, name="vector") -> np.ndarray:
    if not isinstance(items, list) or not items:
        raise SchemaError(f"{name} must be a non-empty list")
    return np.array([decode_complex(x) for x in items], dtype=complex)


def load_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("top-level JSON value must be an object")
    return doc


def _require(doc, key):
    if key not in doc:
        raise SchemaError(f"missing key {key!r}")
    return doc[key]


def _space(doc, n, max_atoms) -> EventSpace:
    labels = doc.get("atoms")
    if labels is None:
        labels = [str(i + 1) for i in range(n)]
    if not isinstance(labels, list) or len(labels) != n:
        raise SchemaError(f"'atoms' must list {n} labels")
    try:
        return EventSpace(tuple(labels), max_atoms=max_atoms)
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def parse_functional(doc: dict, max_atoms: int = 12):
    """Atom matrix (or full event table), space, and normalization flag."""
    normalized = doc.get("normalized", False)
    if not isinstance(normalized, bool):
        raise SchemaError("'normalized' must be a boolean")
    if "atom_matrix" in doc:
        M = decode_matrix(doc["atom_matrix"], "atom_matrix")
        if M.shape[0] != M.shape[1]:
            raise SchemaError(f"atom_matrix must be square, got {M.shape}")
        return {"atom_matrix": M, "space": _space(doc, M.shape[0], max_atoms), "normalized": normalized}
    if "event_table" in doc:
        T = decode_matrix(doc["event_table"], "event_table")
        N = T.shape[0]
        n = N.bit_length() - 1
        if T.shape != (N, N) or N != 1 << n or n < 1:
            raise SchemaError(f"event_table must be 2^n x 2^n, got {T.shape}")
        return {"event_table": T, "space": _space(doc, n, max_atoms), "normalized": normalized}
    raise SchemaError("functional needs 'atom_matrix' or 'event_table'")


def parse_qmeasure(doc: dict, max_atoms: int = 12) -> QMeasure:
    values = _require(doc, "values")
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise SchemaError("'values' must be a list of reals")
    N = len(values)
    n = N.bit_length() - 1
    if N < 2 or N != 1 << n:
        raise SchemaError(f"'values' must have 2^n entries, got {N}")
    space = _space(doc, n, max_atoms)
    try:
        return QMeasure(space, np.array(values, dtype=float))
    except ValueError as exc:
        raise SchemaError(str(exc)) from None


def parse_scenario(doc: dict) -> dict:
    n = _require(doc, "sites")
    N = _require(doc, "times")
    if not isinstance(n, int) or not isinstance(N, int):
        raise SchemaError("'sites' and 'times' must be integers")
    steps = _require(doc, "steps")
    if not isinstance(steps, list):
        raise SchemaError("'steps' must be a list of matrices")
    mats = [decode_matrix(s, f"steps[{k}]") for k, s in enumerate(steps)]
    if len(mats) != N - 1 or any(m.shape != (n, n) for m in mats):
        raise SchemaError(f"'steps' must hold {N - 1} matrices of size {n}x{n}")
    psi = decode_vector(_require(doc, "psi"), "psi")
    if psi.shape != (n,):
        raise SchemaError(f"'psi' must have {n} entries")
    return {"n_sites": n, "n_times": N, "step_unitaries": np.array(mats).reshape(N - 1, n, n),
            "initial_state": psi}


def parse_opmeasure(doc: dict, max_atoms: int = 12) -> OperatorValuedMeasure:
    m = _require(doc, "dim")
    ops = _require(doc, "operators")
    if not isinstance(m, int) or m < 1:
        raise SchemaError("'dim' must be a positive integer")
    if not isinstance(ops, list) or not ops:
        raise SchemaError("'operators' must be a non-empty list of matrices")
    if len(ops) > max_atoms:
        raise SchemaError(f"{len(ops)} atoms exceeds --max-atoms {max_atoms}")
    mats = [decode_matrix(o, f"operators[{k}]") for k, o in enumerate(ops)]
    if any(x.shape != (m, m) for x in mats):
        raise SchemaError(f"every operator must be {m}x{m}")
    return OperatorValuedMeasure(np.array(mats))


def functional_doc(atom_matrix, labels=None, normalized=False) -> dict:
    M = np.asarray(atom_matrix)
    labels = list(labels) if labels is not None else [str(i + 1) for i in range(M.shape[0])]
    return {"atoms": labels, "atom_matrix": encode_array(M), "normalized": bool(normalized)}


def qmeasure_doc(mu: QMeasure) -> dict:
    return {"atoms": list(mu.space.atom_labels), "values": encode_real_array(mu.values)}


def scenario_doc(n_sites, n_times, steps, psi) -> dict:
    return {"sites": int(n_sites), "times": int(n_times), "steps": [encode_array(s) for s in steps],
            "psi": encode_array(psi)}


def opmeasure_doc(E: OperatorValuedMeasure) -> dict:
    return {"dim": E.dim, "operators": [encode_array(x) for x in E.atom_operators]}


def vector_rep_doc(rep) -> dict:
    return {"kind": "vector", "dim": rep.dim, "vectors": encode_array(rep.atom_vectors)}


def operator_rep_doc(rep) -> dict:
    return {
        "kind": "operator",
        "dim": rep.dim,
        "operators": [encode_array(P) for P in rep.atom_operators],
        "psi": encode_array(rep.psi),
        "seed": rep.seed,
        "floor_achieved": rep.floor_achieved,
    }


def parse_rep(doc: dict):
    """Inverse of :func:`vector_rep_doc` / :func:`operator_rep_doc`."""
    kind = _require(doc, "kind")
    dim = _require(doc, "dim")
    if kind == "vector":
        rows = _require(doc, "vectors")
        if dim == 0:
            return VectorRep(np.zeros((len(rows), 0), dtype=complex))
        return VectorRep(np.array([[decode_complex(x) for x in r] for r in rows], dtype=complex))
    if kind == "operator":
        ops = np.array([decode_matrix(P) for P in _require(doc, "operators")])
        return OperatorRep(ops, decode_vector(_require(doc, "psi")), seed=doc.get("seed"),
                           floor_achieved=doc.get("floor_achieved"))
    raise SchemaError(f"unknown representation kind {kind!r}")
