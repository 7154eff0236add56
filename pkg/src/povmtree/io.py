"""JSON file formats for POVMs, states, and compiled trees.

Complex entries are stored as two-element ``[real, imaginary]`` arrays.
Floats go through Python's shortest round-trip representation, so
serialize/deserialize reproduces every matrix bit-exactly.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import ParseError
from .linalg import Tolerances
from .povm import Povm, validate
from .simulator import QuantumState
from .tree import MeasurementTree, SplitCoefficients, TreeNode
from .dilation import KrausPair, NodeDilation

POVM_FORMAT = "povmtree/povm-v1"
STATE_FORMAT = "povmtree/state-v1"
TREE_FORMAT = "povmtree/tree-v1"


def encode_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def decode_matrix(obj: Any, field: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError("matrix must be a non-empty list of rows", field=field)
    rows = []
    width = None
    for row in obj:
        if not isinstance(row, list) or (width is not None and len(row) != width):
            raise ParseError("matrix rows must be lists of equal length", field=field)
        width = len(row)
        entries = []
        for entry in row:
            if not (isinstance(entry, list) and len(entry) == 2):
                raise ParseError(
                    "matrix entries must be [real, imaginary] pairs", field=field
                )
            entries.append(complex(float(entry[0]), float(entry[1])))
        rows.append(entries)
    return np.array(rows, dtype=complex)


def _require(mapping: dict, key: str) -> Any:
    if key not in mapping:
        raise ParseError("missing required field", field=key)
    return mapping[key]


def _load_json(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as err:
        raise ParseError(f"invalid JSON at line {err.lineno}, column {err.colno}: {err.msg}") from err
    if not isinstance(data, dict):
        raise ParseError("top-level JSON value must be an object")
    return data


def povm_to_dict(p: Povm) -> dict:
    return {
        "format": POVM_FORMAT,
        "dimension": p.dim,
        "elements": [encode_matrix(m) for m in p.elements],
        "labels": list(p.labels),
        "n_original": p.n_original,
    }


def povm_from_dict(data: dict, tol: Tolerances | None = None) -> Povm:
    dim = int(_require(data, "dimension"))
    raw = _require(data, "elements")
    if not isinstance(raw, list) or not raw:
        raise ParseError("elements must be a non-empty list", field="elements")
    elements = [decode_matrix(m, f"elements[{j}]") for j, m in enumerate(raw)]
    for j, m in enumerate(elements):
        if m.shape != (dim, dim):
            raise ParseError(
                f"element {j} has shape {m.shape}, expected ({dim}, {dim})",
                field=f"elements[{j}]",
            )
    labels = data.get("labels")
    if tol is None:
        p = validate(elements, labels=labels)
    else:
        p = validate(elements, labels=labels, tol=tol)
    n_original = int(data.get("n_original", p.n_outcomes))
    if n_original != p.n_outcomes:
        p = Povm(dim=p.dim, elements=p.elements, labels=p.labels, n_original=n_original)
    return p


def save_povm(p: Povm, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(povm_to_dict(p), handle, indent=1)


def load_povm(path, tol: Tolerances | None = None) -> Povm:
    return povm_from_dict(_load_json(path), tol=tol)


def state_to_dict(state: QuantumState) -> dict:
    return {
        "format": STATE_FORMAT,
        "dimension": state.dim,
        "density": encode_matrix(state.density),
    }


def state_from_dict(data: dict) -> QuantumState:
    dim = int(_require(data, "dimension"))
    rho = decode_matrix(_require(data, "density"), "density")
    if rho.shape != (dim, dim):
        raise ParseError(
            f"density has shape {rho.shape}, expected ({dim}, {dim})", field="density"
        )
    return QuantumState(rho)


def save_state(state: QuantumState, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(state_to_dict(state), handle, indent=1)


def load_state(path) -> QuantumState:
    return state_from_dict(_load_json(path))


def tree_to_dict(tree: MeasurementTree) -> dict:
    nodes = []
    for node in tree.iter_nodes():
        nodes.append(
            {
                "path": node.path,
                "outcome_set": list(node.outcome_set),
                "cumulative_kraus": encode_matrix(node.cumulative_kraus),
                "cumulative_operator": encode_matrix(node.cumulative_operator),
                "node_kraus": None
                if node.node_kraus is None
                else encode_matrix(node.node_kraus),
                "dilation": None
                if node.dilation is None
                else encode_matrix(node.dilation.unitary),
            }
        )
    coeffs = tree.split_coefficients
    tol = tree.tolerances
    return {
        "format": TREE_FORMAT,
        "dimension": tree.povm.dim,
        "n_outcomes": tree.povm.n_outcomes,
        "depth": tree.depth,
        "split_coefficients": [
            [coeffs.a0.real, coeffs.a0.imag],
            [coeffs.a1.real, coeffs.a1.imag],
        ],
        "tolerances": {
            "tol_rank": tol.tol_rank,
            "tol_check": tol.tol_check,
            "tol_unitary": tol.tol_unitary,
        },
        "povm": povm_to_dict(tree.povm),
        "nodes": nodes,
    }


def tree_from_dict(data: dict) -> MeasurementTree:
    dim = int(_require(data, "dimension"))
    depth = int(_require(data, "depth"))
    povm = povm_from_dict(_require(data, "povm"))
    coeff_raw = _require(data, "split_coefficients")
    try:
        coeffs = SplitCoefficients(
            a0=complex(coeff_raw[0][0], coeff_raw[0][1]),
            a1=complex(coeff_raw[1][0], coeff_raw[1][1]),
        )
    except (TypeError, IndexError) as err:
        raise ParseError("split_coefficients must be two [re, im] pairs",
                         field="split_coefficients") from err
    tol_raw = _require(data, "tolerances")
    tolerances = Tolerances(
        tol_rank=float(_require(tol_raw, "tol_rank")),
        tol_check=float(_require(tol_raw, "tol_check")),
        tol_unitary=float(_require(tol_raw, "tol_unitary")),
    )
    raw_nodes = _require(data, "nodes")
    records: dict[str, dict] = {}
    for rec in raw_nodes:
        records[str(_require(rec, "path"))] = rec

    def build(path: str) -> TreeNode:
        rec = records.get(path)
        if rec is None:
            raise ParseError("node record missing", field=f"nodes[path={path!r}]")
        outcome_set = tuple(int(j) for j in _require(rec, "outcome_set"))
        cum_kraus = decode_matrix(
            _require(rec, "cumulative_kraus"), f"nodes[{path!r}].cumulative_kraus"
        )
        cum_op = decode_matrix(
            _require(rec, "cumulative_operator"), f"nodes[{path!r}].cumulative_operator"
        )
        raw_b = rec.get("node_kraus")
        node_kraus = None if raw_b is None else decode_matrix(raw_b, f"nodes[{path!r}].node_kraus")
        children: tuple[TreeNode, ...] = ()
        kraus_pair = None
        dilation = None
        if path + "0" in records:
            left = build(path + "0")
            right = build(path + "1")
            children = (left, right)
            if left.node_kraus is None or right.node_kraus is None:
                raise ParseError(
                    "internal node children must carry node_kraus",
                    field=f"nodes[path={path!r}]",
                )
            kraus_pair = KrausPair(b0=left.node_kraus, b1=right.node_kraus)
            raw_u = rec.get("dilation")
            if raw_u is not None:
                dilation = NodeDilation(
                    unitary=decode_matrix(raw_u, f"nodes[{path!r}].dilation"),
                    system_dim=dim,
                )
        return TreeNode(
            path=path,
            outcome_set=outcome_set,
            cumulative_kraus=cum_kraus,
            cumulative_operator=cum_op,
            node_kraus=node_kraus,
            kraus_pair=kraus_pair,
            dilation=dilation,
            children=children,
        )

    root = build("")
    return MeasurementTree(
        povm=povm, root=root, depth=depth, split_coefficients=coeffs, tolerances=tolerances
    )


def save_tree(tree: MeasurementTree, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(tree_to_dict(tree), handle, indent=1)


def load_tree(path) -> MeasurementTree:
    return tree_from_dict(_load_json(path))
