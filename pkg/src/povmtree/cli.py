"""Command-line frontend.

Subcommands: validate, compile, simulate, cost, example-tetrad.
Exit codes: 0 success, 1 validation failure, 2 parse/usage error,
3 internal verification failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import cost as cost_model
from . import io as treeio
from .errors import (
    CompletenessViolationError,
    DimensionMismatchError,
    IncompleteSumError,
    InconsistentChildrenError,
    InvalidDimensionsError,
    NotCompleteError,
    NotHermitianError,
    NotIsometryError,
    NotPsdError,
    NotUnitaryError,
    ParseError,
    PovmTreeError,
)
from .linalg import DEFAULT_TOLERANCES, Tolerances, frobenius, hermitian_eig
from .povm import pad_to_power_of_two, tetrad
from .simulator import QuantumState, direct_probabilities, propagate, sample, random_density
from .tree import compile_tree, verify

_VALIDATION_ERRORS = (
    NotHermitianError,
    NotPsdError,
    IncompleteSumError,
    DimensionMismatchError,
    NotUnitaryError,
)
_VERIFICATION_ERRORS = (
    InconsistentChildrenError,
    CompletenessViolationError,
    NotCompleteError,
    NotIsometryError,
)


def _tolerances(args) -> Tolerances:
    if getattr(args, "tol", None) is None:
        return DEFAULT_TOLERANCES
    return Tolerances(tol_check=args.tol)


def _parse_grouping(text: str, n_outcomes: int) -> list[int]:
    """Turn '0,3|1,2' into the flat outcome permutation [0, 3, 1, 2]."""
    try:
        order = [int(piece) for group in text.split("|") for piece in group.split(",")]
    except ValueError as err:
        raise ValueError(f"invalid grouping string {text!r}: {err}") from err
    if sorted(order) != list(range(n_outcomes)):
        raise ValueError(
            f"grouping {text!r} is not a permutation of outcomes 0..{n_outcomes - 1}"
        )
    return order


def _parse_state(spec: str, dim: int) -> QuantumState:
    if spec.startswith("pure:"):
        return QuantumState.basis(dim, int(spec.split(":", 1)[1]))
    if spec == "mixed:max":
        return QuantumState.maximally_mixed(dim)
    return treeio.load_state(spec)


def _format_matrix(m: np.ndarray) -> str:
    return np.array2string(np.asarray(m), precision=6, suppress_small=True)


def cmd_validate(args) -> int:
    tol = _tolerances(args)
    povm = treeio.load_povm(args.path, tol=tol)
    identity = np.eye(povm.dim)
    total = sum(povm.elements)
    print(f"POVM: {povm.n_outcomes} outcomes on dimension {povm.dim}")
    for j, m in enumerate(povm.elements):
        herm = frobenius(m - m.conj().T)
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        print(
            f"  element {povm.labels[j]!r}: hermiticity residual {herm:.3e}, "
            f"min eigenvalue {min_eig:+.3e}"
        )
    print(f"  completeness residual |sum - I|_F = {frobenius(total - identity):.3e}")
    print("valid")
    return 0


def cmd_compile(args) -> int:
    tol = _tolerances(args)
    povm = treeio.load_povm(args.path, tol=tol)
    padded = pad_to_power_of_two(povm)
    if padded.n_outcomes != povm.n_outcomes:
        print(
            f"note: padding {povm.n_outcomes} outcomes to {padded.n_outcomes} "
            f"with zero operators {list(padded.padding_labels)}"
        )
    partition = None
    if args.grouping is not None:
        try:
            partition = _parse_grouping(args.grouping, povm.n_outcomes)
        except ValueError as err:
            print(f"error: {err}", file=sys.stderr)
            return 2
    tree = compile_tree(povm, partition=partition, tol=tol)
    report = verify(tree, tol)
    print(report.summary())

    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(5):
        state = random_density(tree.povm.dim, rng)
        exact = propagate(tree, state)
        direct = direct_probabilities(tree.povm, state)
        worst = max(
            worst, float(np.max(np.abs(np.array([o.probability for o in exact]) - direct)))
        )
    print(f"cross-check vs direct probabilities (5 random states, seed {args.seed}): "
          f"max deviation {worst:.3e}")

    costs = cost_model.compare(tree.povm.n_outcomes, tree.povm.dim)
    print(
        f"operation counts for N={costs.n_outcomes}, d={costs.dim}: "
        f"one-shot extension {costs.neumark_ops}, "
        f"single-extra-dimension {costs.single_extra_dim_ops}, "
        f"binary tree {costs.binary_tree_ops} ({costs.binary_tree_depth} levels)"
    )

    out_path = args.out or str(Path(args.path).with_suffix("")) + ".tree.json"
    treeio.save_tree(tree, out_path)
    print(f"tree written to {out_path}")
    if not report.passed or worst > 1e-8:
        print("verification failed", file=sys.stderr)
        return 3
    return 0


def cmd_simulate(args) -> int:
    tree = treeio.load_tree(args.tree)
    state = _parse_state(args.state, tree.povm.dim)
    outcomes = propagate(tree, state)
    direct = direct_probabilities(tree.povm, state)
    print(f"state: {args.state}; tree: {tree.povm.n_outcomes} outcomes, depth {tree.depth}")
    print("leaf probabilities (tree | direct):")
    for o, p in zip(outcomes, direct):
        reached = "" if o.post_state is not None else "  [unreached]"
        print(f"  {o.leaf_label:>8}  path {o.path or '-':>6}  "
              f"{o.probability:.10f} | {p:.10f}{reached}")
    deviation = float(np.max(np.abs(np.array([o.probability for o in outcomes]) - direct)))
    print(f"max tree-vs-direct deviation: {deviation:.3e}")
    if args.shots > 0:
        report = sample(tree, state, args.shots, args.seed)
        print(f"sampling: {report.shots} shots, seed {report.seed}")
        for label, count, p in zip(report.labels, report.counts, report.expected):
            print(f"  {label:>8}  count {count:>10}  frequency {count / report.shots:.6f}  "
                  f"expected {p:.6f}")
        print(f"max deviation: {report.max_sigma_deviation:.3f} sigma")
    agreement = args.tol if args.tol is not None else 1e-8
    if deviation > agreement:
        print("tree and direct probabilities disagree", file=sys.stderr)
        return 3
    return 0


def cmd_cost(args) -> int:
    report = cost_model.compare(args.n, args.d, average=args.average)
    print(f"N = {report.n_outcomes}, d = {report.dim}")
    print(f"  one-shot projective extension : {report.neumark_ops}")
    line = f"  single extra dimension        : {report.single_extra_dim_ops}"
    if report.single_extra_dim_ops_average is not None:
        line += f" (average {report.single_extra_dim_ops_average:g} if outcomes equally likely)"
    print(line)
    print(
        f"  binary measurement tree       : {report.binary_tree_ops} "
        f"({report.binary_tree_depth} levels)"
    )
    if args.crossover:
        n_star = cost_model.crossover(args.d)
        print(f"  tree strictly cheapest from N = {n_star}")
    return 0


def cmd_example_tetrad(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    povm = tetrad()
    povm_path = out_dir / "tetrad.povm.json"
    treeio.save_povm(povm, povm_path)

    tree = compile_tree(povm, partition=[0, 3, 1, 2])
    tree_path = out_dir / "tetrad.tree.json"
    treeio.save_tree(tree, tree_path)
    report = verify(tree)

    lines = []
    lines.append("Tetrad measurement walkthrough")
    lines.append("==============================")
    lines.append("")
    lines.append("Four rank-one outcome operators M_0..M_3 on a qubit; the tree groups")
    lines.append("outcomes {0,3} versus {1,2} at the first level.")
    lines.append("")
    m03 = tree.root.children[0].cumulative_operator
    m12 = tree.root.children[1].cumulative_operator
    lines.append("First-level grouped operators:")
    lines.append(f"M03 =\n{_format_matrix(m03)}")
    lines.append(f"M12 =\n{_format_matrix(m12)}")
    eig = hermitian_eig(m03)
    lines.append("")
    lines.append(f"eigenvalues of M03: {eig.eigenvalues[0]:.12f}, {eig.eigenvalues[1]:.12f}")
    lines.append(f"eigenvectors (columns):\n{_format_matrix(eig.eigenvectors)}")
    lines.append("")
    lines.append("Probe coupling unitary at the root (first block column = [sqrt(M03); sqrt(M12)]):")
    lines.append(_format_matrix(tree.root.dilation.unitary))
    lines.append("")
    lines.append("Second-stage measurement operators B_j = b_j^dag b_j:")
    for j in range(4):
        leaf = tree.leaf_for_outcome(j)
        b = leaf.node_kraus
        lines.append(f"B{j} =\n{_format_matrix(b.conj().T @ b)}")
    b0 = tree.leaf_for_outcome(0).node_kraus
    b3 = tree.leaf_for_outcome(3).node_kraus
    closure = frobenius(b0.conj().T @ b0 + b3.conj().T @ b3 - np.eye(2))
    lines.append("")
    lines.append(f"completeness |B0 + B3 - I|_F = {closure:.3e}")
    lines.append(report.summary())
    state = QuantumState.basis(2, 0)
    probs = [o.probability for o in propagate(tree, state)]
    lines.append("")
    lines.append(f"leaf probabilities for |0><0|: {probs[0]:.6f}, {probs[1]:.6f}, "
                 f"{probs[2]:.6f}, {probs[3]:.6f}  (exact: 1/2, 1/6, 1/6, 1/6)")
    walkthrough = out_dir / "walkthrough.txt"
    walkthrough.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {povm_path}")
    print(f"wrote {tree_path}")
    print(f"wrote {walkthrough}")
    if not report.passed:
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="povmtree",
        description="Compile POVMs into binary trees of two-outcome probe measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a POVM file")
    p_validate.add_argument("path", help="POVM JSON file")
    p_validate.add_argument("--tol", type=float, default=None, help="validation threshold")
    p_validate.set_defaults(func=cmd_validate)

    p_compile = sub.add_parser("compile", help="compile a POVM file into a tree file")
    p_compile.add_argument("path", help="POVM JSON file")
    p_compile.add_argument(
        "--grouping",
        default=None,
        help="pipe-separated outcome groups, e.g. '0,3|1,2', read left to right",
    )
    p_compile.add_argument("--seed", type=int, default=0,
                           help="seed for the random-state cross-check")
    p_compile.add_argument("--tol", type=float, default=None, help="validation threshold")
    p_compile.add_argument("--out", default=None, help="output tree file")
    p_compile.set_defaults(func=cmd_compile)

    p_sim = sub.add_parser("simulate", help="run a compiled tree on a state")
    p_sim.add_argument("tree", help="tree JSON file")
    p_sim.add_argument(
        "--state",
        default="mixed:max",
        help="state spec: 'pure:<k>', 'mixed:max', or a state JSON file",
    )
    p_sim.add_argument("--shots", type=int, default=0, help="number of sampled shots")
    p_sim.add_argument("--seed", type=int, default=0, help="sampling seed")
    p_sim.add_argument("--tol", type=float, default=None,
                       help="tree-vs-direct agreement threshold (default requires 1e-8)")
    p_sim.set_defaults(func=cmd_simulate)

    p_cost = sub.add_parser("cost", help="operation-count comparison")
    p_cost.add_argument("n", type=int, help="number of outcomes N")
    p_cost.add_argument("d", type=int, help="system dimension d")
    p_cost.add_argument("--average", action="store_true",
                        help="also report the equal-likelihood average for the iterated method")
    p_cost.add_argument("--crossover", action="store_true",
                        help="report the N from which the tree is strictly cheapest")
    p_cost.set_defaults(func=cmd_cost)

    p_ex = sub.add_parser("example-tetrad", help="emit and compile the bundled tetrad POVM")
    p_ex.add_argument("--out", default="tetrad-example", help="output directory")
    p_ex.set_defaults(func=cmd_example_tetrad)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except InvalidDimensionsError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except _VALIDATION_ERRORS as err:
        print(f"invalid: {err}", file=sys.stderr)
        return 1
    except _VERIFICATION_ERRORS as err:
        print(f"verification error: {err}", file=sys.stderr)
        return 3
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except PovmTreeError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
