"""POVM modelling: validation, Kraus factorizations, padding, and generators.

A POVM is a set of positive semidefinite operators that sum to the identity.
This module checks those invariants, produces Kraus factorizations
``M_j = m_j^dag m_j`` (with optional unitary freedom ``m_j -> V_j m_j``),
pads outcome sets to a power of two for tree compilation, and provides
reproducible random POVM generators plus the tetrad (qubit SIC) example.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatchError,
    IncompleteSumError,
    NotHermitianError,
    NotPsdError,
    NotUnitaryError,
)
from .linalg import DEFAULT_TOLERANCES, Tolerances, as_complex_matrix, frobenius, psd_sqrt


def _frozen(m: np.ndarray) -> np.ndarray:
    out = np.array(m, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Povm:
    """Validated POVM: ``elements[j]`` is the operator for outcome ``labels[j]``.

    ``n_original`` counts the outcomes present before any padding; indices at
    or beyond it belong to zero operators appended by
    :func:`pad_to_power_of_two` and are never reachable in simulation.
    """

    dim: int
    elements: tuple[np.ndarray, ...]
    labels: tuple[str, ...]
    n_original: int

    @property
    def n_outcomes(self) -> int:
        return len(self.elements)

    def is_padding(self, index: int) -> bool:
        return index >= self.n_original

    @property
    def padding_labels(self) -> tuple[str, ...]:
        return self.labels[self.n_original :]


def validate(elements, labels=None, tol: Tolerances = DEFAULT_TOLERANCES) -> Povm:
    """Check POVM invariants and return the validated :class:`Povm`.

    Raises the error for the first violated condition: equal square
    dimensions, per-element Hermiticity and positivity, and the sum-to-identity
    completeness relation.
    """
    mats = [as_complex_matrix(m) for m in elements]
    if not mats:
        raise DimensionMismatchError("a POVM needs at least one element")
    dim = mats[0].shape[0]
    for j, m in enumerate(mats):
        if m.shape != (dim, dim):
            raise DimensionMismatchError(
                f"element {j} has shape {m.shape}, expected ({dim}, {dim})"
            )
    for j, m in enumerate(mats):
        residual = frobenius(m - m.conj().T)
        if residual > tol.tol_check:
            raise NotHermitianError(residual, index=j)
        min_eig = float(np.linalg.eigvalsh((m + m.conj().T) / 2)[0])
        if min_eig < -tol.tol_check:
            raise NotPsdError(min_eig, index=j)
    total = sum(mats)
    deficit = frobenius(total - np.eye(dim))
    if deficit > tol.tol_check:
        raise IncompleteSumError(deficit)
    if labels is None:
        labels = tuple(str(j) for j in range(len(mats)))
    else:
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(mats):
            raise DimensionMismatchError(
                f"got {len(labels)} labels for {len(mats)} elements"
            )
    return Povm(
        dim=dim,
        elements=tuple(_frozen(m) for m in mats),
        labels=labels,
        n_original=len(mats),
    )


@dataclass(frozen=True, eq=False)
class KrausFactorization:
    """Kraus operators with ``m_j^dag m_j = M_j``.

    ``freedom`` records the unitaries applied on top of the Hermitian square
    roots (``m_j = V_j sqrt(M_j)``); ``None`` means the canonical Hermitian
    factorization.
    """

    kraus: tuple[np.ndarray, ...]
    freedom: tuple[np.ndarray, ...] | None = None

    @property
    def n_outcomes(self) -> int:
        return len(self.kraus)


def default_kraus(p: Povm, tol: Tolerances = DEFAULT_TOLERANCES) -> KrausFactorization:
    """Canonical factorization ``m_j = sqrt(M_j)`` (Hermitian PSD roots)."""
    return KrausFactorization(kraus=tuple(_frozen(psd_sqrt(m, tol)) for m in p.elements))


def apply_freedom(
    f: KrausFactorization, unitaries, tol: Tolerances = DEFAULT_TOLERANCES
) -> KrausFactorization:
    """Rotate each Kraus operator, ``m_j -> V_j m_j``.

    The measurement operators ``m_j^dag m_j`` and therefore all outcome
    probabilities are unchanged; only post-measurement states rotate.
    """
    vs = [as_complex_matrix(v) for v in unitaries]
    if len(vs) != len(f.kraus):
        raise DimensionMismatchError(
            f"got {len(vs)} unitaries for {len(f.kraus)} Kraus operators"
        )
    for j, v in enumerate(vs):
        if v.shape != f.kraus[j].shape:
            raise DimensionMismatchError(
                f"unitary {j} has shape {v.shape}, expected {f.kraus[j].shape}"
            )
        residual = frobenius(v.conj().T @ v - np.eye(v.shape[0]))
        if residual > tol.tol_unitary:
            raise NotUnitaryError(residual, index=j)
    new_kraus = tuple(_frozen(v @ m) for v, m in zip(vs, f.kraus))
    if f.freedom is None:
        new_freedom = tuple(_frozen(v) for v in vs)
    else:
        new_freedom = tuple(_frozen(v @ w) for v, w in zip(vs, f.freedom))
    return KrausFactorization(kraus=new_kraus, freedom=new_freedom)


def pad_to_power_of_two(p: Povm) -> Povm:
    """Append zero operators until the outcome count is a power of two.

    Padding goes at the tail with labels ``pad<k>``; the zero operators leave
    the completeness relation untouched and the padded outcomes are flagged
    through :meth:`Povm.is_padding`.
    """
    k = p.n_outcomes
    n = 1 << max(k - 1, 0).bit_length() if k > 1 else 1
    if n == k:
        return p
    zero = _frozen(np.zeros((p.dim, p.dim), dtype=complex))
    elements = p.elements + tuple(zero for _ in range(n - k))
    labels = p.labels + tuple(f"pad{j}" for j in range(k, n))
    return Povm(dim=p.dim, elements=elements, labels=labels, n_original=p.n_original)


def random_rank_one_povm(n_outcomes: int, dim: int, rng: np.random.Generator) -> Povm:
    """Random POVM with rank-one elements, valid by construction.

    Draws ``n_outcomes >= dim`` complex Gaussian vectors, forms their Gram sum
    ``G = sum |v_j><v_j|``, and symmetrizes each projector with ``G^{-1/2}``
    on both sides so the set sums to the identity.
    """
    if n_outcomes < dim:
        raise DimensionMismatchError("a rank-one POVM needs at least dim outcomes")
    vectors = [
        rng.standard_normal(dim) + 1j * rng.standard_normal(dim) for _ in range(n_outcomes)
    ]
    gram = sum(np.outer(v, v.conj()) for v in vectors)
    lam, basis = np.linalg.eigh(gram)
    inv_sqrt = (basis / np.sqrt(lam)) @ basis.conj().T
    elements = [inv_sqrt @ np.outer(v, v.conj()) @ inv_sqrt for v in vectors]
    return validate(elements)


def random_povm(
    n_outcomes: int, dim: int, rng: np.random.Generator, ranks=None
) -> Povm:
    """Random POVM with prescribed (or random) element ranks.

    Each element starts as ``X_j X_j^dag`` with ``X_j`` a ``dim x ranks[j]``
    Gaussian matrix, then the whole set is symmetrized as in
    :func:`random_rank_one_povm`.  Ranks are preserved by the symmetrization.
    """
    if ranks is None:
        ranks = [int(rng.integers(1, dim + 1)) for _ in range(n_outcomes)]
    ranks = [int(r) for r in ranks]
    if len(ranks) != n_outcomes:
        raise DimensionMismatchError(f"got {len(ranks)} ranks for {n_outcomes} outcomes")
    if any(r < 1 or r > dim for r in ranks):
        raise ValueError("element ranks must lie in 1..dim")
    if sum(ranks) < dim:
        raise ValueError("total rank below dim cannot sum to the identity")
    pieces = []
    for r in ranks:
        x = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
        pieces.append(x @ x.conj().T)
    gram = sum(pieces)
    lam, basis = np.linalg.eigh(gram)
    inv_sqrt = (basis / np.sqrt(lam)) @ basis.conj().T
    return validate([inv_sqrt @ a @ inv_sqrt for a in pieces])


def tetrad() -> Povm:
    """The qubit tetrad (SIC) POVM.

    Four rank-one elements built from sub-normalized states whose Bloch
    vectors point at the corners of a regular tetrahedron:

        |psi_0> = |0> / sqrt(2)
        |psi_k> = (|0> + sqrt(2) exp(2 pi i k / 3) |1>) / sqrt(6),  k = 1, 2, 3
    """
    phase = np.exp(2j * np.pi / 3)
    states = [
        np.array([1.0, 0.0], dtype=complex) / np.sqrt(2),
        np.array([1.0, np.sqrt(2) * phase]) / np.sqrt(6),
        np.array([1.0, np.sqrt(2) * phase**2]) / np.sqrt(6),
        np.array([1.0, np.sqrt(2)], dtype=complex) / np.sqrt(6),
    ]
    return validate([np.outer(s, s.conj()) for s in states])
