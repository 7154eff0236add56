"""Dense complex linear-algebra kernel.

Everything downstream (POVM validation, tree construction, dilation) sits on
the four operations in this module: Hermitian eigendecomposition with a
deterministic ordering convention, Moore-Penrose pseudoinverse with an
explicit rank policy, spectral PSD square root, and completion of an
isometric column block to a full unitary.

Rank policy: an eigenvalue or singular value counts as nonzero iff it exceeds
``tol_rank`` times the largest one.  The same relative threshold is applied
everywhere so that rank decisions made by different operations on the same
operator agree.

All functions are pure; returned arrays are fresh and never alias inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitianError, NotIsometryError, NotPsdError, NotSquareError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package.

    tol_rank    relative cutoff for rank decisions (vs. largest eigen/singular value)
    tol_check   absolute Frobenius threshold for validation residuals
    tol_unitary absolute threshold for unitarity / isometry checks
    """

    tol_rank: float = 1e-10
    tol_check: float = 1e-9
    tol_unitary: float = 1e-10

    def __post_init__(self) -> None:
        if not (self.tol_rank > 0 and self.tol_check > 0 and self.tol_unitary > 0):
            raise ValueError("all tolerances must be strictly positive")
        if self.tol_rank >= 1:
            raise ValueError("tol_rank must be below 1")


DEFAULT_TOLERANCES = Tolerances()


def as_complex_matrix(a) -> np.ndarray:
    """Coerce to a fresh 2-D complex array, rejecting NaN/Inf entries."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {m.ndim} dimensions")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def frobenius(a: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(a))


def numerical_rank(singular_values: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> int:
    """Number of singular values above the relative rank threshold."""
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0 or s[0] <= 0:
        return 0
    return int(np.sum(s > tol.tol_rank * s[0]))


def _require_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise NotSquareError(m.shape)


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues in descending order and matching unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """V diag(w) V^dag."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude component is real positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        pivot = col[i]
        if abs(pivot) > 0:
            out[:, j] = col * (pivot.conjugate() / abs(pivot))
    return out


def _order_ties(values: np.ndarray, vectors: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Within runs of exactly equal eigenvalues, order eigenvectors lexicographically.

    Comparison is by the first differing coordinate, real part before
    imaginary part.  Near-degenerate (but unequal) values keep eigensolver
    order.
    """
    i = 0
    n = values.size
    while i < n:
        j = i
        while j < n and values[j] == values[i]:
            j += 1
        if j - i > 1:
            cols = sorted(
                range(i, j),
                key=lambda c: tuple((vectors[r, c].real, vectors[r, c].imag) for r in range(vectors.shape[0])),
            )
            vectors[:, i:j] = vectors[:, cols]
        i = j
    return values, vectors


def hermitian_eig(a, tol: Tolerances = DEFAULT_TOLERANCES) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with a reproducible ordering.

    Eigenvalues come out descending.  Each eigenvector's largest-magnitude
    component is made real positive; exact eigenvalue ties are broken by
    lexicographic order of the phase-fixed eigenvectors.

    Raises
    ------
    NotSquareError
        If the matrix is not square.
    NotHermitianError
        If ``|A - A^dag|_F`` exceeds ``tol.tol_check``.
    """
    m = as_complex_matrix(a)
    _require_square(m)
    residual = frobenius(m - m.conj().T)
    if residual > tol.tol_check:
        raise NotHermitianError(residual)
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = _fix_phases(v[:, order])
    w, v = _order_ties(w, v)
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def pseudo_inverse(a, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD.

    Singular values at or below ``tol.tol_rank`` times the largest are
    treated as exact zeros, inverting the operator on its numerical support
    only.  Satisfies all four Penrose axioms to machine precision.
    """
    m = as_complex_matrix(a)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    r = numerical_rank(s, tol)
    return (vh[:r].conj().T / s[:r]) @ u[:, :r].conj().T


def psd_sqrt(a, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Hermitian PSD square root, computed spectrally.

    Eigenvalues below ``tol.tol_rank`` times the largest are truncated to
    exact zero (the module rank policy); without this, square-rooting an
    exactly rank-deficient operator would amplify eigenvalue dust above the
    rank threshold and poison every later rank decision made on the result.

    Raises
    ------
    NotPsdError
        If any eigenvalue lies below ``-tol.tol_check * |A|_F``.
    """
    m = as_complex_matrix(a)
    eig = hermitian_eig(m, tol)
    w = eig.eigenvalues
    floor = -tol.tol_check * frobenius(m)
    if w.size and w[-1] < floor:
        raise NotPsdError(float(w[-1]))
    top = max(float(w[0]), 0.0) if w.size else 0.0
    w = np.where(w > tol.tol_rank * top, w, 0.0)
    v = eig.eigenvectors
    s = (v * np.sqrt(w)) @ v.conj().T
    return (s + s.conj().T) / 2


def complete_to_unitary(block, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Complete an n x k block of orthonormal columns to an n x n unitary.

    The given columns are copied into the result verbatim (bit-identical).
    The remaining columns come from Gram-Schmidt over the computational
    basis vectors e_0, e_1, ... in that fixed order, with re-orthogonalization
    for numerical stability; candidates whose residual norm falls below
    ``tol.tol_rank`` are skipped as already spanned.

    Raises
    ------
    NotIsometryError
        If the block has more columns than rows or its columns are not
        orthonormal within ``tol.tol_unitary``.
    """
    b = as_complex_matrix(block)
    n, k = b.shape
    if k > n:
        raise NotIsometryError(f"block has more columns ({k}) than rows ({n})")
    gram_residual = frobenius(b.conj().T @ b - np.eye(k))
    if gram_residual > tol.tol_unitary:
        raise NotIsometryError("block columns are not orthonormal", residual=gram_residual)
    u = np.zeros((n, n), dtype=complex)
    u[:, :k] = b
    filled = k
    for i in range(n):
        if filled == n:
            break
        v = np.zeros(n, dtype=complex)
        v[i] = 1.0
        # two projection passes: "twice is enough" to keep orthogonality at
        # machine precision even when the first residual is tiny
        for _ in range(2):
            v -= u[:, :filled] @ (u[:, :filled].conj().T @ v)
        norm = np.linalg.norm(v)
        if norm < tol.tol_rank:
            continue
        u[:, filled] = v / norm
        filled += 1
    if filled != n:
        raise NotIsometryError("could not complete block to a unitary")
    return u


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed random unitary (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases
