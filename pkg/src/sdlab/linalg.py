"""Rank-revealing helpers: nullspaces, column spans, subspace distances."""

from __future__ import annotations

import numpy as np
import scipy.linalg

__all__ = [
    "nullspace",
    "column_span",
    "projector",
    "subspace_distance",
    "principal_angles",
]


def _singular_triplet(A):
    """Singular values and right singular vectors of ``A``.

    Tall systems are first reduced by a QR factorization; ``R`` has the same
    singular values and right singular vectors as ``A``.
    """
    m, n = A.shape
    if m > n:
        A = np.linalg.qr(A, mode="r")
    _, s, vh = np.linalg.svd(A, full_matrices=True)
    return s, vh


def nullspace(A, rank_tol_factor=1e-12, floor=0.0):
    """Orthonormal basis (columns) of the nullspace of ``A``.

    Singular values at or below ``max(s_max * rows * rank_tol_factor, floor)``
    count as zero.  Returns ``(basis, singular_values)``.
    """
    A = np.atleast_2d(np.asarray(A))
    m, n = A.shape
    if m == 0 or n == 0:
        return np.eye(n, dtype=A.dtype), np.zeros(0)
    s, vh = _singular_triplet(A)
    threshold = max((s[0] if s.size else 0.0) * m * rank_tol_factor, floor)
    rank = int(np.count_nonzero(s > threshold))
    return vh[rank:].conj().T, s


def column_span(mats, n, rank_tol_factor=1e-12, floor=0.0):
    """Orthonormal basis of the joint column space of ``mats`` (each ``n x n``).

    The matrices are stacked horizontally and the span is read off the left
    singular vectors above ``max(s_max * n * rank_tol_factor, floor)``.  The
    absolute ``floor`` matters when every matrix is rounding noise, where a
    purely relative threshold would report full rank.  Returns
    ``(basis, singular_values)``; an empty input spans ``{0}``.
    """
    mats = [np.asarray(M, dtype=complex) for M in mats]
    if not mats:
        return np.zeros((n, 0), dtype=complex), np.zeros(0)
    stacked = np.hstack(mats)
    u, s, _ = np.linalg.svd(stacked, full_matrices=False)
    threshold = max((s[0] if s.size else 0.0) * n * rank_tol_factor, floor)
    rank = int(np.count_nonzero(s > threshold))
    return u[:, :rank], s


def projector(basis) -> np.ndarray:
    """Orthogonal projection onto the span of orthonormal columns."""
    basis = np.asarray(basis)
    P = basis @ basis.conj().T
    # exact self-adjointness; rounding otherwise leaves ~1e-17 asymmetry
    return (P + P.conj().T) / 2


def subspace_distance(P, Q) -> float:
    """Spectral-norm gap between two orthogonal projections.

    Equals the sine of the largest principal angle when the ranges have equal
    dimension, and 1 when they do not.
    """
    D = np.asarray(P) - np.asarray(Q)
    if D.size == 0:
        return 0.0
    return float(np.linalg.norm(D, 2))


def principal_angles(A, B) -> np.ndarray:
    """Principal angles (radians, descending) between the column spaces of A and B.

    Either space being ``{0}`` yields an empty array.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    if A.ndim != 2 or B.ndim != 2 or A.shape[1] == 0 or B.shape[1] == 0:
        return np.zeros(0)
    return scipy.linalg.subspace_angles(A, B)
