"""Finite-dimensional C*-algebras as block-diagonal matrix algebras.

A C*-algebra of finite dimension is a direct sum ``M_{n_1} + ... + M_{n_k}``
of full matrix blocks.  It is represented here acting on ``C^N`` with
``N = n_1 + ... + n_k``, block ``b`` occupying the diagonal window that starts
at ``offsets[b]``.  Elements of ``B(C^N)`` are plain ``(N, N)`` complex numpy
arrays.

The canonical basis consists of matrix units: blocks in order, and inside
block ``b`` the units ``E_ij`` in row-major ``(i, j)`` order.  Matrix units are
orthonormal for the trace inner product ``<X, Y> = trace(X^* Y)``, so the
coordinates of a matrix are simply its entries on the block pattern.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidSpecError, ShapeError

__all__ = [
    "StarAlgebra",
    "Tolerances",
    "DEFAULT_TOLERANCES",
    "build_algebra",
    "as_matrix",
    "mul",
    "add",
    "scale",
    "adjoint",
    "frobenius_norm",
    "spectral_norm",
    "spectral_norms",
    "relative_scale",
]


@dataclass(frozen=True)
class Tolerances:
    """Comparison thresholds shared by every check.

    ``identity_tol`` is relative: an identity passes when its residual is at
    most ``identity_tol * max(1, scale)``.  Rank decisions keep singular values
    strictly above ``s_max * rows * rank_tol_factor``.
    """

    identity_tol: float = 1e-9
    rank_tol_factor: float = 1e-12

    def __post_init__(self):
        for name in ("identity_tol", "rank_tol_factor"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise InvalidSpecError(f"{name} must be a real number, got {value!r}") from None
            if not math.isfinite(value) or value < 0:
                raise InvalidSpecError(f"{name} must be finite and nonnegative, got {value!r}")
            object.__setattr__(self, name, value)

    def accepts(self, residual, scale=1.0):
        return residual <= self.identity_tol * max(1.0, scale)

    def as_dict(self):
        return {"identity_tol": self.identity_tol, "rank_tol_factor": self.rank_tol_factor}


DEFAULT_TOLERANCES = Tolerances()


def relative_scale(*norms):
    """``max(1, norms...)``; the reference magnitude for relative comparisons."""
    return max([1.0, *(float(v) for v in norms)])


# -- matrices -----------------------------------------------------------------


def as_matrix(M, n=None) -> np.ndarray:
    """Validate ``M`` as a finite square complex matrix (of size ``n`` if given)."""
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {A.shape}")
    if n is not None and A.shape[0] != n:
        raise ShapeError(f"expected a {n}x{n} matrix, got {A.shape[0]}x{A.shape[1]}")
    if A.shape[0] == 0:
        raise ShapeError("matrix dimension must be positive")
    if not np.all(np.isfinite(A)):
        raise InvalidSpecError("matrix entries must be finite")
    return A


def _conformable(A, B):
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape != B.shape or A.ndim != 2:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    return A, B


def mul(A, B) -> np.ndarray:
    A, B = _conformable(A, B)
    return A @ B


def add(A, B) -> np.ndarray:
    A, B = _conformable(A, B)
    return A + B


def scale(c, A) -> np.ndarray:
    return complex(c) * np.asarray(A, dtype=complex)


def adjoint(A) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(A).conj().T


def frobenius_norm(A) -> float:
    return float(np.linalg.norm(A, "fro"))


def spectral_norm(A) -> float:
    """Largest singular value."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def spectral_norms(stack) -> np.ndarray:
    """Spectral norms of a stack ``(..., n, n)`` of matrices."""
    stack = np.asarray(stack)
    if stack.size == 0:
        return np.zeros(stack.shape[:-2])
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


# -- the algebra --------------------------------------------------------------


@dataclass(frozen=True)
class StarAlgebra:
    """Direct sum of full matrix blocks acting on ``C^N``."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(self.blocks)
        if not blocks:
            raise InvalidSpecError("an algebra needs at least one block")
        for n in blocks:
            if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
                raise InvalidSpecError(f"block sizes must be positive integers, got {n!r}")
        object.__setattr__(self, "blocks", tuple(int(n) for n in blocks))

    @property
    def N(self) -> int:
        return sum(self.blocks)

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(v) for v in np.cumsum((0,) + self.blocks[:-1]))

    @cached_property
    def _units(self):
        rows, cols, block_of = [], [], []
        for b, (n, off) in enumerate(zip(self.blocks, self.offsets)):
            for i in range(n):
                for j in range(n):
                    rows.append(off + i)
                    cols.append(off + j)
                    block_of.append(b)
        return np.array(rows), np.array(cols), np.array(block_of)

    @property
    def rows(self) -> np.ndarray:
        """Row position of each matrix unit, in canonical order."""
        return self._units[0]

    @property
    def cols(self) -> np.ndarray:
        return self._units[1]

    @cached_property
    def pattern(self) -> np.ndarray:
        """Boolean ``(N, N)`` mask of the block-diagonal pattern."""
        mask = np.zeros((self.N, self.N), dtype=bool)
        mask[self.rows, self.cols] = True
        return mask

    @cached_property
    def _index(self) -> np.ndarray:
        index = np.full((self.N, self.N), -1, dtype=int)
        index[self.rows, self.cols] = np.arange(self.dim)
        return index

    @cached_property
    def adjoint_index(self) -> np.ndarray:
        """``adjoint_index[i]`` is the index of ``E_i^*`` (the transposed unit)."""
        return self._index[self.cols, self.rows]

    @cached_property
    def product_index(self) -> np.ndarray:
        """``(D, D)`` table: index of ``E_i E_j``, or -1 where the product is 0.

        ``E_{ab} E_{cd} = delta_{bc} E_{ad}`` inside a block, 0 across blocks.
        """
        r, c = self.rows, self.cols
        table = np.where(c[:, None] == r[None, :], self._index[r[:, None], c[None, :]], -1)
        return table

    def basis_element(self, idx) -> np.ndarray:
        if isinstance(idx, bool) or not isinstance(idx, (int, np.integer)):
            raise TypeError(f"basis index must be an integer, got {idx!r}")
        if not 0 <= idx < self.dim:
            raise IndexError(f"basis index {idx} out of range for dimension {self.dim}")
        E = np.zeros((self.N, self.N), dtype=complex)
        E[self.rows[idx], self.cols[idx]] = 1.0
        return E

    def basis(self) -> np.ndarray:
        """All matrix units stacked as a ``(D, N, N)`` array."""
        stack = np.zeros((self.dim, self.N, self.N), dtype=complex)
        stack[np.arange(self.dim), self.rows, self.cols] = 1.0
        return stack

    def identity(self) -> np.ndarray:
        return np.eye(self.N, dtype=complex)

    def embed(self, coeffs) -> np.ndarray:
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.dim,):
            raise ShapeError(f"expected {self.dim} coefficients, got shape {coeffs.shape}")
        M = np.zeros((self.N, self.N), dtype=complex)
        M[self.rows, self.cols] = coeffs
        return M

    def coeffs_of(self, M):
        """Trace-inner-product coordinates of ``M`` and its distance to the algebra.

        The residual is the Frobenius norm of the part of ``M`` orthogonal to
        the algebra, i.e. of its entries off the block pattern.
        """
        M = np.asarray(M, dtype=complex)
        if M.shape != (self.N, self.N):
            raise ShapeError(f"expected a {self.N}x{self.N} matrix, got shape {M.shape}")
        coeffs = M[self.rows, self.cols].copy()
        residual = float(np.linalg.norm(M[~self.pattern]))
        return coeffs, residual

    def contains(self, M, tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
        _, residual = self.coeffs_of(M)
        return residual <= tol.identity_tol * max(1.0, frobenius_norm(M))

    def project(self, M) -> np.ndarray:
        """Trace-orthogonal projection of ``M`` onto the algebra."""
        return self.embed(self.coeffs_of(M)[0])

    def multiply(self, a, b) -> np.ndarray:
        """Product of two elements given by coefficient vectors."""
        return self.coeffs_of(self.embed(a) @ self.embed(b))[0]

    def block_slices(self):
        return [slice(off, off + n) for off, n in zip(self.offsets, self.blocks)]

    def as_dict(self):
        return {"blocks": list(self.blocks)}


def build_algebra(blocks: Sequence[int]) -> StarAlgebra:
    """``build_algebra([2, 3])`` is ``M_2 + M_3`` on ``C^5`` (dimension 13)."""
    if isinstance(blocks, (str, bytes)):
        raise InvalidSpecError("blocks must be a sequence of integers")
    try:
        blocks = tuple(blocks)
    except TypeError:
        raise InvalidSpecError(f"blocks must be a sequence of integers, got {blocks!r}") from None
    return StarAlgebra(blocks)
