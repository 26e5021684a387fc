"""Linear maps from a block-diagonal algebra into ``B(C^N)``.

A :class:`SuperMap` is stored by its images on the canonical basis of the
domain; ``apply`` expands its argument in that basis.  Linearity therefore
holds by construction.  ``matricize`` gives the ``N^2 x D`` matrix of the map
using column-major stacking, ``vec(M) = M.T.ravel()``.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .algebra import DEFAULT_TOLERANCES, StarAlgebra, Tolerances, as_matrix, relative_scale, spectral_norms
from .errors import ShapeError

__all__ = [
    "SuperMap",
    "supermap_from_images",
    "identity_map",
    "zero_map",
    "from_function",
    "star_conjugate",
    "star_part",
    "is_star_linear",
    "is_homomorphism",
    "right_compress",
    "vec",
    "unvec",
]


def vec(M) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(M).T.reshape(-1)


def unvec(v, n=None) -> np.ndarray:
    v = np.asarray(v)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    return v.reshape(n, n).T


class SuperMap:
    """A linear map ``domain -> B(C^N)`` given by images of the matrix units."""

    __slots__ = ("domain", "images")

    def __init__(self, domain: StarAlgebra, images):
        images = np.array(images, dtype=complex)
        N, D = domain.N, domain.dim
        if images.ndim != 3 or images.shape[0] != D:
            raise ShapeError(f"expected {D} images, got array of shape {images.shape}")
        if images.shape[1:] != (N, N):
            raise ShapeError(f"images must be {N}x{N}, got {images.shape[1]}x{images.shape[2]}")
        if not np.all(np.isfinite(images)):
            raise ShapeError("images must have finite entries")
        images.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("SuperMap is immutable")

    def __repr__(self):
        return f"SuperMap(blocks={list(self.domain.blocks)}, N={self.N})"

    @property
    def N(self) -> int:
        return self.domain.N

    def __call__(self, A) -> np.ndarray:
        return self.apply(A)

    def apply(self, A) -> np.ndarray:
        coeffs, _ = self.domain.coeffs_of(as_matrix(A, self.N))
        return self.apply_coeffs(coeffs)

    def apply_coeffs(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs, dtype=complex), self.images, axes=1)

    def matricize(self) -> np.ndarray:
        """``N^2 x D`` matrix whose column ``i`` is ``vec(images[i])``."""
        return np.stack([vec(M) for M in self.images], axis=1)

    def image_norms(self) -> np.ndarray:
        return spectral_norms(self.images)

    # -- arithmetic -----------------------------------------------------------

    def _check_same_domain(self, other):
        if not isinstance(other, SuperMap):
            return NotImplemented
        if other.domain != self.domain:
            raise ShapeError(
                f"domain mismatch: {list(self.domain.blocks)} vs {list(other.domain.blocks)}"
            )
        return None

    def __add__(self, other):
        if self._check_same_domain(other) is NotImplemented:
            return NotImplemented
        return SuperMap(self.domain, self.images + other.images)

    def __sub__(self, other):
        if self._check_same_domain(other) is NotImplemented:
            return NotImplemented
        return SuperMap(self.domain, self.images - other.images)

    def __neg__(self):
        return SuperMap(self.domain, -self.images)

    def __mul__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return SuperMap(self.domain, complex(c) * self.images)

    __rmul__ = __mul__

    def __truediv__(self, c):
        if not np.isscalar(c):
            return NotImplemented
        return SuperMap(self.domain, self.images / complex(c))

    def scale(self, c) -> "SuperMap":
        return self * c

    def right_compress(self, P) -> "SuperMap":
        return right_compress(self, P)

    def star_conjugate(self) -> "SuperMap":
        return star_conjugate(self)


def supermap_from_images(alg: StarAlgebra, images: Sequence) -> SuperMap:
    images = list(images)
    if len(images) != alg.dim:
        raise ShapeError(f"expected {alg.dim} images, got {len(images)}")
    return SuperMap(alg, [as_matrix(M, alg.N) for M in images])


def identity_map(alg: StarAlgebra) -> SuperMap:
    return SuperMap(alg, alg.basis())


def zero_map(alg: StarAlgebra) -> SuperMap:
    return SuperMap(alg, np.zeros((alg.dim, alg.N, alg.N), dtype=complex))


def from_function(alg: StarAlgebra, f: Callable[[np.ndarray], np.ndarray]) -> SuperMap:
    """Tabulate ``f`` on the matrix units; ``f`` is assumed linear."""
    return SuperMap(alg, [f(E) for E in alg.basis()])


def star_conjugate(sigma: SuperMap) -> SuperMap:
    """The map ``A -> sigma(A^*)^*``.

    ``E_i^*`` is again a matrix unit, so the images are a permutation of the
    adjoints and the result is exact.
    """
    swapped = sigma.images[sigma.domain.adjoint_index]
    return SuperMap(sigma.domain, swapped.conj().transpose(0, 2, 1))


def star_part(sigma: SuperMap) -> SuperMap:
    """``(sigma + sigma^*) / 2``, always a *-linear map."""
    return (sigma + star_conjugate(sigma)) / 2


def is_star_linear(sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Whether ``sigma(E^*) = sigma(E)^*`` on every matrix unit.

    Returns ``(passed, residual)`` with the residual taken as the largest
    spectral norm of ``sigma(E^*) - sigma(E)^*``.
    """
    imgs = sigma.images
    diff = imgs[sigma.domain.adjoint_index] - imgs.conj().transpose(0, 2, 1)
    if diff.shape[0] == 0:
        return True, 0.0
    residual = float(spectral_norms(diff).max())
    scale = relative_scale(*sigma.image_norms())
    return bool(tol.accepts(residual, scale)), residual


def _products(alg: StarAlgebra, images: np.ndarray) -> np.ndarray:
    """``out[i, j] = images[index of E_i E_j]`` (zero where the product vanishes)."""
    table = alg.product_index
    padded = np.concatenate([images, np.zeros((1,) + images.shape[1:], dtype=complex)])
    return padded[np.where(table >= 0, table, len(images))]


def multiplicativity_defects(sigma: SuperMap) -> np.ndarray:
    """``(D, D, N, N)`` array of ``sigma(E_i E_j) - sigma(E_i) sigma(E_j)``."""
    imgs = sigma.images
    return _products(sigma.domain, imgs) - np.einsum("iab,jbc->ijac", imgs, imgs)


def is_homomorphism(sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Whether ``sigma`` is multiplicative, checked on all pairs of matrix units.

    Bilinearity makes the pairwise check exhaustive.  Returns
    ``(passed, residual)``.
    """
    imgs = sigma.images
    lhs = _products(sigma.domain, imgs)
    rhs = np.einsum("iab,jbc->ijac", imgs, imgs)
    residual = float(spectral_norms(lhs - rhs).max())
    scale = relative_scale(spectral_norms(lhs).max(), spectral_norms(rhs).max())
    return bool(tol.accepts(residual, scale)), residual


def right_compress(sigma: SuperMap, P) -> SuperMap:
    """The map ``A -> sigma(A) P``."""
    P = as_matrix(P, sigma.N)
    return SuperMap(sigma.domain, sigma.images @ P)
