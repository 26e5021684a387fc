"""Twisted derivations: residual checks, generators and the solution space.

A linear ``d`` is a ``(sigma, tau)``-derivation when

    d(ab) = d(a) sigma(b) + tau(a) d(b)

for all ``a, b``; ``tau = sigma`` gives a sigma-derivation.  Every identity
here is bilinear (or trilinear) in the algebra arguments, so evaluating it on
all pairs (triples) of matrix units certifies it on the whole algebra.

Residuals are spectral norms.  A check passes when the worst residual is at
most ``identity_tol * scale``, where ``scale`` is ``max(1, largest spectral
norm among the individual terms of the identity)``.  The zero map counts as a
derivation for every ``sigma``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOLERANCES, StarAlgebra, Tolerances, as_matrix, relative_scale, spectral_norms
from .errors import InvalidSpecError, PreconditionError, ShapeError
from .linalg import nullspace
from .supermap import (
    SuperMap,
    _products,
    is_homomorphism,
    is_star_linear,
    multiplicativity_defects,
    star_conjugate,
    unvec,
    vec,
)

log = logging.getLogger(__name__)

__all__ = [
    "DerivationCheck",
    "SymmetrizeReport",
    "leibniz_residual",
    "sigma_tau_residual",
    "inner_derivation",
    "derivation_space",
    "lemma22_residual",
    "dstar",
    "annihilators",
    "symmetrize",
]


@dataclass(frozen=True)
class DerivationCheck:
    residual: float
    passed: bool
    worst_pair: tuple
    scale: float

    def as_dict(self):
        return {
            "residual": self.residual,
            "passed": self.passed,
            "worst": list(self.worst_pair),
            "scale": self.scale,
        }


def _same_domain(*maps):
    first = maps[0]
    for m in maps[1:]:
        if m.domain != first.domain:
            raise ShapeError(
                f"domain mismatch: {list(first.domain.blocks)} vs {list(m.domain.blocks)}"
            )


def _check(residuals, scale, tol):
    if residuals.size == 0:
        return DerivationCheck(0.0, True, (), 1.0)
    flat = int(np.argmax(residuals))
    worst = tuple(int(v) for v in np.unravel_index(flat, residuals.shape))
    residual = float(residuals.flat[flat])
    return DerivationCheck(residual, bool(tol.accepts(residual, scale)), worst, float(scale))


def sigma_tau_residual(d: SuperMap, sigma: SuperMap, tau: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Worst violation of ``d(ab) = d(a) sigma(b) + tau(a) d(b)`` over unit pairs."""
    _same_domain(d, sigma, tau)
    lhs = _products(d.domain, d.images)
    right_term = np.einsum("iab,jbc->ijac", d.images, sigma.images)
    left_term = np.einsum("iab,jbc->ijac", tau.images, d.images)
    residuals = spectral_norms(lhs - right_term - left_term)
    scale = relative_scale(
        spectral_norms(lhs).max(), spectral_norms(right_term).max(), spectral_norms(left_term).max()
    )
    return _check(residuals, scale, tol)


def leibniz_residual(d: SuperMap, sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Worst violation of ``d(ab) = d(a) sigma(b) + sigma(a) d(b)``."""
    return sigma_tau_residual(d, sigma, sigma, tol)


def inner_derivation(sigma: SuperMap, tau: SuperMap, x, tol: Tolerances = DEFAULT_TOLERANCES) -> SuperMap:
    """The map ``a -> x sigma(a) - tau(a) x``.

    It is a ``(sigma, tau)``-derivation when both maps are multiplicative;
    that is checked and logged here, not enforced.
    """
    _same_domain(sigma, tau)
    x = as_matrix(x, sigma.N)
    for name, m in (("sigma", sigma), ("tau", tau)):
        ok, residual = is_homomorphism(m, tol)
        if not ok:
            log.warning("inner_derivation: %s is not multiplicative (residual %.3g)", name, residual)
    return SuperMap(sigma.domain, x @ sigma.images - tau.images @ x)


def _leibniz_system(sigma: SuperMap, tau: SuperMap) -> np.ndarray:
    """Matrix of ``d -> [d(E_i E_j) - d(E_i) sigma(E_j) - tau(E_i) d(E_j)]_{ij}``.

    Unknowns are the stacked ``vec(d(E_k))``; rows are the stacked
    ``vec`` of each pair's residual.  Uses ``vec(XB) = (B^T kron I) vec X``
    and ``vec(AX) = (I kron A) vec X``.
    """
    alg = sigma.domain
    D, N = alg.dim, alg.N
    n2 = N * N
    eye = np.eye(N)
    right = np.einsum("jca,bd->jabcd", sigma.images, eye).reshape(D, n2, n2)
    left = np.einsum("ac,ibd->iabcd", eye, tau.images).reshape(D, n2, n2)

    M = np.zeros((D, D, n2, D, n2), dtype=complex)
    ii, jj = np.meshgrid(np.arange(D), np.arange(D), indexing="ij")
    M[ii, jj, :, ii, :] -= right[jj]
    M[ii, jj, :, jj, :] -= left[ii]
    pi, pj = np.nonzero(alg.product_index >= 0)
    M[pi, pj, :, alg.product_index[pi, pj], :] += np.eye(n2)
    return M.reshape(D * D * n2, D * n2)


def _star_swap(alg) -> np.ndarray:
    """Permutation ``S`` with ``S vec-stack(d) = vec-stack(A -> d(A^*)^T)`` on matrix units.

    ``d`` is *-preserving exactly when ``conj(S z) = z`` for its stacked
    images ``z``.
    """
    D, N = alg.dim, alg.N
    n2 = N * N
    # vec(X^T) = K vec(X)
    idx = np.arange(n2).reshape(N, N)
    transpose = idx.T.reshape(-1)
    return (alg.adjoint_index[:, None] * n2 + transpose[None, :]).reshape(-1)


def derivation_space(
    sigma: SuperMap,
    star_constrained: bool = False,
    tol: Tolerances = DEFAULT_TOLERANCES,
    tau: SuperMap | None = None,
    within: StarAlgebra | None = None,
):
    """Basis of all ``(sigma, tau)``-derivations (``tau`` defaults to ``sigma``).

    The Leibniz rule is linear in ``d``, so the space is the nullspace of
    :func:`_leibniz_system`.  Without the star constraint the basis is
    orthonormal for the complex trace inner product summed over images.
    With it, ``d(A^*) = d(A)^*`` is only real-linear, so the system is solved
    over the reals on real and imaginary parts; the basis is then a real
    basis, orthonormal for the real part of that inner product.  An empty
    list means only ``d = 0``.

    ``within`` restricts the images to a subalgebra of ``B(C^N)`` (off-pattern
    entries forced to zero).
    """
    if tau is None:
        tau = sigma
    _same_domain(sigma, tau)
    alg = sigma.domain
    D, N = alg.dim, alg.N
    M = _leibniz_system(sigma, tau)
    if within is not None:
        if within.N != N:
            raise ShapeError(f"codomain algebra acts on C^{within.N}, maps act on C^{N}")
        off = np.flatnonzero(~vec(within.pattern))
        pick = np.zeros((D, off.size, D, N * N))
        ar = np.arange(D)
        pick[ar[:, None], np.arange(off.size)[None, :], ar[:, None], off[None, :]] = 1.0
        M = np.concatenate([M, pick.reshape(D * off.size, D * N * N)])
    vectors, _ = nullspace(M, tol.rank_tol_factor)
    if star_constrained and vectors.shape[1]:
        # z = V c with conj(z[swap]) = z; real-linear in c = a + ib
        V = vectors
        W = V[_star_swap(alg)].conj()
        system = np.block([[V.real - W.real, -V.imag - W.imag], [V.imag - W.imag, V.real + W.real]])
        coeffs, _ = nullspace(system, tol.rank_tol_factor)
        k = V.shape[1]
        vectors = V @ (coeffs[:k] + 1j * coeffs[k:])
    out = []
    for z in vectors.T:
        images = [unvec(chunk, N) for chunk in z.reshape(D, N * N)]
        out.append(SuperMap(alg, images))
    return out


def lemma22_residual(d: SuperMap, sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Worst violation of ``d(c) defect(a, b) = defect(c, a) d(b)``.

    ``defect(a, b) = sigma(ab) - sigma(a) sigma(b)``.  Evaluated on all
    triples of matrix units; ``worst_pair`` is reported as ``(a, b, c)``
    indices.  The scale uses the submultiplicative bound
    ``max|d| * max(max|sigma(E_i E_j)|, max|sigma|^2)`` on the terms.
    """
    _same_domain(d, sigma)
    defects = multiplicativity_defects(sigma)
    lhs = np.einsum("kab,ijbc->kijac", d.images, defects)
    rhs = np.einsum("kiab,jbc->kijac", defects, d.images)
    residuals = spectral_norms(lhs - rhs)
    # residuals[k, i, j] -> report as (a=i, b=j, c=k)
    residuals = residuals.transpose(1, 2, 0)
    snorm = sigma.image_norms()
    dnorm = d.image_norms()
    prods = spectral_norms(_products(sigma.domain, sigma.images))
    bound = (dnorm.max() if dnorm.size else 0.0) * max(
        prods.max() if prods.size else 0.0, (snorm.max() if snorm.size else 0.0) ** 2
    )
    return _check(residuals, relative_scale(bound), tol)


def dstar(d: SuperMap) -> SuperMap:
    """``A -> d(A^*)^*``; a sigma-derivation again when sigma is *-linear."""
    return star_conjugate(d)


def annihilators(E, side="both", n=None, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Orthonormal basis of an annihilator in ``B(C^n)``, as a ``(k, n, n)`` stack.

    ``side='right'`` gives ``{X : e X = 0 for e in E}``, ``'left'`` gives
    ``{X : X e = 0}``, and ``'both'`` their intersection.  ``n`` is required
    only when ``E`` is empty, in which case the whole space is returned.
    """
    if side not in ("right", "left", "both"):
        raise InvalidSpecError(f"side must be 'right', 'left' or 'both', got {side!r}")
    mats = [np.asarray(e, dtype=complex) for e in E]
    if not mats:
        if n is None:
            raise ShapeError("the ambient dimension n is required when E is empty")
        return np.eye(n * n, dtype=complex).reshape(n * n, n, n).transpose(0, 2, 1)
    N = mats[0].shape[0]
    mats = [as_matrix(e, N) for e in mats]
    if n is not None and n != N:
        raise ShapeError(f"E has dimension {N}, but n={n} was given")
    eye = np.eye(N)
    rows = []
    for e in mats:
        if side in ("right", "both"):
            rows.append(np.kron(eye, e))
        if side in ("left", "both"):
            rows.append(np.kron(e.T, eye))
    basis, _ = nullspace(np.concatenate(rows), tol.rank_tol_factor)
    return np.stack([unvec(v, N) for v in basis.T]) if basis.shape[1] else np.zeros((0, N, N), dtype=complex)


@dataclass(frozen=True)
class SymmetrizeReport:
    sigma_tau: DerivationCheck
    tau_sigma: DerivationCheck
    midpoint: DerivationCheck

    @property
    def passed(self):
        return self.sigma_tau.passed and self.tau_sigma.passed and self.midpoint.passed

    def as_dict(self):
        return {
            "sigma_tau": self.sigma_tau.as_dict(),
            "tau_sigma": self.tau_sigma.as_dict(),
            "midpoint": self.midpoint.as_dict(),
        }


def symmetrize(d: SuperMap, sigma: SuperMap, tau: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Replace a *-(sigma, tau)-derivation's twist pair by ``(sigma + tau)/2``.

    The swap ``(sigma, tau) -> (tau, sigma)`` uses the involution, so all three
    maps must be *-linear; otherwise :class:`PreconditionError` is raised.
    Returns ``(mid, report)``.
    """
    _same_domain(d, sigma, tau)
    for name, m in (("sigma", sigma), ("tau", tau), ("d", d)):
        ok, residual = is_star_linear(m, tol)
        if not ok:
            raise PreconditionError(f"{name} is not *-linear (residual {residual:.3g})", f"star_{name}", residual)
    mid = (sigma + tau) / 2
    report = SymmetrizeReport(
        sigma_tau=sigma_tau_residual(d, sigma, tau, tol),
        tau_sigma=sigma_tau_residual(d, tau, sigma, tol),
        midpoint=leibniz_residual(d, mid, tol),
    )
    return mid, report
