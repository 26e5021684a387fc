"""The twisted semidirect product ``A + X`` built from a homomorphism.

With ``sigma: A -> B(C^N)`` multiplicative, ``B(C^N)`` becomes an
``A``-bimodule through ``a . x = sigma(a) x`` and ``x . a = x sigma(a)``, and
``A + B(C^N)`` is an algebra under

    (a, x)(b, y) = (ab, x . b + a . y).

A sigma-derivation ``d`` then gives the algebra homomorphism
``a -> (a, d(a))``.  The norm

    |(a, x)| = |a| + sup |x|, |a1 . x|, |x . a2|, |a1 . x . a2|   (|a1|, |a2| <= 1)

has no closed form in general; :func:`semidirect_norm_estimate` returns a
value attained at feasible ``a1, a2`` and is therefore a certified lower
bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOLERANCES, Tolerances, as_matrix, relative_scale, spectral_norm, spectral_norms
from .derivations import leibniz_residual
from .errors import PreconditionError, ShapeError
from .samplers import random_contraction
from .supermap import SuperMap, _products, is_homomorphism

__all__ = [
    "SemidirectElement",
    "SemidirectContext",
    "PhiReport",
    "NormEstimate",
    "semidirect_mul",
    "element_distance",
    "phi_d",
    "semidirect_norm_estimate",
]


@dataclass(frozen=True)
class SemidirectElement:
    a: np.ndarray
    x: np.ndarray

    def __add__(self, other):
        return SemidirectElement(self.a + other.a, self.x + other.x)

    def __sub__(self, other):
        return SemidirectElement(self.a - other.a, self.x - other.x)

    def __mul__(self, c):
        return SemidirectElement(complex(c) * self.a, complex(c) * self.x)

    __rmul__ = __mul__


class SemidirectContext:
    """Algebra ``A`` with a multiplicative twist ``sigma``, checked on construction."""

    def __init__(self, sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
        ok, residual = is_homomorphism(sigma, tol)
        if not ok:
            raise PreconditionError(
                f"sigma is not multiplicative (residual {residual:.3g})", "homomorphism", residual
            )
        self.sigma = sigma
        self.alg = sigma.domain
        self.tol = tol
        self.hom_residual = residual

    def element(self, a, x) -> SemidirectElement:
        a = np.asarray(a, dtype=complex)
        if a.shape != (self.alg.dim,):
            raise ShapeError(f"expected {self.alg.dim} algebra coefficients, got shape {a.shape}")
        return SemidirectElement(a, as_matrix(x, self.alg.N))

    def identity(self) -> SemidirectElement:
        return SemidirectElement(self.alg.coeffs_of(self.alg.identity())[0], np.zeros((self.alg.N,) * 2, complex))

    def left(self, a, x):
        """``a . x = sigma(a) x``."""
        return self.sigma.apply_coeffs(a) @ x

    def right(self, x, a):
        """``x . a = x sigma(a)``."""
        return x @ self.sigma.apply_coeffs(a)

    def mul(self, u: SemidirectElement, v: SemidirectElement) -> SemidirectElement:
        return semidirect_mul(self, u, v)

    def a_norm(self, a) -> float:
        return spectral_norm(self.alg.embed(a))


def semidirect_mul(ctx: SemidirectContext, u: SemidirectElement, v: SemidirectElement) -> SemidirectElement:
    """``(a, x)(b, y) = (ab, x sigma(b) + sigma(a) y)``."""
    for w in (u, v):
        if w.a.shape != (ctx.alg.dim,) or w.x.shape != (ctx.alg.N, ctx.alg.N):
            raise ShapeError("element does not belong to this context")
    return SemidirectElement(ctx.alg.multiply(u.a, v.a), ctx.right(u.x, v.a) + ctx.left(u.a, v.x))


def element_distance(ctx: SemidirectContext, u: SemidirectElement, v: SemidirectElement) -> float:
    """``|a_u - a_v| + |x_u - x_v|`` in spectral norms."""
    return ctx.a_norm(u.a - v.a) + spectral_norm(u.x - v.x)


@dataclass(frozen=True)
class PhiReport:
    hom_residual: float
    injective: bool
    passed: bool
    scale: float


def phi_d(ctx: SemidirectContext, d: SuperMap, tol: Tolerances | None = None):
    """The embedding ``a -> (a, d(a))`` and a report on its multiplicativity.

    Returns ``(phi, report)``; ``phi`` takes a coefficient vector.  It is
    injective by construction (first component is the identity).
    """
    tol = tol or ctx.tol
    check = leibniz_residual(d, ctx.sigma, tol)
    if not check.passed:
        raise PreconditionError(
            f"d is not a sigma-derivation (residual {check.residual:.3g})", "leibniz", check.residual
        )

    def phi(a):
        a = np.asarray(a, dtype=complex)
        return SemidirectElement(a, d.apply_coeffs(a))

    alg = ctx.alg
    D = alg.dim
    # phi(E_i E_j) and phi(E_i) phi(E_j) share the first component E_i E_j, so
    # the distance is the spectral norm of the second components' difference
    lhs = _products(alg, d.images)
    rhs = np.einsum("iab,jbc->ijac", d.images, ctx.sigma.images) + np.einsum(
        "iab,jbc->ijac", ctx.sigma.images, d.images
    )
    units = alg.basis()
    ab = np.zeros((D, D, alg.N, alg.N), dtype=complex)
    pi, pj = np.nonzero(alg.product_index >= 0)
    ab[pi, pj] = units[alg.product_index[pi, pj]]
    worst = float(spectral_norms(lhs - rhs).max())
    scale = max(
        1.0,
        float((spectral_norms(ab) + spectral_norms(rhs)).max()),
        float(spectral_norms(lhs).max()),
    )
    report = PhiReport(worst, True, bool(tol.accepts(worst, scale)), relative_scale(scale))
    return phi, report


@dataclass(frozen=True)
class NormEstimate:
    value: float
    lower_bound: bool
    a_norm: float
    terms: dict


def _polar_in_algebra(alg, G):
    """Unitary-like ``W`` in ``alg`` with ``trace(G^* W) = |G|_1`` (blockwise polar)."""
    W = np.zeros_like(G)
    for sl in alg.block_slices():
        u, _, vh = np.linalg.svd(G[sl, sl])
        W[sl, sl] = u @ vh
    return W


def _top_pair(M):
    u, s, vh = np.linalg.svd(M)
    return s[0], u[:, 0], vh[0].conj()


def _ascend(ctx, x, a1, a2, iterations):
    """Alternating exact maximization of ``|sigma(a1) x sigma(a2)|``.

    ``a1`` or ``a2`` set to ``None`` drops that factor.  Each half-step fixes
    the top singular pair ``(u, v)`` and maximizes the linear functional
    ``u^* sigma(a) w`` over the unit ball; its maximizer is the polar factor
    of the functional's representer, so the value never decreases.
    """
    alg, sigma = ctx.alg, ctx.sigma
    imgs = sigma.images

    def value(a1, a2):
        M = x
        if a1 is not None:
            M = sigma.apply_coeffs(alg.coeffs_of(a1)[0]) @ M
        if a2 is not None:
            M = M @ sigma.apply_coeffs(alg.coeffs_of(a2)[0])
        return M

    best = spectral_norm(value(a1, a2))
    for _ in range(iterations):
        if a1 is not None:
            s, u, v = _top_pair(value(a1, a2))
            w = value(None, a2) @ v
            g = np.einsum("a,iab,b->i", u.conj(), imgs, w)
            a1 = _polar_in_algebra(alg, alg.embed(g.conj()))
        if a2 is not None:
            s, u, v = _top_pair(value(a1, a2))
            w = value(a1, None).conj().T @ u
            g = np.einsum("a,iab,b->i", w.conj(), imgs, v)
            a2 = _polar_in_algebra(alg, alg.embed(g.conj()))
        current = spectral_norm(value(a1, a2))
        if current <= best * (1 + 1e-15):
            best = max(best, current)
            break
        best = current
    return best


def semidirect_norm_estimate(
    ctx: SemidirectContext, u: SemidirectElement, starts=16, iterations=50, seed=0
) -> NormEstimate:
    """Lower estimate of the semidirect norm of ``u = (a, x)``.

    Each of the four sups is maximized by alternating ascent from the
    identity and from ``starts - 1`` random contractions; start ``k`` draws
    from a generator seeded with ``(seed, k)``, so larger budgets explore a
    superset of starts and the estimate is nondecreasing in ``starts``.
    """
    if starts < 1 or iterations < 0:
        raise ValueError("starts must be positive and iterations nonnegative")
    alg = ctx.alg
    x = as_matrix(u.x, alg.N)
    terms = {"x": spectral_norm(x), "left": 0.0, "right": 0.0, "both": 0.0}
    for k in range(starts):
        if k == 0:
            a1 = a2 = alg.identity()
        else:
            rng = np.random.default_rng([seed, k])
            a1 = random_contraction(rng, alg)
            a2 = random_contraction(rng, alg)
        terms["left"] = max(terms["left"], _ascend(ctx, x, a1, None, iterations))
        terms["right"] = max(terms["right"], _ascend(ctx, x, None, a2, iterations))
        terms["both"] = max(terms["both"], _ascend(ctx, x, a1, a2, iterations))
    a_norm = ctx.a_norm(u.a)
    return NormEstimate(a_norm + max(terms.values()), True, a_norm, terms)

