"""Seeded instance families shared by the property and acceptance tests."""

import numpy as np

from sdlab.algebra import build_algebra
from sdlab.derivations import derivation_space
from sdlab.samplers import (
    TWIST_FAMILIES,
    block_preserving_twist,
    random_homomorphism,
    random_twist,
    split_pair,
    split_twist,
)

ALGEBRAS = ([2], [3], [2, 2], [2, 3])


def random_combination(rng, basis, real):
    """Random element of the span of ``basis`` (real coefficients if ``real``)."""
    if not basis:
        return None
    coeffs = rng.standard_normal(len(basis))
    if not real:
        coeffs = coeffs + 1j * rng.standard_normal(len(basis))
    out = basis[0] * coeffs[0]
    for c, d in zip(coeffs[1:], basis[1:]):
        out = out + d * c
    return out


def solver_instances(count=100, seed=2024):
    """``(sigma, basis, star)`` triples over every twist family and algebra."""
    out = []
    for k in range(count):
        rng = np.random.default_rng([seed, k])
        alg = build_algebra(ALGEBRAS[k % len(ALGEBRAS)])
        family = TWIST_FAMILIES[(k // len(ALGEBRAS)) % len(TWIST_FAMILIES)]
        sigma = random_twist(rng, alg, family)
        star = bool(k % 2)
        out.append((sigma, derivation_space(sigma, star_constrained=star), star))
    return out


def star_derivation_instances(count=50, seed=7):
    """Solver-generated *-preserving sigma-derivations with arbitrary sigma."""
    out = []
    k = 0
    while len(out) < count:
        rng = np.random.default_rng([seed, k])
        alg = build_algebra(ALGEBRAS[k % len(ALGEBRAS)])
        kind = ("homomorphism", "half_endomorphism", "split", "split_nonstar")[(k // 4) % 4]
        sigma = random_twist(rng, alg, kind)
        basis = derivation_space(sigma, star_constrained=True)
        k += 1
        if basis:
            out.append((sigma, random_combination(rng, basis, real=True)))
    return out


def prop34_instances(count=50, seed=11):
    """``(sigma, d)`` with sigma *-linear and d a nonzero sigma-derivation."""
    out = []
    k = 0
    while len(out) < count:
        rng = np.random.default_rng([seed, k])
        alg = build_algebra(ALGEBRAS[k % len(ALGEBRAS)])
        kind = k // 4 % 4
        if kind == 0:
            sigma = random_homomorphism(rng, alg)
        elif kind == 1:
            sigma = random_homomorphism(rng, alg) / 2
        elif kind == 2:
            sigma = split_twist(rng, alg, star=True)[0]
        else:
            sigma = block_preserving_twist(rng, alg)
        star = bool(k % 2)
        basis = derivation_space(sigma, star_constrained=star)
        k += 1
        if basis:
            out.append((sigma, random_combination(rng, basis, real=star), star))
    return out


def sigma_tau_instances(count=40, seed=13):
    """``(sigma, tau, basis)`` from the star-constrained (sigma, tau) solver."""
    out = []
    for k in range(count):
        rng = np.random.default_rng([seed, k])
        alg = build_algebra(ALGEBRAS[k % len(ALGEBRAS)])
        if k % 2:
            sigma, tau = split_pair(rng, alg)
        else:
            sigma, tau = random_homomorphism(rng, alg), random_homomorphism(rng, alg)
        out.append((sigma, tau, derivation_space(sigma, star_constrained=True, tau=tau)))
    return out


def block_preserving_instances(count=20, seed=17):
    """Twists and derivations with all images inside the algebra."""
    out = []
    for k in range(count):
        rng = np.random.default_rng([seed, k])
        alg = build_algebra(([2, 3], [2, 2], [1, 1, 2], [1, 2, 2])[k % 4])
        sigma = block_preserving_twist(rng, alg)
        star = bool(k % 2)
        basis = derivation_space(sigma, star_constrained=star, within=alg)
        d = random_combination(rng, basis, real=star)
        if d is None:
            d = basis_zero(sigma)
        out.append((alg, sigma, d))
    return out


def basis_zero(sigma):
    return sigma * 0
