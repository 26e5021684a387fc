"""Seeded random instances: unitaries, algebra elements and twist maps.

All functions take a ``numpy.random.Generator``; nothing here touches global
random state.

Structured twists are what make the derivation and projection machinery
non-trivial: a fully random ``sigma`` almost never admits a nonzero
sigma-derivation.  :func:`split_twist` builds

    sigma(A) = W (pi(A) + rho(A)) W^*

with ``pi`` a *-homomorphism into the first ``k`` coordinates, ``rho`` an
arbitrary map into the remaining ones and ``W`` a random unitary, so that the
multiplicativity defects live exactly on the ``rho`` part.
"""

from __future__ import annotations

import numpy as np

from .algebra import StarAlgebra
from .supermap import SuperMap, identity_map, star_part

__all__ = [
    "complex_normal",
    "random_unitary",
    "random_element",
    "random_contraction",
    "random_linear_map",
    "random_star_linear_map",
    "block_homomorphism",
    "random_homomorphism",
    "split_twist",
    "split_pair",
    "block_preserving_twist",
    "random_twist",
    "TWIST_FAMILIES",
]


def complex_normal(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng, n) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    q, r = np.linalg.qr(complex_normal(rng, (n, n)))
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def random_element(rng, alg: StarAlgebra) -> np.ndarray:
    return alg.embed(complex_normal(rng, alg.dim))


def random_contraction(rng, alg: StarAlgebra) -> np.ndarray:
    """Random algebra element of spectral norm exactly 1."""
    A = random_element(rng, alg)
    return A / np.linalg.norm(A, 2)


def random_linear_map(rng, alg: StarAlgebra) -> SuperMap:
    return SuperMap(alg, complex_normal(rng, (alg.dim, alg.N, alg.N)))


def random_star_linear_map(rng, alg: StarAlgebra) -> SuperMap:
    return star_part(random_linear_map(rng, alg))


def block_homomorphism(alg: StarAlgebra, multiplicities, size) -> np.ndarray:
    """Images of ``A -> (A_1 kron I_{m_1}) + ... + 0`` inside ``M_size``.

    ``multiplicities[b]`` copies of block ``b`` are laid along the diagonal;
    the remaining ``size - sum(n_b m_b)`` coordinates are sent to 0.
    """
    used = sum(n * m for n, m in zip(alg.blocks, multiplicities))
    if used > size:
        raise ValueError(f"multiplicities need {used} coordinates, only {size} available")
    images = np.zeros((alg.dim, size, size), dtype=complex)
    units = alg.basis()
    pos = 0
    for b, (n, m) in enumerate(zip(alg.blocks, multiplicities)):
        sl = alg.block_slices()[b]
        for _ in range(m):
            images[:, pos:pos + n, pos:pos + n] = units[:, sl, sl]
            pos += n
    return images


def _multiplicity_choices(alg, size):
    """All multiplicity vectors fitting in ``size`` coordinates."""
    out = [()]
    for n in alg.blocks:
        out = [c + (m,) for c in out for m in range(size // n + 1)]
    return [c for c in out if sum(n * m for n, m in zip(alg.blocks, c)) <= size]


def random_homomorphism(rng, alg: StarAlgebra, nonzero=True) -> SuperMap:
    """Random *-homomorphism ``alg -> M_N``: block embedding conjugated by a unitary."""
    choices = _multiplicity_choices(alg, alg.N)
    if nonzero:
        choices = [c for c in choices if any(c)]
    mult = choices[rng.integers(len(choices))]
    W = random_unitary(rng, alg.N)
    images = block_homomorphism(alg, mult, alg.N)
    return SuperMap(alg, W @ images @ W.conj().T)


def _split_layout(rng, alg):
    """Multiplicities of the homomorphic part, leaving room for the rest if possible."""
    N = alg.N
    choices = [c for c in _multiplicity_choices(alg, N) if any(c)]
    proper = [c for c in choices if sum(n * m for n, m in zip(alg.blocks, c)) < N]
    pool = proper or choices
    mult = pool[rng.integers(len(pool))]
    return mult, sum(n * m for n, m in zip(alg.blocks, mult))


def _random_rest(rng, alg, size, star):
    rho = complex_normal(rng, (alg.dim, size, size))
    if star:
        rho = (rho + rho[alg.adjoint_index].conj().transpose(0, 2, 1)) / 2
    return rho


def split_twist(rng, alg: StarAlgebra, star=True):
    """``sigma = W (pi + rho) W^*`` with ``pi`` a *-homomorphism on part of ``C^N``.

    ``rho`` is random (and *-linear when ``star``) on the complementary
    coordinates.  Returns ``(sigma, k)`` with ``k`` the dimension of the
    homomorphic part; ``k`` is chosen so both parts are nonempty when the
    block sizes allow it.
    """
    mult, k = _split_layout(rng, alg)
    images = block_homomorphism(alg, mult, alg.N)
    if alg.N > k:
        images[:, k:, k:] = _random_rest(rng, alg, alg.N - k, star)
    W = random_unitary(rng, alg.N)
    return SuperMap(alg, W @ images @ W.conj().T), k


def split_pair(rng, alg: StarAlgebra):
    """Two *-linear twists ``W (pi + rho_1) W^*`` and ``W (pi + rho_2) W^*``.

    They share the unitary and the homomorphic part and differ on the rest,
    which gives (sigma, tau)-derivations beyond ``sigma - tau``.
    """
    mult, k = _split_layout(rng, alg)
    base = block_homomorphism(alg, mult, alg.N)
    W = random_unitary(rng, alg.N)
    out = []
    for _ in range(2):
        images = base.copy()
        if alg.N > k:
            images[:, k:, k:] = _random_rest(rng, alg, alg.N - k, True)
        out.append(SuperMap(alg, W @ images @ W.conj().T))
    return tuple(out)


def block_preserving_twist(rng, alg: StarAlgebra, star=True, homomorphic=None):
    """A ``sigma`` with every image inside ``alg``, built block by block.

    Block ``b`` of ``sigma(A)`` is either ``U_b A_b U_b^*`` (a unitary
    conjugate of the ``b``-th component) or a random (by default *-linear)
    function of ``A``.  ``homomorphic`` fixes which blocks take the first
    form; by default each block flips a coin, with at least one of each kind
    when there are two or more blocks.
    """
    k = len(alg.blocks)
    if homomorphic is None:
        homomorphic = rng.integers(0, 2, size=k).astype(bool)
        if k > 1 and homomorphic.all():
            homomorphic[rng.integers(k)] = False
        if k > 1 and not homomorphic.any():
            homomorphic[rng.integers(k)] = True
    units = alg.basis()
    images = np.zeros((alg.dim, alg.N, alg.N), dtype=complex)
    for b, sl in enumerate(alg.block_slices()):
        n = alg.blocks[b]
        if homomorphic[b]:
            U = random_unitary(rng, n)
            images[:, sl, sl] = U @ units[:, sl, sl] @ U.conj().T
        else:
            images[:, sl, sl] = _random_rest(rng, alg, n, star)
    return SuperMap(alg, images)


def random_twist(rng, alg: StarAlgebra, family: str) -> SuperMap:
    """Draw a ``sigma`` from one of :data:`TWIST_FAMILIES`."""
    if family == "linear":
        return random_linear_map(rng, alg)
    if family == "star_linear":
        return random_star_linear_map(rng, alg)
    if family == "homomorphism":
        return random_homomorphism(rng, alg)
    if family == "half_endomorphism":
        return random_homomorphism(rng, alg) / 2
    if family == "split":
        return split_twist(rng, alg, star=True)[0]
    if family == "split_nonstar":
        return split_twist(rng, alg, star=False)[0]
    if family == "scaled_identity":
        return identity_map(alg) * float(rng.uniform(0.2, 2.0))
    raise ValueError(f"unknown twist family {family!r}")


TWIST_FAMILIES = (
    "linear",
    "star_linear",
    "homomorphism",
    "half_endomorphism",
    "split",
    "split_nonstar",
    "scaled_identity",
)
