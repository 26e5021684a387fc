"""A continuous derivation with a wild twist, on a grid of ``[0, 2]``.

``C[0, 2]`` is replaced by the diagonal algebra on ``grid_n = 4m + 1``
equally spaced points ``t_k = k / (2m)``, so ``t_m = 1/2`` and ``t_{2m} = 1``
are grid points and every branch of the twist is evaluated exactly.

With ``h(t) = max(t - 1, 0)`` the derivation is ``d(f) = f h`` and the twist
is

    sigma(f)(t) = (alpha f|_{[0,1/2]})(t)                        t <= 1/2
                = 2(1 - t) (alpha f|_{[0,1/2]})(1/2) + (t - 1/2) f(1)   1/2 <= t <= 1
                = f(t) / 2                                        1 <= t <= 2

for an arbitrary matrix ``alpha`` acting on the samples with ``t <= 1/2``.
The Leibniz rule holds for every ``alpha``: ``h`` vanishes where ``sigma`` is
wild and ``sigma`` halves ``f`` where ``h`` does not vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import StarAlgebra, build_algebra
from .errors import InvalidSpecError
from .supermap import SuperMap, identity_map

__all__ = ["Example26Instance", "build_example26"]


@dataclass(frozen=True)
class Example26Instance:
    grid_n: int
    grid: np.ndarray
    h: np.ndarray
    alpha: np.ndarray
    twist_matrix: np.ndarray
    alg: StarAlgebra
    sigma: SuperMap
    d: SuperMap

    @property
    def m(self) -> int:
        return (self.grid_n - 1) // 4

    @property
    def positive_support(self) -> np.ndarray:
        """Indicator of the grid points with ``t > 1`` (where ``h > 0``)."""
        return (np.arange(self.grid_n) > 2 * self.m).astype(float)

    def global_sigma(self) -> SuperMap:
        """The continuous twist ``f -> f / 2`` that also works for ``d``."""
        return identity_map(self.alg) / 2


def _twist_matrix(alpha, m, grid):
    """Matrix ``S`` with ``sigma(f) = S f`` on the samples."""
    n = grid.size
    S = np.zeros((n, n), dtype=alpha.dtype if np.iscomplexobj(alpha) else float)
    S[: m + 1, : m + 1] = alpha
    mid = np.arange(m + 1, 2 * m)
    S[mid, :] = 2 * (1 - grid[mid])[:, None] * S[m, :][None, :]
    S[mid, 2 * m] += grid[mid] - 0.5
    tail = np.arange(2 * m, n)
    S[tail, tail] = 0.5
    return S


def build_example26(grid_n=9, alpha="zero", seed=None) -> Example26Instance:
    """Discretized instance.

    ``alpha`` is ``"zero"``, ``"random"`` (standard normal entries from
    ``seed``) or an explicit ``(m + 1) x (m + 1)`` matrix, real or complex.
    """
    if isinstance(grid_n, bool) or not isinstance(grid_n, (int, np.integer)):
        raise InvalidSpecError(f"grid_n must be an integer, got {grid_n!r}")
    if grid_n < 5 or (grid_n - 1) % 4:
        raise InvalidSpecError(f"grid_n must be 4m + 1 with m >= 1, got {grid_n}")
    m = (grid_n - 1) // 4
    if isinstance(alpha, str):
        if alpha == "zero":
            alpha = np.zeros((m + 1, m + 1))
        elif alpha == "random":
            alpha = np.random.default_rng(seed).standard_normal((m + 1, m + 1))
        else:
            raise InvalidSpecError(f"alpha must be 'zero', 'random' or a matrix, got {alpha!r}")
    else:
        alpha = np.asarray(alpha)
        if alpha.shape != (m + 1, m + 1):
            raise InvalidSpecError(f"alpha must be {m + 1}x{m + 1} for grid_n={grid_n}, got {alpha.shape}")
        if not np.all(np.isfinite(alpha)):
            raise InvalidSpecError("alpha entries must be finite")

    grid = np.arange(grid_n) / (2 * m)
    h = np.where(np.arange(grid_n) > 2 * m, grid - 1.0, 0.0)
    S = _twist_matrix(alpha, m, grid)
    alg = build_algebra([1] * grid_n)
    sigma = SuperMap(alg, [np.diag(col) for col in S.T])
    d = SuperMap(alg, [np.diag(h * e) for e in np.eye(grid_n)])
    return Example26Instance(grid_n, grid, h, alpha, S, alg, sigma, d)
