"""Projection constructions that repair a badly behaved twist.

Given a sigma-derivation ``d``, each construction picks an orthogonal
projection ``P`` on ``C^N`` and compresses on the right:

* :func:`construct_sigma_thm32`: ``P`` onto the joint range of ``d``; then
  ``d`` is a derivation for ``Sigma(A) = sigma(A) P``.  Needs ``d``
  *-preserving, which identifies ``ker P`` with the common kernel of ``d``.
* :func:`construct_sigma_thm33`: same, with the ranges of ``d`` and of
  ``A -> d(A^*)^*`` together; needs ``sigma`` *-linear instead.
* :func:`reduce_to_hom_prop34`: ``P`` onto the common kernel of the
  multiplicativity defects of a *-linear ``sigma``; ``Sigma = sigma P`` is a
  *-homomorphism and ``D = d P`` a ``Sigma``-derivation.
* :func:`reduce_general_prop36`: replaces ``sigma`` by ``(sigma + sigma^*)/2``
  (legitimate when ``d`` is *-preserving) and runs the previous reduction.

Spans and intersections over the whole algebra are taken over matrix units,
which is exhaustive by (bi)linearity.  Every identity the argument relies on
is re-measured and stored in the report.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import DEFAULT_TOLERANCES, StarAlgebra, Tolerances, relative_scale, spectral_norm, spectral_norms
from .derivations import dstar, leibniz_residual
from .errors import PreconditionError, ShapeError
from .linalg import column_span, nullspace, projector, subspace_distance
from .supermap import (
    SuperMap,
    _products,
    is_homomorphism,
    is_star_linear,
    multiplicativity_defects,
    right_compress,
    star_conjugate,
    star_part,
)

__all__ = [
    "ConstructionReport",
    "MembershipCheck",
    "range_span_projection",
    "range_span",
    "common_kernel_projection",
    "construct_sigma_thm32",
    "construct_sigma_thm33",
    "reduce_to_hom_prop34",
    "reduce_general_prop36",
    "projection_membership_rem35",
]


@dataclass
class ConstructionReport:
    method: str
    P: np.ndarray
    Sigma: SuperMap
    Dmap: SuperMap | None
    residuals: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failed(self):
        return sorted(name for name, ok in self.checks.items() if not ok)

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.P).real))

    def record(self, name, residual, scale, tol):
        self.residuals[name] = float(residual)
        self.checks[name] = bool(tol.accepts(residual, scale))

    def record_check(self, name, check):
        self.residuals[name] = check.residual
        self.checks[name] = check.passed


def range_span(mats, tol: Tolerances = DEFAULT_TOLERANCES, n=None, floor=0.0):
    """Projection onto the joint column space of ``mats`` and the singular values.

    Returns ``(P, singular_values)``; the singular values are those of the
    horizontally stacked matrices, for auditing borderline ranks.  Singular
    values at or below ``floor`` are dropped regardless of the relative
    threshold.
    """
    mats = list(mats)
    if not mats and n is None:
        raise ShapeError("the ambient dimension n is required when no matrices are given")
    if mats:
        sizes = {np.shape(M) for M in mats}
        if len(sizes) != 1 or len(next(iter(sizes))) != 2:
            raise ShapeError(f"matrices must share one square shape, got {sorted(sizes)}")
        n = mats[0].shape[0]
    basis, s = column_span(mats, n, tol.rank_tol_factor, floor)
    return projector(basis), s


def range_span_projection(mats, tol: Tolerances = DEFAULT_TOLERANCES, n=None) -> np.ndarray:
    """Orthogonal projection onto the closed linear span of the ranges of ``mats``."""
    return range_span(mats, tol, n)[0]


def common_kernel_projection(mats, tol: Tolerances = DEFAULT_TOLERANCES, n=None, floor=0.0) -> np.ndarray:
    """Orthogonal projection onto the intersection of the kernels of ``mats``.

    Computed directly as a nullspace of the vertically stacked matrices, so it
    is independent of :func:`range_span`.
    """
    mats = list(mats)
    if not mats:
        return np.eye(n, dtype=complex)
    basis, _ = nullspace(np.vstack(mats), tol.rank_tol_factor, floor)
    return projector(basis)


def _projection_checks(report, tol):
    P = report.P
    report.record("projection_idempotent", spectral_norm(P @ P - P), 1.0, tol)
    report.record("projection_selfadjoint", spectral_norm(P - P.conj().T), 1.0, tol)


def _require(check_name, ok, residual, message):
    if not ok:
        raise PreconditionError(f"{message} (residual {residual:.3g})", check_name, residual)


def _require_derivation(d, sigma, tol, what="d is not a sigma-derivation"):
    check = leibniz_residual(d, sigma, tol)
    _require("leibniz", check.passed, check.residual, what)
    return check


def construct_sigma_thm32(d: SuperMap, sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES, candidate=None):
    """Continuous replacement twist for a *-preserving sigma-derivation.

    ``P`` projects onto the span of all ranges ``d(E_i)``; ``Sigma = sigma P``.
    The report's ``kernel_identity`` is the gap between ``I - P`` and the
    projection onto the common kernel of the ``d(E_i)``.  A user-supplied
    ``candidate`` twist is checked as ``leibniz_candidate``.
    """
    _require_derivation(d, sigma, tol)
    ok, residual = is_star_linear(d, tol)
    _require("star_d", ok, residual, "d does not preserve the adjoint")

    N = d.N
    # images below identity_tol (on the max(1, .) scale every check uses) are zero
    floor = tol.identity_tol
    P, s = range_span(d.images, tol, N, floor)
    Sigma = right_compress(sigma, P)
    report = ConstructionReport("thm32", P, Sigma, None, singular_values=s)
    _projection_checks(report, tol)
    report.record_check("leibniz", leibniz_residual(d, Sigma, tol))
    K = common_kernel_projection(d.images, tol, N, floor)
    report.record("kernel_identity", subspace_distance(np.eye(N) - P, K), 1.0, tol)
    if candidate is not None:
        report.record_check("leibniz_candidate", leibniz_residual(d, candidate, tol))
    return report


def construct_sigma_thm33(d: SuperMap, sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Replacement twist using the ranges of both ``d`` and ``d^*``.

    Requires ``sigma`` *-linear so that ``d^*`` is again a sigma-derivation.
    """
    ok, residual = is_star_linear(sigma, tol)
    _require("star_sigma", ok, residual, "sigma is not *-linear")
    _require_derivation(d, sigma, tol)

    N = d.N
    ds = dstar(d)
    gens = np.concatenate([d.images, ds.images])
    floor = tol.identity_tol
    P, s = range_span(gens, tol, N, floor)
    Sigma = right_compress(sigma, P)
    report = ConstructionReport("thm33", P, Sigma, None, singular_values=s)
    _projection_checks(report, tol)
    report.record_check("leibniz", leibniz_residual(d, Sigma, tol))
    report.record_check("leibniz_dstar", leibniz_residual(ds, Sigma, tol))
    K = common_kernel_projection(gens, tol, N, floor)
    report.record("kernel_identity", subspace_distance(np.eye(N) - P, K), 1.0, tol)
    return report


def reduce_to_hom_prop34(d: SuperMap, sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Cut a *-linear twist down to a *-homomorphism.

    ``P`` projects onto the common kernel of all defects
    ``sigma(E_i E_j) - sigma(E_i) sigma(E_j)`` (the orthocomplement of their
    joint range).  ``P`` commutes with every ``sigma(A)`` and ``d(A)``;
    ``Sigma = sigma P`` is a *-homomorphism and ``Dmap = d P`` a
    ``Sigma``-derivation, *-preserving whenever ``d`` is.
    """
    ok, residual = is_star_linear(sigma, tol)
    _require("star_sigma", ok, residual, "sigma is not *-linear")
    _require_derivation(d, sigma, tol)

    N = d.N
    defects = multiplicativity_defects(sigma).reshape(-1, N, N)
    # defects that would pass the homomorphism check are rounding noise
    snorms = sigma.image_norms()
    prods = spectral_norms(_products(sigma.domain, sigma.images))
    floor = tol.identity_tol * relative_scale(prods.max(), snorms.max() ** 2)
    L, s = range_span(defects, tol, N, floor)
    P = np.eye(N) - L
    Sigma = right_compress(sigma, P)
    Dmap = right_compress(d, P)
    report = ConstructionReport("prop34", P, Sigma, Dmap, singular_values=s)
    _projection_checks(report, tol)

    ok, residual = is_homomorphism(Sigma, tol)
    report.residuals["homomorphism"] = residual
    report.checks["homomorphism"] = ok
    ok, residual = is_star_linear(Sigma, tol)
    report.residuals["star"] = residual
    report.checks["star"] = ok
    report.record_check("leibniz", leibniz_residual(Dmap, Sigma, tol))

    dnorms = d.image_norms()
    comm_sigma = max((spectral_norm(S @ P - P @ S) for S in sigma.images), default=0.0)
    comm_d = max((spectral_norm(X @ P - P @ X) for X in d.images), default=0.0)
    report.record("commutation_sigma", comm_sigma, relative_scale(*snorms), tol)
    report.record("commutation_d", comm_d, relative_scale(*dnorms), tol)

    K = common_kernel_projection(defects, tol, N, floor)
    report.record("kernel_identity", subspace_distance(P, K), 1.0, tol)

    if is_star_linear(d, tol)[0]:
        ok, residual = is_star_linear(Dmap, tol)
        report.residuals["star_D"] = residual
        report.checks["star_D"] = ok
    return report


def reduce_general_prop36(d: SuperMap, sigma: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES):
    """Reduction for an arbitrary twist and a *-preserving derivation.

    ``d`` is then also a ``sigma^*``-derivation, hence a
    ``(sigma + sigma^*)/2``-derivation, and that average is *-linear.  Both
    facts are measured before delegating to :func:`reduce_to_hom_prop34`.
    """
    ok, residual = is_star_linear(d, tol)
    _require("star_d", ok, residual, "d does not preserve the adjoint")
    _require_derivation(d, sigma, tol)

    against_star = leibniz_residual(d, star_conjugate(sigma), tol)
    tau = star_part(sigma)
    against_tau = leibniz_residual(d, tau, tol)
    _require("leibniz_tau", against_tau.passed, against_tau.residual, "d is not a (sigma + sigma*)/2-derivation")
    report = reduce_to_hom_prop34(d, tau, tol)
    report.method = "prop36"
    report.record_check("leibniz_sigma_star", against_star)
    report.record_check("leibniz_tau", against_tau)
    return report


@dataclass(frozen=True)
class MembershipCheck:
    """Outcome of the range-projection membership test.

    ``member`` is ``None`` when the hypothesis (every ``sigma(E_i)`` and
    ``d(E_i)`` lies in the algebra) does not hold; otherwise it says whether
    ``P`` lies in the algebra, with ``residual`` its distance to it.
    """

    hypothesis_met: bool
    member: bool | None
    residual: float
    hypothesis_residual: float

    @property
    def verdict(self) -> str:
        if not self.hypothesis_met:
            return "hypothesis not met"
        return "member" if self.member else "not a member"


def projection_membership_rem35(
    alg: StarAlgebra, report: ConstructionReport, sigma: SuperMap, d: SuperMap, tol: Tolerances = DEFAULT_TOLERANCES
) -> MembershipCheck:
    """Whether the reduction's ``P`` stays inside ``alg`` when ``sigma`` and ``d`` do."""
    worst = 0.0
    hypothesis = True
    for M in np.concatenate([sigma.images, d.images]):
        worst = max(worst, alg.coeffs_of(M)[1])
        hypothesis = hypothesis and alg.contains(M, tol)
    _, residual = alg.coeffs_of(report.P)
    if not hypothesis:
        return MembershipCheck(False, None, residual, worst)
    return MembershipCheck(True, bool(alg.contains(report.P, tol)), residual, worst)
