import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from sdlab.algebra import build_algebra
from sdlab.constructions import (
    common_kernel_projection,
    construct_sigma_thm32,
    construct_sigma_thm33,
    projection_membership_rem35,
    range_span_projection,
    reduce_general_prop36,
    reduce_to_hom_prop34,
)
from sdlab.derivations import derivation_space, inner_derivation, leibniz_residual
from sdlab.errors import PreconditionError, ShapeError
from sdlab.example26 import build_example26
from sdlab.samplers import (
    block_preserving_twist,
    random_element,
    random_homomorphism,
    random_star_linear_map,
    random_unitary,
    split_twist,
)
from sdlab.supermap import from_function, identity_map, is_star_linear, star_part, zero_map

from instances import random_combination


def ad(alg, X):
    return from_function(alg, lambda A: X @ A - A @ X)


@pytest.fixture
def m2():
    return build_algebra([2])


def test_range_span_projection_examples():
    np.testing.assert_allclose(range_span_projection([np.eye(3)]), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(range_span_projection([np.diag([1.0, 0.0])]), np.diag([1.0, 0.0]), atol=1e-14)
    assert not range_span_projection([], n=3).any()
    with pytest.raises(ShapeError):
        range_span_projection([])
    with pytest.raises(ShapeError):
        range_span_projection([np.eye(2), np.eye(3)])


def test_common_kernel_is_complement_of_adjoint_range(rng):
    mats = [rng.standard_normal((4, 1)) @ rng.standard_normal((1, 4)) for _ in range(2)]
    K = common_kernel_projection(mats)
    R = range_span_projection([M.conj().T for M in mats])
    np.testing.assert_allclose(K, np.eye(4) - R, atol=1e-12)


def test_thm32_zero_derivation(m2, rng):
    sigma = random_star_linear_map(rng, m2)
    report = construct_sigma_thm32(zero_map(m2), sigma)
    assert report.passed
    assert not report.P.any()
    assert not report.Sigma.images.any()
    assert report.rank == 0


def test_thm32_inner_derivation_range(m2):
    # ad_X with X skew-adjoint is *-preserving
    X = np.array([[0, 1], [-1, 0]], dtype=complex)
    d = ad(m2, X)
    report = construct_sigma_thm32(d, identity_map(m2))
    assert report.passed
    stacked = np.hstack(list(d.images))
    rank = np.linalg.matrix_rank(stacked)
    assert report.rank == rank == 2
    np.testing.assert_allclose(report.P, np.eye(2), atol=1e-12)
    assert report.residuals["leibniz"] <= 1e-12


def test_thm32_brute_force_rank_for_nilpotent_generator(m2):
    E01 = m2.basis_element(1)
    d = ad(m2, 1j * (E01 + E01.T))
    report = construct_sigma_thm32(d, identity_map(m2))
    brute = np.linalg.matrix_rank(np.hstack(list(d.images)))
    assert report.rank == brute
    assert report.residuals["leibniz"] <= 1e-12


def test_thm32_requires_star_preserving(m2):
    d = ad(m2, m2.basis_element(1))
    with pytest.raises(PreconditionError) as info:
        construct_sigma_thm32(d, identity_map(m2))
    assert info.value.check == "star_d"


def test_thm32_requires_derivation(m2):
    iota = identity_map(m2)
    with pytest.raises(PreconditionError) as info:
        construct_sigma_thm32(iota, iota)
    assert info.value.check == "leibniz"


def test_thm32_candidate_check():
    inst = build_example26(9, alpha="random", seed=3)
    report = construct_sigma_thm32(inst.d, inst.sigma, candidate=inst.global_sigma())
    assert report.checks["leibniz_candidate"]
    assert report.passed


def test_thm33_matches_thm32_for_star_derivation(m2):
    X = np.array([[0, 2], [-2, 1j]], dtype=complex)
    d = ad(m2, X)
    iota = identity_map(m2)
    a, b = construct_sigma_thm32(d, iota), construct_sigma_thm33(d, iota)
    np.testing.assert_allclose(a.P, b.P, atol=1e-12)


def test_thm33_non_normal_generator(m2):
    X = np.array([[1, 3], [0, 2]], dtype=complex)
    report = construct_sigma_thm33(ad(m2, X), identity_map(m2))
    assert report.passed
    assert report.residuals["leibniz"] <= 1e-12
    assert report.residuals["leibniz_dstar"] <= 1e-12


def test_thm33_zero_derivation(m2):
    report = construct_sigma_thm33(zero_map(m2), identity_map(m2))
    assert not report.P.any()
    assert not report.Sigma.images.any()


def test_thm33_requires_star_twist(m2):
    with pytest.raises(PreconditionError):
        construct_sigma_thm33(zero_map(m2), identity_map(m2) * 1j)


def test_prop34_on_homomorphism_is_identity_projection(rng):
    alg = build_algebra([1, 2])
    sigma = random_homomorphism(rng, alg)
    d = inner_derivation(sigma, sigma, random_element(rng, alg))
    report = reduce_to_hom_prop34(d, sigma)
    assert report.passed
    np.testing.assert_allclose(report.P, np.eye(alg.N), atol=1e-12)
    np.testing.assert_allclose(report.Sigma.images, sigma.images, atol=1e-12)
    np.testing.assert_allclose(report.Dmap.images, d.images, atol=1e-12)


def test_prop34_example26_zero_alpha():
    inst = build_example26(9, alpha="zero")
    report = reduce_to_hom_prop34(inst.d, inst.sigma)
    assert report.passed
    expected = (inst.grid <= 0.5).astype(float)
    np.testing.assert_allclose(np.diag(report.P).real, expected, atol=1e-12)
    np.testing.assert_allclose(report.P, np.diag(expected), atol=1e-12)
    assert np.abs(report.Sigma.images).max() <= 1e-12
    assert np.abs(report.Dmap.images).max() <= 1e-12
    assert max(report.residuals.values()) <= 1e-12


def test_prop34_requires_star_twist(m2):
    with pytest.raises(PreconditionError):
        reduce_to_hom_prop34(zero_map(m2), identity_map(m2) * 1j)


@seed(31)
@settings(max_examples=15, deadline=None)
@given(draw=st.integers(0, 2**32 - 1), star=st.booleans())
def test_prop34_on_random_star_twist(draw, star):
    rng = np.random.default_rng(draw)
    alg = build_algebra([2])
    sigma, _ = split_twist(rng, alg, star=True)
    basis = derivation_space(sigma, star_constrained=star)
    if not basis:
        return
    d = random_combination(rng, basis, real=star)
    report = reduce_to_hom_prop34(d, sigma)
    assert report.passed, report.failed
    if star:
        assert report.checks["star_D"]


def test_prop36_star_twist_matches_prop34(rng):
    alg = build_algebra([2])
    sigma = random_homomorphism(rng, alg) / 2
    d = random_combination(rng, derivation_space(sigma, star_constrained=True), real=True)
    a = reduce_general_prop36(d, sigma)
    b = reduce_to_hom_prop34(d, sigma)
    assert a.method == "prop36"
    np.testing.assert_allclose(a.P, b.P, atol=1e-12)
    assert a.passed


def test_prop36_zero_derivation(rng):
    alg = build_algebra([1, 2])
    sigma = split_twist(rng, alg, star=False)[0]
    report = reduce_general_prop36(zero_map(alg), sigma)
    assert report.passed
    assert max(v for k, v in report.residuals.items() if k.startswith("leibniz")) == 0


def test_prop36_example26_random_alpha():
    inst = build_example26(9, alpha="random", seed=5)
    assert is_star_linear(inst.d)[0]
    assert leibniz_residual(inst.d, star_part(inst.sigma)).passed
    report = reduce_general_prop36(inst.d, inst.sigma)
    assert report.passed, report.failed


def test_rem35_block_preserving_member(rng):
    alg = build_algebra([2, 3])
    sigma = block_preserving_twist(rng, alg)
    basis = derivation_space(sigma, star_constrained=True, within=alg)
    d = random_combination(rng, basis, real=True) if basis else zero_map(alg)
    report = reduce_to_hom_prop34(d, sigma)
    check = projection_membership_rem35(alg, report, sigma, d)
    assert check.verdict == "member"
    assert check.residual <= 1e-10


def test_rem35_hypothesis_not_met(rng):
    alg = build_algebra([1, 1])
    U = random_unitary(rng, 2)
    sigma = from_function(alg, lambda A: U @ A @ U.conj().T)
    d = zero_map(alg)
    report = reduce_to_hom_prop34(d, sigma)
    check = projection_membership_rem35(alg, report, sigma, d)
    assert not check.hypothesis_met
    assert check.member is None
    assert check.verdict == "hypothesis not met"


def test_rem35_identity_twist(rng):
    alg = build_algebra([1, 2])
    iota = identity_map(alg)
    X = random_element(rng, alg)
    d = ad(alg, X - X.conj().T)
    report = reduce_to_hom_prop34(d, iota)
    check = projection_membership_rem35(alg, report, iota, d)
    assert check.member
    np.testing.assert_allclose(report.P, np.eye(alg.N), atol=1e-12)


def test_report_records_singular_values(m2):
    X = np.array([[0, 1], [-1, 0]], dtype=complex)
    report = construct_sigma_thm32(ad(m2, X), identity_map(m2))
    assert report.singular_values.size == 2
    assert report.failed == []


def test_rounding_noise_does_not_inflate_ranges(rng):
    alg = build_algebra([2])
    noise = from_function(alg, lambda A: 1e-15 * (A - A.conj().T) * 1j)
    report = construct_sigma_thm32(noise, identity_map(alg))
    assert report.rank == 0
    sigma = random_homomorphism(rng, alg)
    report = reduce_to_hom_prop34(zero_map(alg), sigma)
    np.testing.assert_allclose(report.P, np.eye(2), atol=1e-12)
