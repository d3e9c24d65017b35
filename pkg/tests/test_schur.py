"""Schur polynomials, determinant routes, and principal specializations."""

from fractions import Fraction

import pytest

from qtoda.errors import DegreeBoundExceeded
from qtoda.partitions import EMPTY, Partition, enumerate_partitions
from qtoda.qfield import ExponentPoly, QFieldElem, QPowerSum
from qtoda.schur import (
    PowerSumPoly,
    PowerSumRing,
    Specialization,
    specialize_neg_rho,
    specialize_nu_rho,
    specialize_rho,
)

P1 = PowerSumPoly.p(1)
P2 = PowerSumPoly.p(2)
P3 = PowerSumPoly.p(3)


@pytest.fixture(scope="module")
def ring():
    return PowerSumRing(8)


def test_complete_homogeneous_examples(ring):
    assert ring.complete_homogeneous(1) == P1
    assert ring.complete_homogeneous(2) == (P1 * P1).scale(Fraction(1, 2)) + P2.scale(
        Fraction(1, 2)
    )
    assert ring.complete_homogeneous(-1).is_zero()
    assert ring.complete_homogeneous(0) == PowerSumPoly.one()


def test_schur_examples(ring):
    assert ring.schur(Partition((1,))) == P1
    assert ring.schur(Partition((1, 1))) == (P1 * P1).scale(Fraction(1, 2)) - P2.scale(
        Fraction(1, 2)
    )
    # frozen value derived from the 2x2 minor expansion S2*S1 - S3*S0
    assert ring.schur(Partition((2, 1))) == (P1 * P1 * P1).scale(Fraction(1, 3)) - P3.scale(
        Fraction(1, 3)
    )


def test_skew_schur_examples(ring):
    assert ring.skew_schur(Partition((2,)), Partition((1,))) == P1
    assert ring.skew_schur(Partition((1,)), Partition((1,))) == PowerSumPoly.one()
    assert ring.skew_schur(Partition((1,)), Partition((2,))).is_zero()
    assert ring.skew_schur(Partition((2, 1)), EMPTY) == ring.schur(Partition((2, 1)))


def test_determinant_size_independence(ring):
    for mu in enumerate_partitions(6):
        assert ring.schur(mu) == ring.schur(mu, size=mu.length + 2)


def test_negation_identity(ring):
    for mu in enumerate_partitions(6):
        assert ring.schur(mu).negate_p() == ring.schur(mu.conjugate()).scale(
            (-1) ** mu.weight
        )


def test_skew_negation_identity(ring):
    # includes the frozen example S_{(2)/(1)} -> -p1 = (-1)^3 S_{(1,1)/(1)}
    assert ring.skew_schur(Partition((2,)), Partition((1,))).negate_p() == (
        ring.skew_schur(Partition((1, 1)), Partition((1,))).scale(-1)
    )
    for mu in enumerate_partitions(5):
        for nu in enumerate_partitions(mu.weight):
            if not mu.contains(nu):
                continue
            lhs = ring.skew_schur(mu, nu).negate_p()
            rhs = ring.skew_schur(mu.conjugate(), nu.conjugate()).scale(
                (-1) ** (mu.weight + nu.weight)
            )
            assert lhs == rhs, (mu, nu)


def test_homogeneity(ring):
    for mu in enumerate_partitions(6):
        assert ring.schur(mu).is_homogeneous(mu.weight)


def test_degree_bound_enforced():
    small = PowerSumRing(2)
    with pytest.raises(DegreeBoundExceeded):
        small.schur(Partition((3,)))
    with pytest.raises(DegreeBoundExceeded):
        small.complete_homogeneous(3)


def test_specialize_rho_closed_form():
    half = Fraction(1, 2)
    raw = QFieldElem(
        QPowerSum.one(),
        QPowerSum.monomial(ExponentPoly.const(half))
        + QPowerSum.monomial(ExponentPoly.const(-half), Fraction(-1)),
    )
    assert specialize_rho(1) == raw


def test_specialize_nu_rho_examples():
    for k in (1, 2, 3):
        assert specialize_nu_rho(EMPTY, k) == specialize_rho(k)
    geom_den = QPowerSum.one() + QPowerSum.monomial(ExponentPoly.const(-1), Fraction(-1))
    expect = QFieldElem(QPowerSum.monomial(ExponentPoly.const(Fraction(1, 2)))) + QFieldElem(
        QPowerSum.monomial(ExponentPoly.const(Fraction(-3, 2))), geom_den
    )
    assert specialize_nu_rho(Partition((1,)), 1) == expect


def test_neg_rho_is_continuation():
    for k in (1, 2, 3, 4):
        assert specialize_neg_rho(k) == -specialize_rho(k)


def test_power_sum_special_point_relation():
    """p_k(q^(nu+rho)) = -p_k(q^(-nu'-rho)), with the right side computed by
    the same head/tail splitting applied to the reflected alphabet."""

    def reflected(nu: Partition, k: int) -> QFieldElem:
        nuc = nu.conjugate()
        ell = nuc.length
        den = QPowerSum.one() + QPowerSum.monomial(
            ExponentPoly.const(Fraction(k)), Fraction(-1)
        )
        num = QPowerSum.monomial(ExponentPoly.const(Fraction(k) * (ell + Fraction(1, 2))))
        for i in range(1, ell + 1):
            head = QPowerSum.monomial(
                ExponentPoly.const(-Fraction(k) * (nuc.part(i) - i + Fraction(1, 2)))
            )
            num = num + head * den
        return QFieldElem(num, den)

    for nu in enumerate_partitions(4):
        for k in range(1, 5):
            assert specialize_nu_rho(nu, k) == -reflected(nu, k), (nu, k)


def test_specialization_evaluator_is_ring_hom(ring):
    rho = Specialization.rho(6)
    f = ring.schur(Partition((2, 1)))
    g = ring.schur(Partition((1, 1)))
    assert rho.evaluate(f * g) == rho.evaluate(f) * rho.evaluate(g)
    assert rho.evaluate(f + g) == rho.evaluate(f) + rho.evaluate(g)
    assert rho.evaluate(PowerSumPoly.one()).is_one()


def test_specialization_matches_direct_value():
    rho = Specialization.rho(4)
    assert rho.evaluate(PowerSumPoly.p(3)) == specialize_rho(3)
    missing = Specialization({1: specialize_rho(1)})
    with pytest.raises(DegreeBoundExceeded):
        missing.evaluate(PowerSumPoly.p(2))
