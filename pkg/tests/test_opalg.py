"""Difference-operator algebra, factorization route, tau-quotient route."""

import random
from fractions import Fraction

import pytest

from qtoda.errors import (
    IncompatibleStep,
    NonCoprime,
    NonInvertibleLeading,
    InvalidTau,
    TruncationInsufficient,
)
from qtoda.opalg import (
    DiffOp,
    SessionParams,
    SitePoly,
    TauDressing,
    build_W0,
    build_W0bar,
    check_LM_relation,
    cross_check_initial,
    descending_factor_series,
    difference_on_window,
    dressing_from_tau,
    elementary_geometric,
    expected_initial_lax,
    initial_M,
    initial_lax,
    monomial_pow,
    op_inverse,
)
from qtoda.partitions import EMPTY, Partition
from qtoda.qfield import ExponentPoly, QFieldElem, QPowerSum, qpow
from qtoda.schur import PowerSumRing, Specialization, specialize_neg_rho
from qtoda.vertex import VertexContext, tau_table

ONE = QFieldElem.one()
QS = qpow(ExponentPoly.of(c1=1))  # q^s


def test_defining_relation():
    # Lam^d  u(s) Lam^-d  =  u(s+d)
    d = Fraction(1, 3)
    lam = DiffOp.monomial(d, 1, ONE)
    u = DiffOp.monomial(d, -1, QS)
    prod = lam * u
    assert prod.indices() == [0]
    assert prod.coeff(0) == QS.shift(d)


def test_identity_neutral():
    ident = DiffOp.monomial(Fraction(1, 2), 0, ONE)
    a = DiffOp(Fraction(1, 2), {1: ONE, -1: -QS})
    assert not difference_on_window(a * ident, a)[1]
    assert not difference_on_window(ident * a, a)[1]


def test_symbolic_square():
    # (Lam^(1/2) - u Lam^(-1/2))^2, the derived expansion
    u = SitePoly.u(0)
    lax = DiffOp(Fraction(1, 2), {1: SitePoly.one(), -1: -u})
    sq = lax * lax
    assert sq.coeff(2) == SitePoly.one()
    assert sq.coeff(0) == -(SitePoly.u(Fraction(1, 2)) + SitePoly.u(0))
    assert sq.coeff(-2) == SitePoly.u(0) * SitePoly.u(Fraction(-1, 2))
    assert sq.coeff(1).is_zero() and sq.coeff(-1).is_zero()


def random_triangular(rng, step=Fraction(1), nterms=4):
    coeffs = {0: ONE}
    for n in range(1, nterms):
        c0 = Fraction(rng.randint(-3, 3), rng.choice([1, 2]))
        c1 = Fraction(rng.randint(-2, 2))
        coeffs[-n] = qpow(ExponentPoly.of(c0=c0, c1=c1), rng.choice([1, -1]))
    return DiffOp(step, coeffs, floor=-(nterms - 1), ceil=None)


def test_associativity_random():
    rng = random.Random(3)
    for _ in range(6):
        a = random_triangular(rng, nterms=3)
        b = random_triangular(rng, nterms=3)
        c = random_triangular(rng, nterms=3)
        assert not difference_on_window((a * b) * c, a * (b * c))[1]


def test_inverse_of_identity():
    ident = DiffOp.monomial(Fraction(1), 0, ONE)
    inv = op_inverse(ident, -3)
    assert inv.indices() == [0] and inv.coeff(0).is_one() and inv.is_exact()


def test_inverse_geometric_series():
    x = qpow(ExponentPoly.of(c0=Fraction(1, 2)))
    a = DiffOp(Fraction(1), {0: ONE, -1: -x})
    inv = op_inverse(a, -5)
    assert inv.coeff(0).is_one()
    assert inv.coeff(-1) == x
    assert inv.coeff(-2) == x * x.shift(-1)


def test_inverse_two_sided():
    rng = random.Random(9)
    for _ in range(5):
        a = random_triangular(rng, nterms=4)
        inv = op_inverse(a, -6)
        left = a * inv
        right = inv * a
        assert left.coeff(0).is_one() and right.coeff(0).is_one()
        assert all(c.is_zero() for n, c in left.coeffs.items() if n != 0)
        assert all(c.is_zero() for n, c in right.coeffs.items() if n != 0)


def test_inverse_pivot_errors():
    both = DiffOp(Fraction(1), {0: ONE, 1: QS, -1: QS}, floor=-1, ceil=1)
    with pytest.raises(NonInvertibleLeading):
        op_inverse(both, -3)
    # coefficient ring without inversion (undetermined lattice function)
    sym = DiffOp(Fraction(1), {0: SitePoly.u(0), -1: -SitePoly.one()})
    with pytest.raises(NonInvertibleLeading):
        op_inverse(sym, -3)
    # a ceiling-truncated series cannot pivot on its top power
    upper = DiffOp(Fraction(1), {0: ONE, 1: QS}, floor=None, ceil=1)
    with pytest.raises(NonInvertibleLeading):
        op_inverse(upper, -3, side="top")


def test_step_refinement():
    a = DiffOp(Fraction(1), {1: ONE, 0: QS})
    fine = a.with_step(Fraction(1, 3))
    assert fine.indices() == [0, 3]
    mixed = fine * DiffOp.monomial(Fraction(1, 2), 1, ONE)
    assert mixed.step == Fraction(1, 6)
    with pytest.raises(IncompatibleStep):
        DiffOp.monomial(Fraction(1, 3), 1, ONE) * DiffOp.monomial(
            Fraction(1, 2000003), 1, ONE
        )


def test_window_arithmetic_conservative():
    w = DiffOp(Fraction(1), {0: ONE, -1: QS, -2: QS}, floor=-2, ceil=None)
    v = DiffOp(Fraction(1), {0: ONE, -1: QS}, floor=-1, ceil=None)
    prod = w * v
    # unknown terms of v below -1 meet the top of w at 0: floor is -1+0
    assert prod.floor == -1 and prod.ceil is None
    exact = DiffOp(Fraction(1), {0: ONE, -1: QS})
    assert (exact * exact).floor is None
    with pytest.raises(TruncationInsufficient):
        prod.coeff(-2)


def test_session_params_validation():
    with pytest.raises(NonCoprime):
        SessionParams(2, 4, 1)
    with pytest.raises(InvalidTau):
        SessionParams(1, 1, -1)
    with pytest.raises(InvalidTau):
        SessionParams(1, 2, -1)
    p = SessionParams(2, 3, 1)
    assert p.tau == Fraction(3, 2) and p.refinement == 5 and p.step == Fraction(1, 5)
    n = SessionParams(3, 2, -1)
    assert n.tau == Fraction(-2, 3) and n.refinement == 1
    assert n.down_index == 2 and n.up_index == 3


def test_factor_series_leading_coefficients():
    series = descending_factor_series(3)
    geom_den = QPowerSum.one() + QPowerSum.monomial(ExponentPoly.const(1), Fraction(-1))
    expected = -QFieldElem(QPowerSum.monomial(ExponentPoly.const(Fraction(1, 2))), geom_den)
    assert series.coeff(-1) == expected
    assert series.coeff(0).is_one()
    assert elementary_geometric(0).is_one()


def test_factor_series_matches_schur_column_values():
    """Independent route: e_n and h_n of the geometric alphabet are the
    single-column / single-row Schur values at the reflected point."""
    from qtoda.opalg import complete_geometric

    ring = PowerSumRing(5)
    # the alphabet {q^(1/2), q^(3/2), ...} has p_k = q^(k/2)/(1-q^k), which is
    # exactly the reflected-point continuation value
    spec = Specialization({k: specialize_neg_rho(k) for k in range(1, 6)})
    for n in range(1, 5):
        column = Partition((1,) * n)
        row = Partition((n,))
        assert spec.evaluate(ring.schur(column)) == elementary_geometric(n)
        assert spec.evaluate(ring.schur(row)) == complete_geometric(n)


@pytest.fixture(scope="module")
def params11():
    return SessionParams(1, 1, 1, T=4)


@pytest.mark.parametrize("T", [4, 8])
def test_build_path_identity(T):
    params = SessionParams(1, 2, 1, T=T)
    for build in (build_W0, build_W0bar):
        closed = build(params)
        product = build(params, via_product=True)
        assert not difference_on_window(closed, product)[1]


def test_w0_leading_and_first_coefficient(params11):
    w0 = build_W0(params11)
    assert w0.coeff(0).is_one()
    tau = params11.tau
    # gauge conjugation multiplies the n=1 coefficient by q^((tau+1)(s-1))
    gauge = qpow(ExponentPoly.of(c0=-(tau + 1), c1=tau + 1))
    assert w0.coeff(-1) == gauge * descending_factor_series(1).coeff(-1)


def test_initial_lax_closed_form(params11):
    lf, lb = initial_lax(params11)
    expected = expected_initial_lax(params11)
    assert not difference_on_window(lf, expected)[1]
    assert not difference_on_window(lb, -expected)[1]
    # u-coefficient at tau=1, s=0 evaluates to q^(-3/2)
    val = (-lf.coeff(params11.down_index)).eval(Fraction(1, 4), 0)
    assert abs(val - 8) < 1e-30


def test_initial_M_closed_forms(params11):
    qm0, qm0bar = initial_M(params11)
    tau = params11.tau
    assert qm0.coeff(0) == QS
    assert qm0.coeff(-1) == -qpow(ExponentPoly.of(c0=-tau - Fraction(3, 2), c1=tau + 2))
    assert qm0bar.coeff(0) == QS
    assert qm0bar.coeff(1) == -qpow(ExponentPoly.of(c0=Fraction(1, 2), c1=-tau))
    # nothing beyond the two closed-form terms
    assert qm0.indices() == [-1, 0] and qm0bar.indices() == [0, 1]


def test_lm_relation_passes(params11):
    rep = check_LM_relation(params11)
    assert rep["passed"], rep


def test_lm_relation_negative_control(params11):
    rep = check_LM_relation(params11, _perturb_power=-5)
    assert not rep["passed"]
    failing = [c for c in rep["checks"] if not c["passed"]]
    assert failing and "offending coefficient" in failing[0]["detail"]


def test_monomial_pow():
    mono = DiffOp.monomial(Fraction(1, 2), 1, qpow(ExponentPoly.of(c1=-1)))
    cubed = monomial_pow(mono, 3)
    assert cubed.indices() == [3]
    inv = monomial_pow(mono, -1)
    assert not difference_on_window(mono * inv, DiffOp.monomial(Fraction(1, 2), 0, ONE))[1]


# -- tau-quotient dressing ---------------------------------------------------


@pytest.fixture(scope="module")
def dressing11():
    params = SessionParams(1, 1, 1, T=4)
    ctx = VertexContext(4)
    table = tau_table(1, 1, 1, 0, 4, ctx)
    return table, dressing_from_tau(table, params, order=4)


def test_dressing_leading_values(dressing11):
    table, dressing = dressing11
    assert dressing.W.coeff(0).is_one()
    # wbar_0 at tau=1 is q^(2s^2 - 2s + 1/2), from the cubic prefactor ratio
    expected = qpow(ExponentPoly.of(c0=Fraction(1, 2), c1=-2, c2=2))
    assert dressing.Wbar.coeff(0) == expected


def test_dressing_derivative_of_constant_coefficient(dressing11):
    _, dressing = dressing11
    assert dressing.dW.coeff(0).is_zero()  # w_0 = 1 has zero time derivative


def test_dressing_truncation_stability():
    params = SessionParams(1, 1, 1, T=3)
    ctx = VertexContext(3)
    small = dressing_from_tau(tau_table(1, 1, 1, 0, 1, ctx), params, order=1)
    big = dressing_from_tau(tau_table(1, 1, 1, 0, 3, ctx), params, order=3)
    assert small.W.coeff(-1) == big.W.coeff(-1)
    assert small.Wbar.coeff(1) == big.Wbar.coeff(1)


def test_dressing_trivial_table_is_identity():
    params = SessionParams(1, 1, 1, T=3)
    table = tau_table(1, 1, 1, 0, 3)
    for key in table.gammas:
        if key != ((), ()):
            table.gammas[key] = QFieldElem.zero()
    dressing = dressing_from_tau(table, params, order=3)
    assert dressing.W.coeff(0).is_one()
    for n in range(1, 4):
        assert dressing.W.coeff(-n).is_zero()
    for n in range(0, 3):
        assert dressing.dW.coeff(-n).is_zero()


def test_dressing_matches_factorization(dressing11):
    _, dressing = dressing11
    params = SessionParams(1, 1, 1, T=4)
    w0 = build_W0(params)
    wbar0 = build_W0bar(params)
    for n in range(5):
        assert dressing.W.coeff(-n) == w0.coeff(-n), n
        assert dressing.Wbar.coeff(n) == wbar0.coeff(n), n


def test_dressing_order_validation(dressing11):
    table, _ = dressing11
    params = SessionParams(1, 1, 1, T=4)
    with pytest.raises(TruncationInsufficient):
        dressing_from_tau(table, params, order=9)


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 3)])
def test_cross_check_initial(a, b):
    params = SessionParams(a, b, 1, T=5)
    report = cross_check_initial(params, max_deg=5)
    assert report["passed"], [c for c in report["checks"] if not c["passed"]]
    assert report["gauge_is_identity"]


def test_cross_check_higher_flow():
    params = SessionParams(1, 1, 1, T=5)
    report = cross_check_initial(params, max_deg=5, flow_k=2)
    assert report["passed"], [c for c in report["checks"] if not c["passed"]]
