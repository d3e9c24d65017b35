"""Two-leg topological vertex and the tau-function coefficient table.

The vertex W_{nu,nubar}(q) is an exact rational expression in q^(1/2),
computed here in two independent finite forms: the defining product of
Schur values at the principal specializations, and the hook-type finite
sum over common subdiagrams of the conjugates.  Their equality, and the
transposition / q -> 1/q symmetries, are the machine-checked identities.

The tau table collects the exact coefficients of the double Schur
expansion of the lattice tau function.  The cubic part of the exponent
is independent of the partition pair; it is factored out and recorded as
a polynomial so that every stored exponent stays quadratic in s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from .errors import DegreeBoundExceeded, InvalidTau, NonCoprime
from .partitions import EMPTY, Partition, enumerate_partitions
from .qfield import ExponentPoly, QFieldElem, qpow
from .schur import Monomial, PowerSumRing, Specialization


def subpartitions(limit: Partition) -> Iterator[Partition]:
    """All partitions eta with eta_i <= limit_i componentwise."""

    def rec(i: int, prev: int, acc: tuple[int, ...]):
        if i >= limit.length:
            yield Partition(acc)
            return
        cap = min(prev, limit.parts[i])
        for v in range(cap, -1, -1):
            if v == 0:
                yield Partition(acc)
                return
            yield from rec(i + 1, v, acc + (v,))

    if limit.length == 0:
        yield EMPTY
        return
    yield from rec(0, limit.parts[0], ())


class VertexContext:
    """Caches for vertex evaluations up to a fixed total weight."""

    def __init__(self, degree_bound: int):
        self.degree_bound = degree_bound
        self.ring = PowerSumRing(degree_bound)
        self.rho = Specialization.rho(degree_bound)
        self.neg_rho = Specialization.neg_rho(degree_bound)
        self._nu_rho: dict[tuple, Specialization] = {}
        self._schur_at_rho: dict[tuple, QFieldElem] = {}
        self._skew_at: dict[tuple, QFieldElem] = {}

    def _check(self, nu: Partition, nubar: Partition):
        if nu.weight + nubar.weight > self.degree_bound:
            raise DegreeBoundExceeded(
                f"|nu| + |nubar| = {nu.weight + nubar.weight} exceeds bound"
                f" {self.degree_bound}"
            )

    def nu_rho_specialization(self, nu: Partition) -> Specialization:
        got = self._nu_rho.get(nu.parts)
        if got is None:
            got = Specialization.nu_rho(nu, self.degree_bound)
            self._nu_rho[nu.parts] = got
        return got

    def schur_at_rho(self, mu: Partition) -> QFieldElem:
        got = self._schur_at_rho.get(mu.parts)
        if got is None:
            got = self.rho.evaluate(self.ring.schur(mu))
            self._schur_at_rho[mu.parts] = got
        return got

    def skew_at(self, mu: Partition, eta: Partition, point: str) -> QFieldElem:
        key = (mu.parts, eta.parts, point)
        got = self._skew_at.get(key)
        if got is None:
            spec = self.rho if point == "rho" else self.neg_rho
            got = spec.evaluate(self.ring.skew_schur(mu, eta))
            self._skew_at[key] = got
        return got

    # -- the three vertex-side evaluations --------------------------------

    def vertex_def(self, nu: Partition, nubar: Partition) -> QFieldElem:
        """Defining form s_nu(q^rho) * s_nubar(q^(nu+rho))."""
        self._check(nu, nubar)
        left = self.schur_at_rho(nu)
        right = self.nu_rho_specialization(nu).evaluate(self.ring.schur(nubar))
        return left * right

    def vertex_hook(self, nu: Partition, nubar: Partition) -> QFieldElem:
        """Finite-sum form over subdiagrams of the conjugates.

        q^((kappa(nu)+kappa(nubar))/2) * sum_eta s_{nu'/eta}(q^rho) s_{nubar'/eta}(q^rho)
        """
        self._check(nu, nubar)
        nu_c = nu.conjugate()
        nubar_c = nubar.conjugate()
        total = QFieldElem.zero()
        for eta in subpartitions(nu_c.intersect(nubar_c)):
            total = total + self.skew_at(nu_c, eta, "rho") * self.skew_at(
                nubar_c, eta, "rho"
            )
        prefactor = qpow(ExponentPoly.const(Fraction(nu.kappa() + nubar.kappa(), 2)))
        return prefactor * total

    def gamma_matrix_element(self, nu: Partition, nubar: Partition) -> QFieldElem:
        """sum_eta s_{nu/eta} s_{nubar/eta} at the q^(-rho) continuation."""
        self._check(nu, nubar)
        total = QFieldElem.zero()
        for eta in subpartitions(nu.intersect(nubar)):
            total = total + self.skew_at(nu, eta, "neg") * self.skew_at(
                nubar, eta, "neg"
            )
        return total

    def r_bullet(
        self, tau: Fraction, max_deg: int
    ) -> dict[tuple[Monomial, Monomial], QFieldElem]:
        """Truncated double sum over |nu|, |nubar| <= max_deg.

        Returns the coefficient of each monomial pair (in p and pbar).
        """
        tau = Fraction(tau)
        if tau == 0:
            raise InvalidTau("tau must be nonzero")
        if 2 * max_deg > self.degree_bound:
            raise DegreeBoundExceeded(
                "r_bullet needs a context of degree >= 2 * max_deg"
            )
        out: dict[tuple[Monomial, Monomial], QFieldElem] = {}
        parts = enumerate_partitions(max_deg)
        for nu in parts:
            s_nu = self.ring.schur(nu)
            for nubar in parts:
                s_nubar = self.ring.schur(nubar)
                expo = Fraction(nu.kappa()) * tau / 2 + Fraction(nubar.kappa()) / tau / 2
                coef = qpow(ExponentPoly.const(expo)) * self.vertex_def(nu, nubar)
                if coef.is_zero():
                    continue
                for m1, c1 in s_nu.coeffs.items():
                    for m2, c2 in s_nubar.coeffs.items():
                        key = (m1, m2)
                        term = coef.scale(c1 * c2)
                        if key in out:
                            out[key] = out[key] + term
                        else:
                            out[key] = term
        return {k: v for k, v in out.items() if not v.is_zero()}


@dataclass
class TauTable:
    """Exact coefficient table of the double Schur expansion.

    entries[(nu, nubar)] = q^(E(s)) * gamma, with E the quadratic-in-s
    exponent (kappa and weight terms, at the shifted coordinate s + c) and
    gamma the vertex-operator matrix element.  The partition-independent
    cubic exponent prefactor is recorded separately in `cubic`, as the
    coefficients (c0, c1, c2, c3) of a polynomial in s.
    """

    a: int
    b: int
    sign: int
    shift: Fraction
    max_deg: int
    exponents: dict[tuple[tuple, tuple], ExponentPoly] = field(default_factory=dict)
    gammas: dict[tuple[tuple, tuple], QFieldElem] = field(default_factory=dict)
    cubic: tuple[Fraction, Fraction, Fraction, Fraction] = (
        Fraction(0),
        Fraction(0),
        Fraction(0),
        Fraction(0),
    )

    @property
    def tau(self) -> Fraction:
        return Fraction(self.sign * self.b, self.a)

    def pairs(self):
        return sorted(self.exponents)

    def entry(self, nu: Partition, nubar: Partition) -> QFieldElem:
        key = (nu.parts, nubar.parts)
        return qpow(self.exponents[key]) * self.gammas[key]

    def cubic_at(self, s_val: Fraction) -> Fraction:
        c0, c1, c2, c3 = self.cubic
        s = Fraction(s_val)
        return c0 + c1 * s + c2 * s * s + c3 * s * s * s

    def cubic_delta(self, alpha, beta) -> ExponentPoly:
        """P(s+alpha) - P(s+beta) for the recorded cubic prefactor P.

        The cubic terms cancel, so the result is an honest quadratic-in-s
        exponent suitable for the coefficient field.
        """
        alpha, beta = Fraction(alpha), Fraction(beta)
        c0, c1, c2, c3 = self.cubic

        def shifted(e: Fraction):
            # coefficients of P(s+e) as a cubic in s
            return (
                c0 + c1 * e + c2 * e * e + c3 * e * e * e,
                c1 + 2 * c2 * e + 3 * c3 * e * e,
                c2 + 3 * c3 * e,
                c3,
            )

        pa, pb = shifted(alpha), shifted(beta)
        d3 = pa[3] - pb[3]
        if d3 != 0:
            raise ValueError("cubic prefactor difference is not quadratic")
        return ExponentPoly.of(c0=pa[0] - pb[0], c1=pa[1] - pb[1], c2=pa[2] - pb[2])


def tau_table(
    a: int,
    b: int,
    sign: int = 1,
    shift=0,
    max_deg: int = 4,
    ctx: VertexContext | None = None,
) -> TauTable:
    """Build the coefficient table for tau = sign * b/a, shifted by c.

    Each entry's exponent is
        (tau+1) (kappa(nu)/2 + (s+c)|nu|) + (1/tau+1) (kappa(nubar)/2 + (s+c)|nubar|),
    multiplied by the vertex-operator matrix element at q^(-rho); the
    (nu, nubar)-independent cubic (tau + 1/tau + 2)(4(s+c)^3 - (s+c))/24 is
    recorded on the side and is what normalizes the (empty, empty) entry to 1.
    """
    if a < 1 or b < 1 or math.gcd(a, b) != 1:
        raise NonCoprime(f"(a, b) = ({a}, {b}) must be coprime positive integers")
    if sign not in (1, -1):
        raise InvalidTau("sign must be +1 or -1")
    tau = Fraction(sign * b, a)
    if tau == 0 or tau == -1:
        raise InvalidTau(f"tau = {tau} is excluded")
    shift = Fraction(shift)
    if ctx is None:
        ctx = VertexContext(max_deg)
    table = TauTable(a=a, b=b, sign=sign, shift=shift, max_deg=max_deg)

    tau_inv = 1 / tau
    # cubic prefactor (tau + 1/tau + 2)(4(s+c)^3 - (s+c))/24 expanded in s
    scale = (tau + tau_inv + 2) / 24
    c = shift
    c0 = scale * (4 * c**3 - c)
    c1 = scale * (12 * c**2 - 1)
    c2 = scale * (12 * c)
    c3 = scale * 4
    table.cubic = (c0, c1, c2, c3)

    parts = enumerate_partitions(max_deg)
    for nu in parts:
        for nubar in parts:
            if nu.weight + nubar.weight > max_deg:
                continue
            lin = ExponentPoly.of(
                c0=(tau + 1) * (Fraction(nu.kappa(), 2) + shift * nu.weight)
                + (tau_inv + 1) * (Fraction(nubar.kappa(), 2) + shift * nubar.weight),
                c1=(tau + 1) * nu.weight + (tau_inv + 1) * nubar.weight,
            )
            key = (nu.parts, nubar.parts)
            table.exponents[key] = lin
            table.gammas[key] = ctx.gamma_matrix_element(nu, nubar)
    return table
