"""Schur and skew Schur polynomials in the power-sum generators.

S_mu is defined through the Jacobi-Trudi determinant det(S_{mu_i - i + j})
of complete homogeneous pieces, where the S_m are generated by
exp(sum_k p_k z^k / k).  Polynomials are exact (Fraction coefficients);
determinants over the polynomial ring are evaluated by fraction-free
Gaussian elimination so intermediate entries stay polynomial.

The module also provides the closed-form principal specializations of the
power sums used by the vertex: p_k at q^rho, at q^(nu+rho), and the
rational continuation at q^(-rho).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from .errors import DegreeBoundExceeded
from .partitions import Partition
from .qfield import ExponentPoly, QFieldElem, QPowerSum

_ZERO = Fraction(0)

# A monomial in p_1, p_2, ... is the tuple of exponents (e1, e2, ..., ek)
# with trailing zeros dropped; () is the constant monomial.
Monomial = tuple[int, ...]


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    n = max(len(m1), len(m2))
    out = [0] * n
    for i, e in enumerate(m1):
        out[i] += e
    for i, e in enumerate(m2):
        out[i] += e
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _mono_weight(m: Monomial) -> int:
    # weighted degree with deg p_k = k
    return sum((k + 1) * e for k, e in enumerate(m))


class PowerSumPoly:
    """Polynomial in p_1..p_D with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[Monomial, Fraction] | None = None):
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c}

    @staticmethod
    def zero() -> "PowerSumPoly":
        return PowerSumPoly()

    @staticmethod
    def one() -> "PowerSumPoly":
        return PowerSumPoly({(): Fraction(1)})

    @staticmethod
    def p(k: int) -> "PowerSumPoly":
        """The generator p_k."""
        if k < 1:
            raise ValueError("power-sum index must be >= 1")
        mono = (0,) * (k - 1) + (1,)
        return PowerSumPoly({mono: Fraction(1)})

    @staticmethod
    def const(c) -> "PowerSumPoly":
        c = Fraction(c)
        return PowerSumPoly({(): c}) if c else PowerSumPoly()

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other) -> bool:
        return isinstance(other, PowerSumPoly) and self.coeffs == other.coeffs

    __hash__ = None

    def __add__(self, other: "PowerSumPoly") -> "PowerSumPoly":
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            v = out.get(m, _ZERO) + c
            if v:
                out[m] = v
            elif m in out:
                del out[m]
        return PowerSumPoly(out)

    def __neg__(self) -> "PowerSumPoly":
        return PowerSumPoly({m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "PowerSumPoly") -> "PowerSumPoly":
        return self + (-other)

    def __mul__(self, other: "PowerSumPoly") -> "PowerSumPoly":
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = _mono_mul(m1, m2)
                v = out.get(m, _ZERO) + c1 * c2
                if v:
                    out[m] = v
                elif m in out:
                    del out[m]
        return PowerSumPoly(out)

    def scale(self, r) -> "PowerSumPoly":
        r = Fraction(r)
        if not r:
            return PowerSumPoly()
        return PowerSumPoly({m: c * r for m, c in self.coeffs.items()})

    def negate_p(self) -> "PowerSumPoly":
        """Substitute p_k -> -p_k for every k."""
        return PowerSumPoly(
            {m: (-c if sum(m) % 2 else c) for m, c in self.coeffs.items()}
        )

    def max_index(self) -> int:
        return max((len(m) for m in self.coeffs), default=0)

    def weighted_degrees(self) -> set[int]:
        return {_mono_weight(m) for m in self.coeffs}

    def is_homogeneous(self, degree: int) -> bool:
        return self.weighted_degrees() <= {degree}

    # -- leading term machinery for exact division ----------------------

    def _lead(self) -> tuple[Monomial, Fraction]:
        key = max(self.coeffs, key=lambda m: (_mono_weight(m), m))
        return key, self.coeffs[key]

    def divide_exact(self, divisor: "PowerSumPoly") -> "PowerSumPoly":
        """Exact polynomial division; raises if the division leaves a remainder."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return PowerSumPoly()
        lead_m, lead_c = divisor._lead()
        rem = self
        quot: dict[Monomial, Fraction] = {}
        while not rem.is_zero():
            rm, rc = rem._lead()
            diff = [0] * len(rm)
            for i, e in enumerate(lead_m):
                diff_i = rm[i] - e if i < len(rm) else -e
                if diff_i < 0:
                    raise ArithmeticError("inexact polynomial division")
                diff[i] = diff_i
            for i in range(len(lead_m), len(rm)):
                diff[i] = rm[i]
            while diff and diff[-1] == 0:
                diff.pop()
            qm, qc = tuple(diff), rc / lead_c
            quot[qm] = quot.get(qm, _ZERO) + qc
            rem = rem - divisor * PowerSumPoly({qm: qc})
        return PowerSumPoly(quot)

    # -- evaluation ------------------------------------------------------

    def eval_rational(self, values: dict[int, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.coeffs.items():
            v = c
            for k, e in enumerate(m, start=1):
                if e:
                    v *= values[k] ** e
            total += v
        return total

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        def mono_str(m: Monomial) -> str:
            factors = []
            for k, e in enumerate(m, start=1):
                if e == 1:
                    factors.append(f"p{k}")
                elif e > 1:
                    factors.append(f"p{k}^{e}")
            return "*".join(factors) if factors else "1"

        items = sorted(
            self.coeffs.items(), key=lambda t: (_mono_weight(t[0]), t[0]), reverse=True
        )
        chunks = []
        for m, c in items:
            ms = mono_str(m)
            if ms == "1":
                text = str(c)
            elif c == 1:
                text = ms
            elif c == -1:
                text = "-" + ms
            else:
                text = f"{c}*{ms}"
            if chunks and not text.startswith("-"):
                chunks.append(" + " + text)
            elif chunks:
                chunks.append(" - " + text[1:])
            else:
                chunks.append(text)
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"PowerSumPoly({self})"


def _bareiss_det(matrix: list[list[PowerSumPoly]]) -> PowerSumPoly:
    """Fraction-free determinant over the polynomial ring."""
    n = len(matrix)
    if n == 0:
        return PowerSumPoly.one()
    m = [row[:] for row in matrix]
    sign = 1
    prev = PowerSumPoly.one()
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = next(
                (i for i in range(k + 1, n) if not m[i][k].is_zero()), None
            )
            if pivot_row is None:
                return PowerSumPoly.zero()
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.divide_exact(prev)
            m[i][k] = PowerSumPoly.zero()
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


class PowerSumRing:
    """Session-scoped ring of polynomials in p_1..p_D.

    The degree bound D caps the weight of any Schur index; it is fixed by
    the largest partition the enclosing computation needs.
    """

    def __init__(self, degree_bound: int):
        if degree_bound < 0:
            raise ValueError("degree bound must be >= 0")
        self.degree_bound = degree_bound
        self._h_cache: dict[int, PowerSumPoly] = {}
        self._schur_cache: dict[tuple, PowerSumPoly] = {}

    def complete_homogeneous(self, m: int) -> PowerSumPoly:
        """S_m with generating function exp(sum_k p_k z^k / k); 0 for m < 0."""
        if m > self.degree_bound:
            raise DegreeBoundExceeded(f"S_{m} exceeds degree bound {self.degree_bound}")
        return self._h(m)

    def _h(self, m: int) -> PowerSumPoly:
        # unbounded internal form: oversized determinants contain entries
        # above the session bound that cancel in the final value
        if m < 0:
            return PowerSumPoly.zero()
        got = self._h_cache.get(m)
        if got is not None:
            return got
        if m == 0:
            poly = PowerSumPoly.one()
        else:
            # m*S_m = sum_{k=1}^{m} p_k S_{m-k}
            acc = PowerSumPoly.zero()
            for k in range(1, m + 1):
                acc = acc + PowerSumPoly.p(k) * self._h(m - k)
            poly = acc.scale(Fraction(1, m))
        self._h_cache[m] = poly
        return poly

    def _jacobi_trudi(self, mu: Partition, nu: Partition, size: int) -> PowerSumPoly:
        matrix = [
            [
                self._h(mu.part(i) - nu.part(j) - i + j)
                for j in range(1, size + 1)
            ]
            for i in range(1, size + 1)
        ]
        return _bareiss_det(matrix)

    def schur(self, mu: Partition, size: int | None = None) -> PowerSumPoly:
        """S_mu as a determinant of size >= l(mu); independent of the size."""
        if mu.weight > self.degree_bound:
            raise DegreeBoundExceeded(
                f"|mu| = {mu.weight} exceeds degree bound {self.degree_bound}"
            )
        if size is None:
            key = ("s", mu.parts)
            got = self._schur_cache.get(key)
            if got is None:
                got = self._jacobi_trudi(mu, Partition(), mu.length)
                self._schur_cache[key] = got
            return got
        if size < mu.length:
            raise ValueError("determinant size smaller than the partition length")
        return self._jacobi_trudi(mu, Partition(), size)

    def skew_schur(
        self, mu: Partition, nu: Partition, size: int | None = None
    ) -> PowerSumPoly:
        """S_{mu/nu}; the zero polynomial when nu is not contained in mu."""
        if mu.weight > self.degree_bound:
            raise DegreeBoundExceeded(
                f"|mu| = {mu.weight} exceeds degree bound {self.degree_bound}"
            )
        if size is None:
            key = ("k", mu.parts, nu.parts)
            got = self._schur_cache.get(key)
            if got is None:
                got = self._jacobi_trudi(mu, nu, max(mu.length, nu.length))
                self._schur_cache[key] = got
            return got
        if size < max(mu.length, nu.length):
            raise ValueError("determinant size smaller than the partition length")
        return self._jacobi_trudi(mu, nu, size)


def negate_p(f: PowerSumPoly) -> PowerSumPoly:
    return f.negate_p()


# ---------------------------------------------------------------------------
# principal specializations
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def specialize_rho(k: int) -> QFieldElem:
    """p_k at q^rho: the closed geometric form 1 / (q^(k/2) - q^(-k/2))."""
    if k < 1:
        raise ValueError("power-sum index must be >= 1")
    half = Fraction(k, 2)
    den = QPowerSum.monomial(ExponentPoly.const(half)) + QPowerSum.monomial(
        ExponentPoly.const(-half), Fraction(-1)
    )
    return QFieldElem(QPowerSum.one(), den)


@lru_cache(maxsize=None)
def specialize_neg_rho(k: int) -> QFieldElem:
    """p_k at q^(-rho) as the rational continuation -p_k(q^rho)."""
    return -specialize_rho(k)


def specialize_nu_rho(nu: Partition, k: int) -> QFieldElem:
    """p_k at q^(nu+rho): finite head plus closed geometric tail.

    p_k = sum_{i<=l} q^(k(nu_i - i + 1/2)) + q^(k(1/2 - (l+1))) / (1 - q^(-k))
    with l = l(nu).
    """
    if k < 1:
        raise ValueError("power-sum index must be >= 1")
    ell = nu.length
    den = QPowerSum.one() + QPowerSum.monomial(
        ExponentPoly.const(Fraction(-k)), Fraction(-1)
    )
    num = QPowerSum.monomial(ExponentPoly.const(Fraction(k) * (Fraction(1, 2) - (ell + 1))))
    for i in range(1, ell + 1):
        head = QPowerSum.monomial(
            ExponentPoly.const(Fraction(k) * (nu.part(i) - i + Fraction(1, 2)))
        )
        num = num + head * den
    return QFieldElem(num, den)


class Specialization:
    """Point values p_k -> QFieldElem for k = 1..D, with a ring-hom evaluator.

    Values are held as (num, den) pairs and polynomials are evaluated over
    a common denominator, which keeps the q-expression sizes bounded.
    """

    def __init__(self, values: dict[int, QFieldElem]):
        self.values = values
        self._num = {k: v.num for k, v in values.items()}
        self._den = {k: v.den for k, v in values.items()}
        self._pow_cache: dict[tuple[str, int, int], QPowerSum] = {}

    @staticmethod
    def rho(degree_bound: int) -> "Specialization":
        return Specialization({k: specialize_rho(k) for k in range(1, degree_bound + 1)})

    @staticmethod
    def neg_rho(degree_bound: int) -> "Specialization":
        return Specialization(
            {k: specialize_neg_rho(k) for k in range(1, degree_bound + 1)}
        )

    @staticmethod
    def nu_rho(nu: Partition, degree_bound: int) -> "Specialization":
        return Specialization(
            {k: specialize_nu_rho(nu, k) for k in range(1, degree_bound + 1)}
        )

    def _power(self, tag: str, k: int, e: int) -> QPowerSum:
        if e == 0:
            return QPowerSum.one()
        key = (tag, k, e)
        got = self._pow_cache.get(key)
        if got is None:
            base = self._num[k] if tag == "n" else self._den[k]
            got = self._power(tag, k, e - 1) * base
            self._pow_cache[key] = got
        return got

    def evaluate(self, poly: PowerSumPoly) -> QFieldElem:
        """Evaluate with every monomial expressed over one shared denominator."""
        if poly.is_zero():
            return QFieldElem.zero()
        top = poly.max_index()
        for k in range(1, top + 1):
            if k not in self.values:
                raise DegreeBoundExceeded(f"specialization lacks p_{k}")
        max_e = {k: 0 for k in range(1, top + 1)}
        for m in poly.coeffs:
            for k, e in enumerate(m, start=1):
                if e > max_e[k]:
                    max_e[k] = e
        common_den = QPowerSum.one()
        for k in range(1, top + 1):
            if max_e[k]:
                common_den = common_den * self._power("d", k, max_e[k])
        num_total = QPowerSum.zero()
        for m, c in poly.coeffs.items():
            term = QPowerSum.rational(c)
            for k in range(1, top + 1):
                e = m[k - 1] if k - 1 < len(m) else 0
                if e:
                    term = term * self._power("n", k, e)
                cofactor = max_e[k] - e
                if cofactor:
                    term = term * self._power("d", k, cofactor)
            num_total = num_total + term
        return QFieldElem(num_total, common_den)
