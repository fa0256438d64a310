"""Truncated power series and dense polynomials over exact or big-float coefficients.

Coefficients may be ``fractions.Fraction`` (exact), ``mpmath.mpf`` or ``mpmath.mpc``.
Arithmetic between series of different truncation orders keeps the smaller order,
so a result never claims more terms than its inputs justify.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2
import mpmath

from . import kernels

__all__ = [
    "PowerSeries",
    "series_mul",
    "series_compose",
    "series_reverse",
    "series_reciprocal",
    "series_power",
    "binomial_pow",
    "binomial_coefficients",
    "polyval",
    "poly_derivative",
    "poly_roots",
    "RootFindingError",
    "RhoPolynomialSeries",
    "to_mpf",
]


def to_mpf(x):
    """Convert an exact or gmpy2 number to an mpmath number at the current precision."""
    if isinstance(x, (mpmath.mpf, mpmath.mpc)):
        return +x
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    if isinstance(x, type(gmpy2.mpq())):
        return mpmath.mpf(int(x.numerator)) / int(x.denominator)
    if isinstance(x, complex):
        return mpmath.mpc(x)
    return mpmath.mpf(x)


def _zero_like(x):
    return Fraction(0) if isinstance(x, (Fraction, int)) else x * 0


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients c_0..c_K of a series truncated after x^K.

    Passing ``order`` larger than the coefficient list pads with exact zeros, which
    is how a polynomial is declared exact up to that order.
    """

    coeffs: tuple

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = tuple(Fraction(c) if isinstance(c, int) else c for c in coeffs)
        if not cs:
            raise ValueError("a power series needs at least one coefficient")
        if order is not None:
            if order + 1 < len(cs):
                cs = cs[: order + 1]
            else:
                cs = cs + (_zero_like(cs[0]),) * (order + 1 - len(cs))
        object.__setattr__(self, "coeffs", cs)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[: order + 1])

    def __add__(self, other):
        if not isinstance(other, PowerSeries):
            return PowerSeries((self.coeffs[0] + other,) + self.coeffs[1:])
        n = min(self.order, other.order) + 1
        return PowerSeries(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    __radd__ = __add__

    def __neg__(self):
        return PowerSeries(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, other)
        return PowerSeries(c * other for c in self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, PowerSeries):
            return series_mul(self, series_reciprocal(other))
        return PowerSeries(c / other for c in self.coeffs)

    def derivative(self) -> "PowerSeries":
        if self.order == 0:
            return PowerSeries([_zero_like(self.coeffs[0])])
        return PowerSeries(k * c for k, c in enumerate(self.coeffs) if k)

    def compose(self, inner: "PowerSeries") -> "PowerSeries":
        return series_compose(self, inner)

    def reverse(self) -> "PowerSeries":
        return series_reverse(self)

    def __call__(self, x):
        return polyval(self.coeffs, x)


def series_mul(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Cauchy product truncated at the smaller of the two orders."""
    n = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    return PowerSeries(sum((ac[i] * bc[k - i] for i in range(1, k + 1)), ac[0] * bc[k]) for k in range(n + 1))


def series_reciprocal(a: PowerSeries) -> PowerSeries:
    """1/a to the order of a; the constant term must not vanish."""
    c = a.coeffs
    if c[0] == 0:
        raise ZeroDivisionError("series with vanishing constant term has no reciprocal")
    inv = [1 / c[0] if not isinstance(c[0], Fraction) else Fraction(1) / c[0]]
    for k in range(1, len(c)):
        s = sum((c[i] * inv[k - i] for i in range(2, k + 1)), c[1] * inv[k - 1])
        inv.append(-s * inv[0])
    return PowerSeries(inv)


def series_compose(outer: PowerSeries, inner: PowerSeries) -> PowerSeries:
    """outer(inner(x)) truncated at the outer order; inner(0) must vanish.

    Horner's scheme in series arithmetic, so each step costs one product.
    """
    if inner.coeffs[0] != 0:
        raise ValueError("inner series must have a zero constant term")
    n = outer.order
    ic = list(inner.coeffs[: n + 1])
    ic += [_zero_like(ic[0])] * (n + 1 - len(ic))
    inner_n = PowerSeries(ic)
    zero = _zero_like(outer.coeffs[0] * ic[0])
    acc = PowerSeries([outer.coeffs[n]] + [zero] * n)
    for k in range(n - 1, -1, -1):
        acc = series_mul(acc, inner_n)
        acc = PowerSeries((acc.coeffs[0] + outer.coeffs[k],) + acc.coeffs[1:])
    return acc


def series_power(a: PowerSeries, exponent) -> PowerSeries:
    """a^exponent for a series with a(0) = 1 (J. C. P. Miller recurrence)."""
    c = a.coeffs
    if c[0] != 1:
        raise ValueError("series_power expects a unit constant term")
    out = [c[0] * 1]
    for k in range(1, len(c)):
        s = sum(((exponent * j - (k - j)) * c[j] * out[k - j] for j in range(1, k + 1)), _zero_like(out[0]))
        out.append(s / k)
    return PowerSeries(out)


def series_reverse(f: PowerSeries) -> PowerSeries:
    """Compositional inverse g with f(g(x)) = x to the order of f.

    Uses Lagrange inversion: [x^n] g = [w^(n-1)] h(w)^n / n with h = w / f(w).
    """
    c = f.coeffs
    if c[0] != 0:
        raise ValueError("series_reverse needs f(0) = 0")
    if len(c) < 2 or c[1] == 0:
        raise ValueError("series_reverse needs f'(0) != 0")
    n = f.order
    zero = _zero_like(c[1])
    if n == 1:
        return PowerSeries([zero, 1 / c[1] if not isinstance(c[1], Fraction) else Fraction(1) / c[1]])
    h = series_reciprocal(PowerSeries(c[1:]))  # w / f(w), order n-1
    out = [zero, h.coeffs[0]]
    hp = h
    for k in range(2, n + 1):
        hp = series_mul(hp, h)
        out.append(hp.coeffs[k - 1] / k)
    return PowerSeries(out)


def binomial_coefficients(exponent, order: int) -> list:
    """Coefficients of (1 - x)^exponent through x^order; exact for rational exponents."""
    if isinstance(exponent, int):
        exponent = Fraction(exponent)
    one = Fraction(1) if isinstance(exponent, Fraction) else mpmath.mpf(1)
    out = [one]
    for k in range(1, order + 1):
        out.append(out[-1] * (k - 1 - exponent) / k)
    return out


def binomial_pow(exponent, order: int) -> PowerSeries:
    """Series of (1 - x)^exponent to the given order."""
    return PowerSeries(binomial_coefficients(exponent, order))


def polyval(coeffs: Sequence, x):
    """Evaluate sum_k coeffs[k] x^k by Horner's rule."""
    acc = coeffs[-1] * 1
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_derivative(coeffs: Sequence) -> list:
    return [k * c for k, c in enumerate(coeffs) if k] or [coeffs[0] * 0]


class RootFindingError(RuntimeError):
    """Root iteration did not converge; ``partial`` holds the last iterates."""

    def __init__(self, message: str, partial: list):
        super().__init__(message)
        self.partial = partial


def _aberth(cs: list, tol, maxiter: int):
    n = len(cs) - 1
    lead = cs[-1]
    monic = [c / lead for c in cs]
    dmonic = poly_derivative(monic)
    absc = [abs(c) for c in monic]
    # start on a circle whose radius matches the geometric mean of the root moduli
    r0 = abs(monic[0]) ** (mpmath.mpf(1) / n) if monic[0] != 0 else mpmath.mpf(1)
    z = [r0 * mpmath.expj(2 * mpmath.pi * k / n + mpmath.mpf("0.4")) for k in range(n)]
    done = [False] * n
    for _ in range(maxiter):
        for i in range(n):
            if done[i]:
                continue
            zi = z[i]
            p = polyval(monic, zi)
            # stop once p(z) is at the rounding level of its own evaluation
            if abs(p) <= tol * polyval(absc, abs(zi)):
                done[i] = True
                continue
            ratio = p / polyval(dmonic, zi)
            s = mpmath.fsum(1 / (zi - z[j]) for j in range(n) if j != i and z[j] != zi)
            step = ratio / (1 - ratio * s)
            z[i] = zi - step
            if abs(step) <= tol * abs(z[i]):
                done[i] = True
        if all(done):
            return z, True
    return z, False


def _companion_roots(cs: list):
    n = len(cs) - 1
    lead = cs[-1]
    m = mpmath.zeros(n, n)
    for i in range(1, n):
        m[i, i - 1] = 1
    for i in range(n):
        m[i, n - 1] = -cs[i] / lead
    return list(mpmath.eig(m, left=False, right=False))


def poly_roots(coeffs: Sequence, tol=None, maxiter: int = 400) -> list:
    """All complex roots of sum_k coeffs[k] x^k (ascending order).

    Aberth-Ehrlich simultaneous iteration, with the companion-matrix eigenvalues
    as a fallback when the iteration stalls. Roots at the origin are split off
    exactly. Raises ``RootFindingError`` carrying the last iterates on failure.
    """
    cs = [to_mpf(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    if len(cs) < 2:
        raise ValueError("polynomial degree must be at least 1")
    zeros = 0
    while cs[0] == 0 and len(cs) > 1:
        cs.pop(0)
        zeros += 1
    roots = [mpmath.mpc(0)] * zeros
    if len(cs) == 1:
        return roots
    if len(cs) == 2:
        return roots + [mpmath.mpc(-cs[0] / cs[1])]
    if tol is None:
        tol = mpmath.mpf(2) ** (-mpmath.mp.prec + 16)
    z, ok = _aberth(cs, tol, maxiter)
    if not ok:
        try:
            z = _companion_roots(cs)
            dcs = poly_derivative(cs)
            for i in range(len(z)):
                for _ in range(50):
                    step = polyval(cs, z[i]) / polyval(dcs, z[i])
                    z[i] -= step
                    if abs(step) <= tol * max(1, abs(z[i])):
                        break
            ok = True
        except Exception as exc:  # eig failure or zero derivative
            raise RootFindingError(f"root iteration failed: {exc}", roots + z) from exc
    return roots + [mpmath.mpc(r) for r in z]


def _q_to_mpfr(q, prec: int):
    return gmpy2.mpfr(q, prec)


def _mpf_to_mpfr(x, prec: int):
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    bits = max(prec, int(man).bit_length())
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        v = gmpy2.mul_2exp(gmpy2.mpfr(int(man)), exp)
        return -v if sign else v


class RhoPolynomialSeries:
    """The table P_0(rho)..P_K(rho), each P_L a polynomial of degree exactly L.

    Rows are exact rationals (gmpy2 ``mpq``) stored lowest power first. Numeric
    evaluation converts the table once per precision and then runs the Horner
    kernel.
    """

    def __init__(self, rows: Sequence[Sequence]):
        self._rows = [[gmpy2.mpq(c) for c in row] for row in rows]
        for L, row in enumerate(self._rows):
            if len(row) != L + 1:
                raise ValueError(f"row {L} must hold {L + 1} coefficients")
        self._numeric: dict[int, list] = {}

    @property
    def order(self) -> int:
        return len(self._rows) - 1

    def degree(self, L: int) -> int:
        row = self._rows[L]
        d = len(row) - 1
        while d > 0 and row[d] == 0:
            d -= 1
        return d

    def coefficients(self, L: int) -> list[Fraction]:
        return [Fraction(int(c.numerator), int(c.denominator)) for c in self._rows[L]]

    def numeric_coefficients(self, L: int) -> list:
        """Row L as mpmath numbers at the current precision."""
        return [mpmath.mpf(int(c.numerator)) / int(c.denominator) for c in self._rows[L]]

    def truncate(self, order: int) -> "RhoPolynomialSeries":
        out = RhoPolynomialSeries.__new__(RhoPolynomialSeries)
        out._rows = self._rows[: order + 1]
        out._numeric = {p: rows[: order + 1] for p, rows in self._numeric.items() if isinstance(p, int)}
        return out

    def _mpfr_rows(self, prec: int) -> list:
        rows = self._numeric.get(prec)
        if rows is None:
            rows = [[_q_to_mpfr(c, prec) for c in row] for row in self._rows]
            self._numeric[prec] = rows
        return rows

    def evaluate(self, rho, upto: int | None = None) -> list:
        """[P_0(rho), ..., P_upto(rho)] as mpmath numbers at the current precision."""
        upto = self.order if upto is None else upto
        if isinstance(rho, mpmath.mpc) or isinstance(rho, complex):
            rho = mpmath.mpc(rho)
            return [polyval(self.numeric_coefficients(L), rho) for L in range(upto + 1)]
        prec = mpmath.mp.prec + 20
        rows = self._mpfr_rows(prec)[: upto + 1]
        vals = kernels.horner_rows(rows, _mpf_to_mpfr(to_mpf(rho), prec), prec)
        return [mpmath.mpf(v) for v in vals]

    def evaluate_row(self, L: int, rho):
        return polyval(self.numeric_coefficients(L), to_mpf(rho))

    def row_values(self, L: int, points: Sequence, derivative: bool = False) -> list:
        """P_L (or P'_L) at many real points through the compiled Horner kernel."""
        prec = mpmath.mp.prec + 20
        key = (prec, L, derivative)
        row = self._numeric.get(key)
        if row is None:
            coeffs = self._rows[L]
            if derivative:
                coeffs = [k * c for k, c in enumerate(coeffs) if k] or [gmpy2.mpq(0)]
            row = [_q_to_mpfr(c, prec) for c in coeffs]
            self._numeric[key] = row
        rows = [row]
        return [mpmath.mpf(kernels.horner_rows(rows, _mpf_to_mpfr(to_mpf(x), prec), prec)[0]) for x in points]

    def derivative_row(self, L: int) -> list:
        return poly_derivative(self.numeric_coefficients(L))
