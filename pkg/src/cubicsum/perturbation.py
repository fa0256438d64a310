"""Exact weak-coupling coefficients of the cubic oscillator and their large-order law.

Two normalizations of the cubic term are supported:

``cubic-over-six``
    H = -d²/2 + x²/2 + i sqrt(g) x³/6, whose ground level starts 1/2 + 11/288 g.
``unit-cubic``
    H = -d²/2 + x²/2 + sqrt(g) x³.

Both come from one polynomial recursion in the formal cubic coupling b of
V = x²/2 + b x³; the g-series follows from b² = -g/36 or b² = g.
"""
from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import gmpy2
import mpmath

from . import kernels

__all__ = [
    "Convention",
    "WeakSeries",
    "INSTANTON_ACTION",
    "cubic_coupling_energies",
    "weak_coefficients",
    "large_order_prediction",
    "large_order_ratio",
    "ShiftedStrongForm",
    "shifted_strong_form",
    "read_weak_cache",
    "write_weak_cache",
]

INSTANTON_ACTION = Fraction(24, 5)


class Convention(str, enum.Enum):
    CUBIC_OVER_SIX = "cubic-over-six"
    UNIT_CUBIC = "unit-cubic"

    @property
    def b_squared(self) -> Fraction:
        """g-coefficient of b² for this normalization."""
        return Fraction(-1, 36) if self is Convention.CUBIC_OVER_SIX else Fraction(1)


@dataclass(frozen=True)
class WeakSeries:
    """E(g) ~ sum_L coefficients[L] g^L for one level, exact."""

    level: int
    coefficients: tuple[Fraction, ...]
    convention: Convention = Convention.CUBIC_OVER_SIX

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def truncate(self, order: int) -> "WeakSeries":
        if order > self.order:
            raise ValueError(f"series only known to order {self.order}")
        return WeakSeries(self.level, self.coefficients[: order + 1], self.convention)


def cubic_coupling_energies(level: int, b_order: int) -> list[Fraction]:
    """Energy corrections e_k, E = sum_k e_k b^k, for V = x²/2 + b x³ (odd k vanish)."""
    return [Fraction(int(q.numerator), int(q.denominator)) for q in kernels.bender_wu(level, b_order)]


def _compute(level: int, order: int, convention: Convention) -> tuple[Fraction, ...]:
    e = kernels.bender_wu(level, 2 * order)
    step = gmpy2.mpq(convention.b_squared.numerator, convention.b_squared.denominator)
    out = []
    fac = gmpy2.mpq(1)
    for L in range(order + 1):
        q = e[2 * L] * fac
        out.append(Fraction(int(q.numerator), int(q.denominator)))
        fac *= step
    return tuple(out)


def _cache_path(cache_dir: Path, level: int, convention: Convention) -> Path:
    return Path(cache_dir) / f"weak_{convention.value}_N{level}.txt"


def write_weak_cache(path: Path, series: WeakSeries) -> None:
    lines = [f"# convention={series.convention.value} level={series.level} order={series.order}"]
    lines += [f"{L} {c.numerator} {c.denominator}" for L, c in enumerate(series.coefficients)]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_weak_cache(path: Path) -> WeakSeries:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing header")
    fields = dict(item.split("=", 1) for item in text[0][1:].split())
    coeffs = []
    for L, line in enumerate(text[1:]):
        idx, num, den = line.split()
        if int(idx) != L:
            raise ValueError(f"{path}: order {idx} out of sequence")
        coeffs.append(Fraction(int(num), int(den)))
    if len(coeffs) != int(fields["order"]) + 1:
        raise ValueError(f"{path}: header order disagrees with body")
    return WeakSeries(int(fields["level"]), tuple(coeffs), Convention(fields["convention"]))


def weak_coefficients(
    level: int,
    order: int,
    convention: Convention | str = Convention.CUBIC_OVER_SIX,
    cache_dir: str | os.PathLike | None = None,
) -> WeakSeries:
    """Exact E_0..E_order for the given level.

    With ``cache_dir`` the text cache is reused when it reaches the requested order
    and (re)written otherwise; recomputation reproduces the cached rationals exactly.
    """
    if order < 0 or level < 0:
        raise ValueError("level and order must be non-negative")
    convention = Convention(convention)
    if cache_dir is not None:
        path = _cache_path(Path(cache_dir), level, convention)
        if path.exists():
            cached = read_weak_cache(path)
            if cached.level == level and cached.convention is convention and cached.order >= order:
                return cached.truncate(order)
        series = WeakSeries(level, _compute(level, order, convention), convention)
        write_weak_cache(path, series)
        return series
    return WeakSeries(level, _compute(level, order, convention), convention)


def large_order_prediction(level: int, L: int):
    """Leading asymptotic size of E_L (cubic-over-six normalization), sign included."""
    A = mpmath.mpf(INSTANTON_ACTION.numerator) / INSTANTON_ACTION.denominator
    n = level
    sign = -1 if L % 2 == 0 else 1
    return (
        sign
        * 6
        / mpmath.pi ** mpmath.mpf(1.5)
        * mpmath.mpf(288) ** n
        / mpmath.factorial(n)
        * mpmath.gamma(L + n + mpmath.mpf(1) / 2)
        / A ** (L + n + mpmath.mpf(1) / 2)
    )


def large_order_ratio(series: WeakSeries, L: int):
    """E_L divided by its large-order prediction; tends to 1 as L grows."""
    if series.convention is not Convention.CUBIC_OVER_SIX:
        raise ValueError("the large-order law is stated for the cubic-over-six normalization")
    if not 0 <= L <= series.order:
        raise ValueError(f"L={L} outside the computed range 0..{series.order}")
    c = series.coefficients[L]
    return (mpmath.mpf(c.numerator) / c.denominator) / large_order_prediction(series.level, L)


@dataclass(frozen=True)
class ShiftedStrongForm:
    """Strong-coupling form of H = -d²/2 + x²/2 + sqrt(g) x³ after x -> x - u/6, u = g^(-2/5).

    The rescaled operator reads -d²/2 + x³ + linear·u² x + constant·u³; the
    constant is the only odd power of g^(-2/5) and shifts every level by
    ``level_shift`` · g^(1/5) · g^(-6/5).
    """

    linear: Fraction
    constant: Fraction
    level_shift: Fraction


def shifted_strong_form(convention: Convention | str = Convention.UNIT_CUBIC) -> ShiftedStrongForm:
    """Exact coefficients of the shifted strong-coupling operator (unit-cubic only)."""
    if Convention(convention) is not Convention.UNIT_CUBIC:
        raise ValueError("the shifted form is defined for the unit-cubic normalization")
    # expand (x + s)³ + (u/2)(x + s)² with s = -u/6, as polynomials in x with coefficients in u
    s = Fraction(-1, 6)
    cubic = [s**3, 3 * s**2, 3 * s, Fraction(1)]  # (x+s)^3, coefficients carry u^(3-k)
    quad = [s**2 / 2, s, Fraction(1, 2)]  # (u/2)(x+s)^2, coefficients carry u^(3-k)
    total = [cubic[k] + (quad[k] if k < 3 else 0) for k in range(4)]
    if total[2] != 0:
        raise ArithmeticError("shift failed to remove the quadratic term")
    # the constant term is already the N-independent energy shift
    return ShiftedStrongForm(linear=total[1], constant=total[0], level_shift=total[0])
