"""Continued fractions from power series, with an optional square-root tail.

Strong-coupling form, in chi::

    E(chi) = E(0) + E'(0) chi f_0(chi),   f_(p-1) = 1 + a_p chi / f_p,   f_p(0) = 1

Weak-coupling form, in g::

    E(g) = E(0) h_0(g),   h_(p-1) = 1 + kappa_p g / h_p

The coefficients follow from repeated series division. Truncation replaces the
deepest level by 1, or by 1/2 + sqrt(1 + 4 gamma chi)/2, which builds in a
square-root branch point at chi = -1/(4 gamma).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import mpmath

from .series import PowerSeries, series_reciprocal, to_mpf

__all__ = [
    "CFKind",
    "ContinuedFraction",
    "CFConstructionError",
    "cf_from_series",
    "truncated_series",
    "cf_eval",
    "TailSpec",
    "calibrate_gamma",
    "leading_large_chi_coefficient",
    "weak_cf",
    "kappa_asymptote",
    "error_scaling_constant",
    "write_cf",
    "read_cf",
]


class CFKind(str, enum.Enum):
    STRONG = "strong-chi"
    WEAK = "weak-g"


@dataclass(frozen=True)
class ContinuedFraction:
    kind: CFKind
    normalization: tuple
    coefficients: tuple
    uncertainties: tuple | None = None

    @property
    def depth(self) -> int:
        return len(self.coefficients)


class CFConstructionError(ArithmeticError):
    def __init__(self, message: str, partial: list):
        super().__init__(message)
        self.partial = partial


def _fraction_coefficients(f: list, depth: int | None) -> list:
    """a_1, a_2, ... of f = 1 + a_1 x / (1 + a_2 x / (...)) from the series f."""
    out = []
    f = list(f)
    while len(f) > 1 and (depth is None or len(out) < depth):
        if f[0] != 1 and abs(f[0] - 1) > mpmath.mpf(2) ** (-mpmath.mp.prec // 2):
            raise CFConstructionError("level does not start at 1", out)
        a = f[1]
        if a == 0:
            raise CFConstructionError(f"vanishing coefficient at depth {len(out) + 1}", out)
        out.append(a)
        h = f[1:]  # (f - 1) / x
        f = [a * c for c in series_reciprocal(PowerSeries(h)).coeffs]
    return out


def cf_from_series(
    coeffs: Sequence,
    kind: CFKind | str = CFKind.STRONG,
    depth: int | None = None,
    reference: ContinuedFraction | None = None,
) -> ContinuedFraction:
    """Coefficients of the continued fraction that reproduces the series term by term.

    A series c_0..c_n fixes depth n - 1 for the strong form and depth n for the
    weak form. With ``reference``, a fraction built the same way from less
    accurate input, each coefficient carries the distance to its counterpart as
    its uncertainty.
    """
    kind = CFKind(kind)
    c = [to_mpf(x) for x in coeffs]
    if kind is CFKind.STRONG:
        if len(c) < 3:
            raise ValueError("need at least three coefficients")
        if c[1] == 0:
            raise CFConstructionError("E'(0) vanishes", [])
        f0 = [x / c[1] for x in c[1:]]
        norm, out = (c[0], c[1]), _fraction_coefficients(f0, depth)
    else:
        if c[0] == 0:
            raise CFConstructionError("E(0) vanishes", [])
        norm, out = (c[0],), _fraction_coefficients([x / c[0] for x in c], depth)
    unc = None
    if reference is not None:
        if reference.kind is not kind:
            raise ValueError("reference fraction is of a different kind")
        n = min(len(out), reference.depth)
        out = out[:n]
        unc = tuple(abs(a - b) for a, b in zip(out, reference.coefficients))
    return ContinuedFraction(kind, norm, tuple(out), unc)


def truncated_series(cf: ContinuedFraction, depth: int, order: int) -> list:
    """Re-expansion in powers of the variable of the fraction cut at ``depth`` (unit tail)."""
    if depth > cf.depth:
        raise ValueError(f"depth {depth} exceeds the {cf.depth} available coefficients")
    one = PowerSeries([mpmath.mpf(1)], order=order)
    f = one
    for p in range(depth, 0, -1):
        shifted = PowerSeries([mpmath.mpf(0)] + [cf.coefficients[p - 1] * x for x in series_reciprocal(f).coeffs[:order]], order=order)
        f = one + shifted
    if cf.kind is CFKind.STRONG:
        e0, e1 = cf.normalization
        tail = [e1 * x for x in f.coeffs[: order]]
        return [e0] + tail
    return [cf.normalization[0] * x for x in f.coeffs]


@dataclass(frozen=True)
class TailSpec:
    """Square-root tail 1/2 + sqrt(1 + 4 gamma chi)/2 placed at depth ``depth``."""

    gamma: object
    depth: int

    def value(self, chi):
        return (1 + mpmath.sqrt(1 + 4 * self.gamma * chi)) / 2


class PoleError(ZeroDivisionError):
    pass


def cf_eval(cf: ContinuedFraction, x, depth: int | None = None, tail: TailSpec | None = None):
    """Evaluate bottom-up from the tail (unit tail when ``tail`` is None).

    ``x`` is chi for the strong form and g for the weak form. The square root in
    the tail takes its principal branch, which is continuous from x > 0 and puts a
    negative imaginary part on chi = -|chi| + i0.
    """
    depth = cf.depth if depth is None else depth
    if tail is not None:
        depth = tail.depth
    if depth > cf.depth:
        raise ValueError(f"depth {depth} exceeds the {cf.depth} available coefficients")
    x = to_mpf(x) if not isinstance(x, complex) else mpmath.mpc(x)
    f = tail.value(x) if tail is not None else mpmath.mpf(1)
    for p in range(depth, 0, -1):
        if f == 0:
            raise PoleError(f"level {p} vanishes at x={x}")
        f = 1 + cf.coefficients[p - 1] * x / f
    if cf.kind is CFKind.STRONG:
        e0, e1 = cf.normalization
        return e0 + e1 * x * f
    return cf.normalization[0] * f


def leading_large_chi_coefficient(cf: ContinuedFraction, depth: int, gamma):
    """c with E(chi) ~ E'(0) c chi^(3/2) at large chi, for the square-root tail.

    Every level then grows like sqrt(chi): f_depth ~ sqrt(gamma chi) and
    f_(p-1) ~ (a_p / c_p) sqrt(chi).
    """
    c = mpmath.sqrt(gamma)
    for p in range(depth, 0, -1):
        c = cf.coefficients[p - 1] / c
    return c


def calibrate_gamma(cf: ContinuedFraction, depth: int, target=None) -> TailSpec:
    """Tail parameter gamma for which the large-chi term of E is ``target`` chi^(3/2).

    The default target 1/3 cancels the -1/(3g) term of E(g) at small g. The
    leading coefficient is c_0(gamma) = K gamma^(s/2) with s = +1 for even depth and
    -1 for odd depth, so the equation E'(0) c_0(gamma) = target is monotone and is
    solved in closed form.
    """
    if cf.kind is not CFKind.STRONG:
        raise ValueError("gamma calibration applies to the strong-coupling fraction")
    if depth < 1 or depth > cf.depth:
        raise ValueError(f"depth must lie in 1..{cf.depth}")
    target = mpmath.mpf(1) / 3 if target is None else to_mpf(target)
    e1 = cf.normalization[1]
    k = leading_large_chi_coefficient(cf, depth, 1)
    s = 1 if depth % 2 == 0 else -1
    ratio = target / (e1 * k)
    if ratio <= 0:
        raise ArithmeticError("no positive gamma matches the large-chi condition")
    gamma = ratio ** (2 * s)
    if not mpmath.mpf("1e-3") < gamma < 10:
        raise ArithmeticError(f"gamma={mpmath.nstr(gamma, 8)} outside (1e-3, 10)")
    return TailSpec(gamma, depth)


def weak_cf(coeffs: Sequence, depth: int | None = None) -> ContinuedFraction:
    """kappa_p of h_0 = E(g)/E(0), h_(p-1) = 1 + kappa_p g / h_p."""
    return cf_from_series(coeffs, CFKind.WEAK, depth)


def kappa_asymptote(p: int):
    """Large-p form (10 p + 3 (-1)^p)/96 of the weak-coupling coefficients."""
    return mpmath.mpf(10 * p + 3 * (-1) ** p) / 96


def error_scaling_constant(errors: dict, g) -> tuple:
    """Least-squares C and b in log|error_p| = -C sqrt(p/g) + b.

    ``errors`` maps the truncation depth p to the absolute error at coupling g.
    Use depths of one parity: the two parities approach the limit from opposite
    sides with slightly different offsets.
    """
    if len(errors) < 2:
        raise ValueError("need errors at two depths at least")
    g = to_mpf(g)
    xs = [mpmath.sqrt(mpmath.mpf(p) / g) for p in errors]
    ys = [mpmath.log(abs(to_mpf(e))) for e in errors.values()]
    n = len(xs)
    mx, my = mpmath.fsum(xs) / n, mpmath.fsum(ys) / n
    slope = mpmath.fsum((x - mx) * (y - my) for x, y in zip(xs, ys)) / mpmath.fsum((x - mx) ** 2 for x in xs)
    return -slope, my - slope * mx


def write_cf(path, cf: ContinuedFraction, tail: TailSpec | None = None, digits: int = 30) -> None:
    gamma = "none" if tail is None else mpmath.nstr(tail.gamma, digits, strip_zeros=False)
    pmax = cf.depth if tail is None else tail.depth
    lines = [f"# kind={cf.kind.value} pmax={pmax} gamma={gamma}"]
    unc = cf.uncertainties or (mpmath.mpf(0),) * cf.depth
    for p, (a, u) in enumerate(zip(cf.coefficients, unc), start=1):
        lines.append(f"{p} {mpmath.nstr(a, digits, strip_zeros=False)} {mpmath.nstr(u, 3)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_cf(path) -> tuple[dict, list, list]:
    text = Path(path).read_text().splitlines()
    header = dict(item.split("=", 1) for item in text[0][1:].split())
    coeffs, unc = [], []
    for line in text[1:]:
        _, a, u = line.split()
        coeffs.append(mpmath.mpf(a))
        unc.append(mpmath.mpf(u))
    return header, coeffs, unc
