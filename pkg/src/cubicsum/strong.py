"""Strong-coupling expansion in chi = g^(-4/5), read off from ODM data.

At large g every level behaves as

    E(g) = -1/(3g) + g^(1/5) sum_n E^qqc_n chi^n,

so F = 1/3 + g E grows like g^(6/5). Near lambda = 1 the mapped function of
an ODM approximant is a polynomial in s = 1 - lambda, and g^(-1/alpha) is a
power series in s. Reverting that series and collecting powers of chi turns each
order-K approximant into a set of strong-coupling coefficients; the per-order
sets are then accelerated across K.

The level-merging analysis works with the two combinations that stay regular
where the ground and first excited levels meet: the half sum S01 and the squared
half difference D01.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import mpmath

from .odm import (
    FittedSchedule,
    MappingSpec,
    RhoMode,
    _num,
    aitken_accelerate,
    build_rho_polynomials,
    get_mapping,
    select_rho,
)
from .perturbation import WeakSeries
from .series import (
    PowerSeries,
    RhoPolynomialSeries,
    binomial_pow,
    polyval,
    series_compose,
    series_mul,
    series_reciprocal,
    series_reverse,
    to_mpf,
)

__all__ = [
    "STRONG_RADIUS",
    "chi_from_g",
    "g_from_chi",
    "StrongSeries",
    "RawStrongSet",
    "strong_coefficients_at",
    "closed_form_leading_terms",
    "extract_strong_coeffs",
    "StrongRun",
    "strong_run",
    "ACCELERATORS",
    "accelerate_run",
    "energy_from_strong",
    "strong_limit_negative_axis",
    "SUM_MAPPING",
    "DIFFERENCE_MAPPING",
    "SYMMETRIC_SCHEDULES",
    "symmetric_weak_series",
    "MergePair",
    "merge_analysis",
    "reconstruct_ground_from_symmetric",
    "ground_energy_from_symmetric",
    "fit_rho_schedule",
    "write_strong",
    "read_strong",
]

STRONG_RADIUS = mpmath.mpf("1.3")
_FOUR_FIFTHS = Fraction(4, 5)


def chi_from_g(g):
    """chi = g^(-4/5) on the principal branch; a real negative g means |g| e^(i pi)."""
    if isinstance(g, (mpmath.mpc, complex)):
        g = mpmath.mpc(g)
        if mpmath.im(g) == 0 and mpmath.re(g) > 0:
            g = mpmath.re(g)
    else:
        g = to_mpf(g)
    if g == 0:
        raise ValueError("g must be nonzero")
    if not isinstance(g, mpmath.mpc) and g > 0:
        return g ** (-mpmath.mpf(4) / 5)
    return mpmath.power(mpmath.mpc(g), -mpmath.mpf(4) / 5)


def g_from_chi(chi):
    """Inverse of chi_from_g for chi with arg in (-4 pi/5, 4 pi/5]."""
    chi = to_mpf(chi) if not isinstance(chi, (mpmath.mpc, complex)) else mpmath.mpc(chi)
    if not isinstance(chi, mpmath.mpc) and chi > 0:
        return chi ** (-mpmath.mpf(5) / 4)
    return mpmath.power(mpmath.mpc(chi), -mpmath.mpf(5) / 4)


@dataclass(frozen=True)
class StrongSeries:
    """E^qqc_0.. of one level (or of a level combination) with per-term uncertainties."""

    level: int | str
    coefficients: tuple
    uncertainties: tuple
    method: str = "a"
    order_K: int = 0
    digits: int = 0
    flags: tuple = ()

    def __post_init__(self):
        if len(self.coefficients) != len(self.uncertainties):
            raise ValueError("one uncertainty per coefficient")
        if any(u < 0 for u in self.uncertainties):
            raise ValueError("uncertainties must be non-negative")

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, chi):
        return polyval(self.coefficients, chi)

    def as_power_series(self) -> PowerSeries:
        return PowerSeries(self.coefficients)

    def truncate(self, n_max: int) -> "StrongSeries":
        return StrongSeries(
            self.level,
            self.coefficients[: n_max + 1],
            self.uncertainties[: n_max + 1],
            self.method,
            self.order_K,
            self.digits,
            self.flags,
        )


# ---------------------------------------------------------------------------
# extraction at one order


def _powers_per_term(mapping: MappingSpec) -> int:
    step = mapping.alpha * _FOUR_FIFTHS
    if step.denominator != 1:
        raise ValueError(f"alpha={mapping.alpha} does not give integer powers of chi")
    return int(step)


def _endpoint_series(mapping: MappingSpec, order: int) -> PowerSeries:
    """q(s) with g = kappa rho q(s) s^(-alpha): 1 - s, or 1 - s^2 for the half-factor mapping."""
    one, zero = mpmath.mpf(1), mpmath.mpf(0)
    if mapping.half_factor:
        return PowerSeries([one, zero, -one], order=order)
    return PowerSeries([one, -one], order=order)


def _series_pow(base: PowerSeries, exponent, order: int) -> PowerSeries:
    """base^exponent for base = 1 - s or 1 - s^2, through s^order."""
    even = len(base.coeffs) > 2 and base[1] == 0
    coeffs = binomial_pow(exponent, order // 2 if even else order).coeffs
    out = [mpmath.mpf(0)] * (order + 1)
    for k, c in enumerate(coeffs):
        out[2 * k if even else k] = c
    return PowerSeries(out)


@dataclass(frozen=True)
class RawStrongSet:
    """Strong-coupling coefficients implied by one order-K approximant."""

    K: int
    rho: object
    coefficients: tuple
    truncated: bool = False


def _endpoint_taylor(values: Sequence, order: int) -> list:
    """Coefficients of phi(1 - s) = sum_L P_L (1 - s)^L in powers of s, through s^order."""
    K = len(values) - 1
    out = []
    for k in range(min(order, K) + 1):
        total = mpmath.fsum(values[L] * mpmath.binomial(L, k) for L in range(k, K + 1))
        out.append(total if k % 2 == 0 else -total)
    return out + [mpmath.mpf(0)] * (order - min(order, K))


def _z_reversion(mapping: MappingSpec, order: int) -> PowerSeries:
    """s(z) from z = s q(s)^(-1/alpha)."""
    q = _endpoint_series(mapping, order)
    qpow = _series_pow(q, -1 / _num(mapping.alpha), order)
    z_of_s = PowerSeries([mpmath.mpf(0)] + list(qpow.coeffs[:order]), order=order)
    return series_reverse(z_of_s)


_REVERSION_CACHE: dict = {}


def _cached_reversion(mapping: MappingSpec, order: int) -> PowerSeries:
    key = (mapping.alpha, mapping.half_factor, order, mpmath.mp.prec)
    if key not in _REVERSION_CACHE:
        _REVERSION_CACHE[key] = _z_reversion(mapping, order)
    return _REVERSION_CACHE[key]


def strong_coefficients_at(
    polys: RhoPolynomialSeries, mapping: str | MappingSpec, K: int, rho, n_max: int
) -> RawStrongSet:
    """E^qqc_0..E^qqc_n_max (or the F/E coefficients the mapping targets) from order K at rho.

    The order-K polynomial phi is re-expanded about lambda = 1, multiplied by
    q(s)^(-beta), composed with s(z), and the coefficient of z^(m n) is scaled by
    (kappa rho)^(-beta + 4n/5), where m = 4 alpha/5.
    """
    mapping = get_mapping(mapping)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    step = _powers_per_term(mapping)
    truncated = False
    if step * n_max > K:
        n_max = K // step
        truncated = True
    order = step * n_max
    values = polys.evaluate(to_mpf(rho), K)[: K + 1]
    phi = PowerSeries(_endpoint_taylor(values, order), order=order)
    beta = _num(mapping.strong_exponent)
    psi = series_mul(phi, _series_pow(_endpoint_series(mapping, order), -beta, order))
    in_z = psi if order == 0 else series_compose(psi, _cached_reversion(mapping, order))
    scale = _num(mapping.endpoint_factor) * to_mpf(rho)
    coeffs = tuple(in_z[step * n] * scale ** (-beta + mpmath.mpf(4) * n / 5) for n in range(n_max + 1))
    return RawStrongSet(K, rho, coeffs, truncated)


def closed_form_leading_terms(polys: RhoPolynomialSeries, mapping: str | MappingSpec, K: int, rho) -> tuple:
    """The first four z-coefficients scaled to strong-coupling form, from explicit derivatives.

    With psi = phi lambda^(-beta) and derivatives taken at lambda = 1:
    eps_0 = psi, eps_1 = -psi', eps_2 = psi''/2 + psi'/alpha,
    eps_3 = -((3 - alpha)/(2 alpha^2) psi' + psi''/alpha + psi'''/6), each times
    rho^(-beta + n/alpha). Valid for mappings without the half factor.
    """
    mapping = get_mapping(mapping)
    if mapping.half_factor:
        raise ValueError("closed forms assume g = rho lambda (1 - lambda)^(-alpha)")
    values = polys.evaluate(to_mpf(rho), K)[: K + 1]
    beta = _num(mapping.strong_exponent)
    a = _num(mapping.alpha)
    # derivatives of phi at 1
    d = [list(values)]
    for _ in range(3):
        prev = d[-1]
        d.append([k * prev[k] for k in range(1, len(prev))])
    p0, p1, p2, p3 = (polyval(c, 1) for c in d)
    # lambda^(-beta) and its derivatives at 1
    l1, l2, l3 = -beta, beta * (beta + 1), -beta * (beta + 1) * (beta + 2)
    psi0 = p0
    psi1 = p1 + p0 * l1
    psi2 = p2 + 2 * p1 * l1 + p0 * l2
    psi3 = p3 + 3 * p2 * l1 + 3 * p1 * l2 + p0 * l3
    rho = to_mpf(rho)
    e0 = psi0 * rho ** (-beta)
    e1 = -psi1 * rho ** (-beta + 1 / a)
    e2 = (psi2 / 2 + psi1 / a) * rho ** (-beta + 2 / a)
    e3 = -((3 - a) / (2 * a**2) * psi1 + psi2 / a + psi3 / 6) * rho ** (-beta + 3 / a)
    return e0, e1, e2, e3


def extract_strong_coeffs(
    polys: RhoPolynomialSeries,
    mapping: str | MappingSpec,
    K: int,
    n_max: int,
    mode: RhoMode | str = RhoMode.FITTED,
    fit: FittedSchedule | None = None,
    level: int | str = 0,
) -> StrongSeries:
    """Strong series from the single order K; uncertainty is the change from order K - 2."""
    mapping = get_mapping(mapping)
    if K < 3:
        raise ValueError("K must be at least 3")
    cur = strong_coefficients_at(polys, mapping, K, select_rho(polys, K, mapping, mode, fit).rho, n_max)
    prev = strong_coefficients_at(polys, mapping, K - 2, select_rho(polys, K - 2, mapping, mode, fit).rho, n_max)
    n = min(len(cur.coefficients), len(prev.coefficients))
    unc = tuple(abs(cur.coefficients[i] - prev.coefficients[i]) for i in range(n))
    flags = ("truncated",) if cur.truncated or prev.truncated else ()
    return StrongSeries(level, cur.coefficients[:n], unc, mapping.tag, K, mpmath.mp.dps, flags)


# ---------------------------------------------------------------------------
# runs over many orders and acceleration


@dataclass
class StrongRun:
    """Per-order strong-coupling sets for one level (or combination) and mapping."""

    level: int | str
    mapping: MappingSpec
    raw: dict = field(default_factory=dict)

    @property
    def orders(self) -> list[int]:
        return sorted(self.raw)

    def column(self, n: int, orders: Sequence[int] | None = None) -> list:
        return [self.raw[K].coefficients[n] for K in (orders or self.orders)]


def strong_run(
    series: WeakSeries | Sequence[Fraction],
    mapping: str | MappingSpec,
    orders: Sequence[int],
    n_max: int,
    mode: RhoMode | str = RhoMode.FITTED,
    fit: FittedSchedule | None = None,
    level: int | str | None = None,
    polys: RhoPolynomialSeries | None = None,
    transformed: bool = False,
) -> StrongRun:
    mapping = get_mapping(mapping)
    if polys is None:
        polys = build_rho_polynomials(series, mapping, max(orders), transformed=transformed)
    if level is None:
        level = series.level if isinstance(series, WeakSeries) else 0
    run = StrongRun(level, mapping)
    for K in orders:
        rho = select_rho(polys, K, mapping, mode, fit).rho
        run.raw[K] = strong_coefficients_at(polys, mapping, K, rho, n_max)
    return run


def _wynn(values: list):
    return mpmath.shanks(values)[-1][-1]


def _aitken(values: list):
    return aitken_accelerate(values, split_parity=False).value


ACCELERATORS = {"aitken": _aitken, "wynn": _wynn}


def accelerate_run(run: StrongRun, parity: int | None = None, method: str = "aitken") -> StrongSeries:
    """Accelerate every coefficient across orders.

    ``method`` is ``"aitken"`` (iterated delta-squared with a plateau stop) or
    ``"wynn"`` (the epsilon algorithm, last even column). ``parity`` restricts the
    orders to odd (1) or even (0) K; by default the parity of the highest order is
    used. The uncertainty of a coefficient is the change of its accelerated value
    when the highest order is dropped, i.e. orders up to K against orders up to K - 2.
    """
    try:
        accelerate = ACCELERATORS[method]
    except KeyError:
        raise ValueError(f"unknown acceleration {method!r}; expected one of {sorted(ACCELERATORS)}") from None
    orders = run.orders
    if parity is not None:
        orders = [K for K in orders if K % 2 == parity]
    else:
        orders = [K for K in orders if K % 2 == orders[-1] % 2]
    if len(orders) < 4:
        raise ValueError("need at least four orders of one parity")
    n_terms = min(len(run.raw[K].coefficients) for K in orders)
    coeffs, unc = [], []
    for n in range(n_terms):
        col = run.column(n, orders)
        v = accelerate(col)
        coeffs.append(v)
        unc.append(abs(v - accelerate(col[:-1])))
    flags = ("truncated",) if any(run.raw[K].truncated for K in orders) else ()
    return StrongSeries(run.level, tuple(coeffs), tuple(unc), run.mapping.tag, orders[-1], mpmath.mp.dps, flags)


# ---------------------------------------------------------------------------
# using the series


def energy_from_strong(series: StrongSeries, g, radius=STRONG_RADIUS):
    """E(g) = -1/(3g) + g^(1/5) sum_n E^qqc_n chi^n on the principal branch.

    Rejects |chi| >= radius; beyond it the continued fraction should be used.
    """
    chi = chi_from_g(g)
    if abs(chi) >= radius:
        raise ValueError(f"|chi|={mpmath.nstr(abs(chi), 6)} outside the validated radius {radius}")
    if isinstance(chi, mpmath.mpc):
        gc = mpmath.mpc(g)
        fifth = mpmath.power(gc, mpmath.mpf(1) / 5)
        return -1 / (3 * gc) + fifth * polyval(series.coefficients, chi)
    g = to_mpf(g)
    return -1 / (3 * g) + g ** (mpmath.mpf(1) / 5) * polyval(series.coefficients, chi)


def strong_limit_negative_axis(series: StrongSeries):
    """lim E(g)/|g|^(1/5) along g = |g| e^(i pi): E^qqc_0 e^(i pi/5)."""
    return series.coefficients[0] * mpmath.expjpi(mpmath.mpf(1) / 5)


# ---------------------------------------------------------------------------
# symmetric combinations of the two lowest levels

SUM_MAPPING = MappingSpec("half-sum", Fraction(5, 4), Fraction(3, 2), "F")
DIFFERENCE_MAPPING = MappingSpec("half-difference-squared", Fraction(5, 4), Fraction(1, 2), "E")
SYMMETRIC_SCHEDULES = {
    "half-sum": FittedSchedule("20.35", "18.57", 3),
    "half-difference-squared": FittedSchedule("19.63", "15.16", 3),
}


def symmetric_weak_series(ground: WeakSeries, excited: WeakSeries) -> tuple[list, list]:
    """Exact weak series of (E0 + E1)/2 and ((E0 - E1)/2)^2."""
    n = min(ground.order, excited.order) + 1
    e0, e1 = ground.coefficients[:n], excited.coefficients[:n]
    half_sum = [(a + b) / 2 for a, b in zip(e0, e1)]
    half_diff = [(a - b) / 2 for a, b in zip(e0, e1)]
    squared = [sum((half_diff[i] * half_diff[L - i] for i in range(L + 1)), Fraction(0)) for L in range(n)]
    return half_sum, squared


def _sqrt_series(coeffs: Sequence) -> list:
    r = [mpmath.sqrt(coeffs[0])]
    for k in range(1, len(coeffs)):
        r.append((coeffs[k] - mpmath.fsum(r[i] * r[k - i] for i in range(1, k))) / (2 * r[0]))
    return r


@dataclass(frozen=True)
class MergePair:
    """Half sum S01 and squared half difference D01 with the merging point they imply."""

    delta: StrongSeries
    half_sum: StrongSeries
    chi_c: object = None
    chi_c_uncertainty: object = None
    energy_at_merge: object = None
    energy_uncertainty: object = None
    slope: object = None
    local_exponent: object = None
    found: bool = False


def _pade(coeffs: Sequence, L: int, M: int):
    p, q = mpmath.pade(list(coeffs[: L + M + 1]), L, M)
    return lambda x: mpmath.polyval(p[::-1], x) / mpmath.polyval(q[::-1], x)


def _bisect(f, a, b, tol):
    fa = f(a)
    for _ in range(400):
        m = (a + b) / 2
        fm = f(m)
        if fm == 0 or abs(b - a) <= tol:
            return m
        if mpmath.sign(fm) == mpmath.sign(fa):
            a, fa = m, fm
        else:
            b = m
    return (a + b) / 2


def _pade_root(coeffs, L, M, lo, hi, steps=200):
    f = _pade(coeffs, L, M)
    xs = [lo + (hi - lo) * i / steps for i in range(steps + 1)]
    vals = [f(x) for x in xs]
    for i in range(steps, 0, -1):  # scan from the origin side
        if mpmath.sign(vals[i]) != mpmath.sign(vals[i - 1]):
            return _bisect(f, xs[i - 1], xs[i], mpmath.mpf(2) ** (-mpmath.mp.prec + 10)), f
    return None, f


def _pade_orders(n_terms: int) -> tuple[int, int]:
    L = (n_terms - 1) // 2
    return L, n_terms - 1 - L


def merge_analysis(
    ground: StrongSeries | None = None,
    excited: StrongSeries | None = None,
    *,
    half_sum: StrongSeries | None = None,
    delta: StrongSeries | None = None,
    window: tuple = ("-1.6", "-1.1"),
) -> MergePair:
    """Locate chi_c where D01 = (E_GS - E_ES)^2/4 vanishes.

    Either pass both level series, or S01 and D01 extracted directly. D01 is
    summed by its near-diagonal Pade approximant [L/M] (L + M = n_max - 1); the
    root in ``window`` is refined by bisection and its uncertainty is the spread
    over [L-2/M-2]..[L/M]. The merged energy S01(chi_c) uses the Pade approximant of
    S01 at the same orders.
    """
    if half_sum is None or delta is None:
        if ground is None or excited is None:
            raise ValueError("pass the two level series or the two symmetric series")
        n = min(ground.n_max, excited.n_max) + 1
        gs, es = PowerSeries(ground.coefficients[:n]), PowerSeries(excited.coefficients[:n])
        s = (gs + es) * (mpmath.mpf(1) / 2)
        d_half = (gs - es) * (mpmath.mpf(1) / 2)
        dd = series_mul(d_half, d_half)
        ug = ground.uncertainties[:n]
        ue = excited.uncertainties[:n]
        u_s = tuple((a + b) / 2 for a, b in zip(ug, ue))
        u_half = [(a + b) / 2 for a, b in zip(ug, ue)]
        u_d = tuple(
            mpmath.fsum(2 * abs(d_half[i]) * u_half[k - i] for i in range(k + 1)) for k in range(n)
        )
        half_sum = StrongSeries("S01", tuple(s.coeffs), u_s, ground.method, ground.order_K, ground.digits)
        delta = StrongSeries("D01", tuple(dd.coeffs), u_d, ground.method, ground.order_K, ground.digits)
    if delta.coefficients[0] <= 0:
        raise ValueError("D01(0) must be positive")
    lo, hi = mpmath.mpf(window[0]), mpmath.mpf(window[1])
    n = min(delta.n_max, half_sum.n_max) + 1
    L, M = _pade_orders(n - 1)
    roots = []
    main_f = None
    for shift in (0, 1, 2):
        root, f = _pade_root(delta.coefficients, L - shift, M - shift, lo, hi)
        if shift == 0:
            main_f = f
        if root is not None:
            roots.append((shift, root))
    if not roots or roots[0][0] != 0:
        return MergePair(delta, half_sum, found=False)
    chi_c = roots[0][1]
    spread = max(abs(r - chi_c) for _, r in roots) if len(roots) > 1 else mpmath.inf
    s_main = _pade(half_sum.coefficients, L, M)
    s_vals = [_pade(half_sum.coefficients, L - k, M - k)(r) for k, r in roots]
    energy = s_main(chi_c)
    e_unc = max(abs(v - energy) for v in s_vals) if len(s_vals) > 1 else mpmath.inf
    slope = mpmath.diff(main_f, chi_c)
    # local exponent from |D| ~ |chi - chi_c|^p on both sides
    hs = [mpmath.mpf(10) ** -k for k in (3, 4, 5)]
    exps = []
    for sgn in (1, -1):
        logs = [mpmath.log(abs(main_f(chi_c + sgn * h))) for h in hs]
        exps.append((logs[0] - logs[-1]) / (mpmath.log(hs[0]) - mpmath.log(hs[-1])))
    return MergePair(delta, half_sum, chi_c, spread, energy, e_unc, slope, sum(exps) / 2, True)


def reconstruct_ground_from_symmetric(pair: MergePair | tuple) -> StrongSeries:
    """E_GS = S01 - sqrt(D01) as a chi-series, the branch below the excited level at chi = 0.

    Uncertainties propagate linearly: delta sqrt(D) = delta D / (2 sqrt(D)).
    """
    half_sum, delta = (pair.half_sum, pair.delta) if isinstance(pair, MergePair) else pair
    if delta.coefficients[0] <= 0:
        raise ValueError("D01(0) must be positive")
    n = min(len(half_sum.coefficients), len(delta.coefficients))
    root = _sqrt_series(delta.coefficients[:n])
    inv_root = series_reciprocal(PowerSeries([2 * c for c in root]))
    abs_inv = [abs(c) for c in inv_root.coeffs]
    coeffs, unc = [], []
    for k in range(n):
        coeffs.append(half_sum.coefficients[k] - root[k])
        droot = mpmath.fsum(abs_inv[i] * delta.uncertainties[k - i] for i in range(k + 1))
        unc.append(half_sum.uncertainties[k] + droot)
    return StrongSeries(0, tuple(coeffs), tuple(unc), "symmetric", min(half_sum.order_K, delta.order_K), mpmath.mp.dps)


def ground_energy_from_symmetric(pair: MergePair, chi):
    """E^qqc_GS(chi) = S01 - sqrt(D01) from the Pade sums, also past chi_c.

    Beyond the merging point D01 < 0 and the square root is taken so that the
    imaginary part is negative, the value reached from g + i0.
    """
    n = min(pair.delta.n_max, pair.half_sum.n_max) + 1
    L, M = _pade_orders(n - 1)
    d = _pade(pair.delta.coefficients, L, M)(chi)
    s = _pade(pair.half_sum.coefficients, L, M)(chi)
    if isinstance(d, mpmath.mpc) or d < 0:
        r = mpmath.sqrt(mpmath.mpc(d))
        if mpmath.im(r) < 0:
            r = -r
        return s - r
    return s - mpmath.sqrt(d)


# ---------------------------------------------------------------------------
# rho schedule fits


def fit_rho_schedule(rhos: dict, R, shift: int = 3) -> FittedSchedule:
    """Least-squares c, d in rho_K K / R = 1 - c / ((K + shift)^(4/5) + d).

    Writing y = rho_K K / R and u = (K + shift)^(4/5), the form is linear:
    u = c / (1 - y) - d.
    """
    if len(rhos) < 2:
        raise ValueError("need at least two orders")
    rows = []
    for K, rho in sorted(rhos.items()):
        y = to_mpf(rho) * K / R
        rows.append((1 / (1 - y), (K + shift) ** (mpmath.mpf(4) / 5)))
    A = mpmath.matrix([[w, -1] for w, _ in rows])
    b = mpmath.matrix([u for _, u in rows])
    sol = mpmath.lu_solve(A.T * A, A.T * b)
    return FittedSchedule(mpmath.nstr(sol[0], 6), mpmath.nstr(sol[1], 6), shift)


# ---------------------------------------------------------------------------
# cache


def write_strong(path, series: StrongSeries, digits: int | None = None) -> None:
    digits = digits or max(30, series.digits // 2 or 30)
    lines = [f"# level={series.level} method={series.method} orderK={series.order_K} digits={digits}"]
    for n, (c, u) in enumerate(zip(series.coefficients, series.uncertainties)):
        lines.append(f"{n} {mpmath.nstr(c, digits, strip_zeros=False)} {mpmath.nstr(u, 3)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def read_strong(path) -> StrongSeries:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing header")
    head = dict(item.split("=", 1) for item in text[0][1:].split())
    coeffs, unc = [], []
    for n, line in enumerate(text[1:]):
        idx, c, u = line.split()
        if int(idx) != n:
            raise ValueError(f"{path}: term {idx} out of sequence")
        coeffs.append(mpmath.mpf(c))
        unc.append(mpmath.mpf(u))
    level = head["level"]
    level = int(level) if level.isdigit() else level
    return StrongSeries(level, tuple(coeffs), tuple(unc), head["method"], int(head["orderK"]), int(head["digits"]))

