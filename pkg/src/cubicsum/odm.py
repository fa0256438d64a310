"""Order-dependent mapping (ODM) summation of the weak-coupling series.

The coupling is mapped to g = rho * zeta(lambda); the mapped function
phi(lambda) = (1 - lambda)^p * T(g(lambda)) is expanded in lambda, where T is
either E itself or F = 1/3 + g E, and p is the prefactor exponent. The coefficient
of lambda^L is a polynomial P_L(rho) of degree L. Truncating at order K with a
per-order rho_K gives the approximant sequence.
"""
from __future__ import annotations

import csv
import dataclasses
import enum
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import gmpy2
import mpmath

from .perturbation import INSTANTON_ACTION, WeakSeries
from .series import RhoPolynomialSeries, poly_derivative, poly_roots, polyval, to_mpf

__all__ = [
    "MappingSpec",
    "MAPPINGS",
    "get_mapping",
    "target_coefficients",
    "build_rho_polynomials",
    "FittedSchedule",
    "FITTED_SCHEDULES",
    "RhoMode",
    "RhoChoice",
    "select_rho",
    "rho_schedule",
    "export_rho_csv",
    "InversionError",
    "invert_mapping",
    "ODMApproximant",
    "odm_sum",
    "odm_sequence",
    "Acceleration",
    "aitken",
    "aitken_accelerate",
    "ConvergenceModel",
    "saddle_constants",
    "ErrorPrediction",
    "error_model",
]


@dataclass(frozen=True)
class MappingSpec:
    """g = rho * zeta(lambda) with zeta = lambda (1 - lambda/2)^h (1 - lambda)^(-alpha).

    ``h`` is 1 for the half-factor mapping and 0 otherwise. ``prefactor`` is the
    exponent p of (1 - lambda)^p multiplying the mapped function, and ``target``
    says whether that function is E or F = 1/3 + g E.
    """

    tag: str
    alpha: Fraction
    prefactor: Fraction
    target: str
    half_factor: bool = False

    def __post_init__(self):
        if self.target not in ("E", "F"):
            raise ValueError("target must be 'E' or 'F'")

    @property
    def strong_exponent(self) -> Fraction:
        """beta = p / alpha, the power of g that leads the mapped function at large g."""
        return self.prefactor / self.alpha

    @property
    def endpoint_factor(self) -> Fraction:
        """kappa in zeta ~ kappa (1 - lambda)^(-alpha) as lambda -> 1."""
        return Fraction(1, 2) if self.half_factor else Fraction(1)

    def without_prefactor(self) -> "MappingSpec":
        return dataclasses.replace(self, prefactor=Fraction(0))

    def zeta(self, lam):
        a = _num(self.alpha)
        z = lam * (1 - lam) ** (-a)
        return z * (1 - lam / 2) if self.half_factor else z

    def dzeta(self, lam):
        """Derivative of zeta with respect to lambda."""
        a = _num(self.alpha)
        base = (1 - lam) ** (-a - 1) * (1 - lam + a * lam)
        if not self.half_factor:
            return base
        return base * (1 - lam / 2) - lam * (1 - lam) ** (-a) / 2


def _num(q):
    return mpmath.mpf(q.numerator) / q.denominator if isinstance(q, Fraction) else q


MAPPINGS = {
    "a": MappingSpec("a", Fraction(5, 4), Fraction(3, 2), "F"),
    "b": MappingSpec("b", Fraction(5, 2), Fraction(3), "F", half_factor=True),
    "c": MappingSpec("c", Fraction(5, 2), Fraction(1, 2), "E"),
}


def get_mapping(tag: str | MappingSpec) -> MappingSpec:
    if isinstance(tag, MappingSpec):
        return tag
    try:
        return MAPPINGS[tag]
    except KeyError:
        raise ValueError(f"unknown mapping {tag!r}; choose from {sorted(MAPPINGS)}") from None


def target_coefficients(series: WeakSeries | Sequence[Fraction], mapping: MappingSpec) -> list[Fraction]:
    """Coefficients of the function the mapping acts on (F = 1/3 + g E for F targets)."""
    coeffs = list(series.coefficients if isinstance(series, WeakSeries) else series)
    if mapping.target == "F":
        return [Fraction(1, 3)] + coeffs
    return coeffs


def _mapped_power_coefficients(p: int, q: Fraction, n: int) -> list:
    """Exact coefficients of (1 - x/2)^p (1 - x)^q through x^n."""
    one = gmpy2.mpq(1)
    qq = gmpy2.mpq(q.numerator, q.denominator)
    f = [one]
    if n == 0:
        return f
    if p == 0:
        for k in range(n):
            f.append(f[-1] * (k - qq) / (k + 1))
        return f
    # (1-x)(2-x) f' = -(p(1-x) + q(2-x)) f gives a three-term recurrence
    f.append(-(p + 2 * qq) / 2)
    for k in range(1, n):
        f.append(((3 * k - p - 2 * qq) * f[k] + (p + qq - k + 1) * f[k - 1]) / (2 * (k + 1)))
    return f


def build_rho_polynomials(
    series: WeakSeries | Sequence[Fraction], mapping: str | MappingSpec, K: int, *, transformed: bool = False
) -> RhoPolynomialSeries:
    """Exact table P_0(rho)..P_K(rho) of the mapped series.

    ``series`` is a weak series (transformed to F when the mapping targets F) or,
    with ``transformed=True``, the already-transformed coefficient list.
    """
    mapping = get_mapping(mapping)
    coeffs = list(series) if transformed else target_coefficients(series, mapping)
    if len(coeffs) < K + 1:
        raise ValueError(f"need {K + 1} target coefficients, have {len(coeffs)}")
    rows = [[None] * (L + 1) for L in range(K + 1)]
    for m in range(K + 1):
        t = gmpy2.mpq(coeffs[m].numerator, coeffs[m].denominator)
        h = _mapped_power_coefficients(m if mapping.half_factor else 0, mapping.prefactor - mapping.alpha * m, K - m)
        for n, hn in enumerate(h):
            rows[m + n][m] = t * hn
    return RhoPolynomialSeries(rows)


# ---------------------------------------------------------------------------
# rho schedules


@dataclass(frozen=True)
class FittedSchedule:
    """rho_K = (R / K) (1 - c / ((K + shift)^(4/5) + d)) with R = A mu_c."""

    c: str
    d: str
    shift: int

    def rho(self, K: int, R):
        c, d = mpmath.mpf(self.c), mpmath.mpf(self.d)
        return R / K * (1 - c / ((K + self.shift) ** (mpmath.mpf(4) / 5) + d))


FITTED_SCHEDULES = {
    "a": FittedSchedule("12.94", "11.97", 3),
    "b": FittedSchedule("5.0", "4.6", 2),
}


class RhoMode(str, enum.Enum):
    FITTED = "fitted"
    DERIVATIVE_ROOTS = "roots-derivative"
    ROOTS = "roots"


@dataclass(frozen=True)
class RhoChoice:
    K: int
    rho: object
    mode: RhoMode
    fallback: bool = False


def _bracketed_roots(polys: RhoPolynomialSeries, K: int, derivative: bool, R, lo="0.05", hi="3", steps=300):
    """Real roots of P_K (or P'_K) in (lo R/K, hi R/K], largest first, by sign scan and refinement."""
    scale = R / K
    grid = [scale * (mpmath.mpf(hi) - (mpmath.mpf(hi) - mpmath.mpf(lo)) * i / steps) for i in range(steps + 1)]
    vals = polys.row_values(K, grid, derivative)
    f = lambda x: polys.row_values(K, [x], derivative)[0]
    roots = []
    for i in range(steps):
        if vals[i] == 0:
            roots.append(grid[i])
        elif mpmath.sign(vals[i]) != mpmath.sign(vals[i + 1]):
            roots.append(mpmath.findroot(f, (grid[i + 1], grid[i]), solver="anderson"))
    return roots


def _all_real_positive_roots(coeffs: list) -> list:
    roots = poly_roots(coeffs)
    tol = mpmath.mpf(10) ** (-mpmath.mp.dps // 3)
    found = [mpmath.re(r) for r in roots if mpmath.re(r) > 0 and abs(mpmath.im(r)) <= tol * abs(r)]
    return sorted(found, reverse=True)


def _polish_real_root(coeffs: list, x):
    d = poly_derivative(coeffs)
    for _ in range(60):
        step = polyval(coeffs, x) / polyval(d, x)
        x -= step
        if abs(step) <= mpmath.mpf(2) ** (-mpmath.mp.prec + 8) * abs(x):
            break
    return x


def select_rho(
    polys: RhoPolynomialSeries,
    K: int,
    mapping: str | MappingSpec,
    mode: RhoMode | str = RhoMode.FITTED,
    fit: FittedSchedule | None = None,
    all_roots: bool = False,
) -> RhoChoice:
    """rho_K from the fitted formula, or from the largest real positive root of P'_K
    (``roots-derivative``) or of P_K (``roots``).

    Real roots are located by a sign scan over (0.05, 3] R/K and refined; with
    ``all_roots=True`` every complex root is computed instead and the real positive
    ones are kept. Among roots within 1% of the largest, the one with the smallest
    |P_K| wins. Without any real positive root the fitted formula is used and the
    choice is flagged.
    """
    mapping = get_mapping(mapping)
    mode = RhoMode(mode)
    if K < 1:
        raise ValueError("K must be at least 1")
    fit = fit or FITTED_SCHEDULES.get(mapping.tag)
    R = saddle_constants(mapping).R
    if mode is RhoMode.FITTED:
        if fit is None:
            raise ValueError(f"no fitted rho formula for mapping {mapping.tag!r}; use a root mode")
        return RhoChoice(K, fit.rho(K, R), mode)
    derivative = mode is RhoMode.DERIVATIVE_ROOTS
    row = polys.numeric_coefficients(K)
    target = poly_derivative(row) if derivative else row
    if all_roots:
        candidates = _all_real_positive_roots(target)
    else:
        candidates = _bracketed_roots(polys, K, derivative, R)
    if not candidates:
        if fit is None:
            raise ArithmeticError(f"no real positive root at K={K} and no fitted fallback")
        return RhoChoice(K, fit.rho(K, R), mode, fallback=True)
    top = max(candidates)
    near = [r for r in candidates if r >= top * mpmath.mpf("0.99")]
    if len(near) > 1:
        pk = polys.row_values(K, near)
        best = near[min(range(len(near)), key=lambda i: abs(pk[i]))]
    else:
        best = near[0]
    return RhoChoice(K, _polish_real_root(target, best) if all_roots else best, mode)


def rho_schedule(
    polys: RhoPolynomialSeries,
    orders: Sequence[int],
    mapping: str | MappingSpec,
    mode: RhoMode | str = RhoMode.FITTED,
    fit: FittedSchedule | None = None,
) -> list[RhoChoice]:
    return [select_rho(polys, K, mapping, mode, fit) for K in orders]


def export_rho_csv(choices: Sequence[RhoChoice], digits: int = 30) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["K", "rho"])
    for ch in choices:
        w.writerow([ch.K, mpmath.nstr(ch.rho, digits, strip_zeros=False)])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# inversion


class InversionError(ArithmeticError):
    def __init__(self, message: str, trace: list):
        super().__init__(message)
        self.trace = trace


def _newton(f, df, x, tol, maxiter=80):
    for _ in range(maxiter):
        step = f(x) / df(x)
        x -= step
        if abs(step) <= tol * max(1, abs(x)):
            return x, True
    return x, False


def invert_mapping(g, rho, mapping: str | MappingSpec, steps: int = 32):
    """The preimage lambda of g under g = rho zeta(lambda) on the branch through 0.

    Continuation runs outward in |g| along a fixed ray from a point where
    lambda ~ g / rho. Points on or next to the negative axis are reached along
    the ray arg g = pi/2 followed by an arc, which selects the image of g + i0
    (upper half lambda-plane). Real positive g stays on the real segment (0, 1).
    """
    mapping = get_mapping(mapping)
    rho = to_mpf(rho)
    if g == 0:
        raise ValueError("g must be nonzero")
    tol = mpmath.mpf(2) ** (-mpmath.mp.prec + 6)
    radii = lambda r: [r * mpmath.mpf(2) ** (k - steps) for k in range(steps + 1)]
    if not isinstance(g, (mpmath.mpc, complex)) or (mpmath.im(g) == 0 and mpmath.re(g) > 0):
        g = to_mpf(mpmath.re(g))
        if g > 0:
            return _continue(mapping, rho, radii(g), tol)
    g = mpmath.mpc(g)
    r, theta = abs(g), mpmath.arg(g)
    # lambda(g) branches on the negative axis; stay clear of it until the last arc
    guard = 3 * mpmath.pi / 4
    if abs(theta) <= guard:
        return _continue(mapping, rho, [t * mpmath.expj(theta) for t in radii(r)], tol)
    start = mpmath.pi / 2 if theta > 0 else -mpmath.pi / 2
    path = [t * mpmath.expj(start) for t in radii(r)]
    path += [r * mpmath.expj(start + (theta - start) * k / steps) for k in range(1, steps + 1)]
    return _continue(mapping, rho, path, tol)


def _continue(mapping, rho, path, tol):
    lam = path[0] / rho
    trace = []
    for t in path:
        lam, ok = _newton(lambda x: rho * mapping.zeta(x) - t, lambda x: rho * mapping.dzeta(x), lam, tol)
        trace.append((t, lam))
        if not ok:
            raise InversionError(f"Newton failed near g={mpmath.nstr(t, 8)}", trace)
    return lam


# ---------------------------------------------------------------------------
# summation


@dataclass(frozen=True)
class ODMApproximant:
    mapping: str
    K: int
    rho: object
    g: object
    lam: object
    value: object
    error: object
    flags: tuple = ()


def _undo_target(mapping: MappingSpec, lam, g, total):
    val = (1 - lam) ** (-_num(mapping.prefactor)) * total if mapping.prefactor else total
    if mapping.target == "F":
        return (val - mpmath.mpf(1) / 3) / g, (1 - lam) ** (-_num(mapping.prefactor)) / g
    return val, (1 - lam) ** (-_num(mapping.prefactor)) if mapping.prefactor else mpmath.mpf(1)


def odm_sum(
    polys: RhoPolynomialSeries, mapping: str | MappingSpec, K: int, rho, g, *, values: list | None = None
) -> ODMApproximant:
    """Order-K approximant E^(K)(g) = prefactor^-1 sum_{L<=K} P_L(rho) lambda^L, mapped back to E.

    The attached error is |P_(K+1)(rho) lambda^(K+1)| carried through the same
    back-transformation, when P_(K+1) is available. ``values`` may pass
    precomputed P_L(rho).
    """
    mapping = get_mapping(mapping)
    if K > polys.order:
        raise ValueError(f"order {K} exceeds the polynomial table ({polys.order})")
    real_g = not isinstance(g, (mpmath.mpc, complex)) and to_mpf(g) > 0
    g = to_mpf(g) if real_g else mpmath.mpc(g)
    lam = invert_mapping(g, rho, mapping)
    upto = min(K + 1, polys.order)
    P = values if values is not None else polys.evaluate(rho, upto)
    total = polyval(P[: K + 1], lam)
    value, scale = _undo_target(mapping, lam, g, total)
    error = abs(scale * P[K + 1] * lam ** (K + 1)) if upto > K and len(P) > K + 1 else mpmath.inf
    flags = []
    if mpmath.re(lam) >= 1 and abs(mpmath.im(lam)) <= abs(lam) * mpmath.mpf(2) ** (-mpmath.mp.prec // 2):
        flags.append("lambda-on-prefactor-cut")
    if mapping.tag == "a" or mapping.alpha == Fraction(5, 4):
        if not error_model(g, K, mapping).in_domain:
            flags.append("no-convergence")
    if real_g:
        value = mpmath.re(value)
    return ODMApproximant(mapping.tag, K, rho, g, lam, value, error, tuple(flags))


def odm_sequence(
    series: WeakSeries | Sequence[Fraction],
    mapping: str | MappingSpec,
    orders: Sequence[int],
    g,
    mode: RhoMode | str = RhoMode.FITTED,
    fit: FittedSchedule | None = None,
    polys: RhoPolynomialSeries | None = None,
) -> list[ODMApproximant]:
    mapping = get_mapping(mapping)
    kmax = max(orders)
    if polys is None:
        polys = build_rho_polynomials(series, mapping, kmax + 1)
    out = []
    for K in orders:
        choice = select_rho(polys, K, mapping, mode, fit)
        out.append(odm_sum(polys, mapping, K, choice.rho, g))
    return out


# ---------------------------------------------------------------------------
# acceleration


def aitken(seq: Sequence) -> list:
    """One Aitken delta-squared pass; entries with a vanishing denominator are dropped."""
    out = []
    for i in range(len(seq) - 2):
        den = seq[i] + seq[i + 2] - 2 * seq[i + 1]
        if den == 0:
            out.append(seq[i + 2])
        else:
            out.append((seq[i] * seq[i + 2] - seq[i + 1] ** 2) / den)
    return out


@dataclass(frozen=True)
class Acceleration:
    """Accelerated limit of an approximant sequence.

    ``value`` comes from the parity class holding the last (highest-order) term;
    ``uncertainty`` is the size of its final Aitken correction. ``other`` is the
    limit of the complementary parity class, kept for comparison.
    """

    value: object
    uncertainty: object
    stages: int
    other: object = None


def _accelerate_one(seq: list, max_stages: int | None):
    floor = mpmath.mpf(2) ** (-mpmath.mp.prec + 20)
    prev_corr = None
    stages = 0
    last_corr = abs(seq[-1] - seq[-2]) if len(seq) > 1 else mpmath.mpf(0)
    while len(seq) >= 3 and (max_stages is None or stages < max_stages):
        nxt = aitken(seq)
        corr = abs(nxt[-1] - seq[-1])
        if prev_corr is not None and corr > prev_corr:
            break
        seq = nxt
        stages += 1
        prev_corr = last_corr = corr
        if corr <= 10 * floor * max(1, abs(seq[-1])):
            break
    return seq[-1], last_corr, stages


def aitken_accelerate(values: Sequence, max_stages: int | None = None, split_parity: bool = True) -> Acceleration:
    """Repeated Aitken passes on the even- and odd-index subsequences separately.

    Passes repeat while the size of the correction keeps shrinking, or until it
    drops below ten units of the working precision; ``max_stages`` caps the count.
    """
    values = list(values)
    if len(values) < 3:
        raise ValueError("need at least three terms")
    if not split_parity:
        v, corr, st = _accelerate_one(values, max_stages)
        return Acceleration(v, corr, st)
    lead = values[len(values) - 1 :: -2][::-1]
    rest = values[len(values) - 2 :: -2][::-1]
    v, corr, st = _accelerate_one(lead, max_stages) if len(lead) >= 3 else (values[-1], abs(values[-1] - values[-2]), 0)
    other = _accelerate_one(rest, max_stages)[0] if len(rest) >= 3 else None
    return Acceleration(v, corr, st, other)


# ---------------------------------------------------------------------------
# convergence constants


@dataclass(frozen=True)
class ConvergenceModel:
    mapping: str
    mu_c: object
    lambda_c: object
    R: object
    C2: object
    C2_endpoint: object
    C3: object | None = None
    residual: object = None

    @property
    def domain_boundary(self):
        """Re(g^(-1/alpha)) must exceed this for convergence (when C3 is known)."""
        return None if self.C3 is None else self.C3 / self.C2


_C3_DEFAULTS = {"a": "-13.8"}


def saddle_constants(mapping: str | MappingSpec) -> ConvergenceModel:
    """mu_c and lambda_c from the saddle system sigma'(lambda) = 0, Re sigma = 0.

    Eliminating mu = -lambda zeta'(lambda) / zeta(lambda)^2 leaves
    -zeta / (lambda zeta') = ln(-lambda), solved for real lambda in (-1, 0).
    C2 = R^(1/alpha) with R = A mu_c; ``C2_endpoint`` keeps the endpoint factor of
    the mapping, (kappa R)^(1/alpha).
    """
    mapping = get_mapping(mapping)
    z, dz = mapping.zeta, mapping.dzeta
    with mpmath.workdps(mpmath.mp.dps + 10):
        h = lambda lam: -z(lam) / (lam * dz(lam)) - mpmath.log(-lam)
        lam = mpmath.findroot(h, (mpmath.mpf("-0.6"), mpmath.mpf("-0.05")), solver="anderson")
        mu = -lam * dz(lam) / z(lam) ** 2
        sigma_d = -dz(lam) / (mu * z(lam) ** 2) - 1 / lam
        sigma_re = 1 / (mu * z(lam)) - mpmath.log(-lam)
        A = _num(INSTANTON_ACTION)
        R = A * mu
        inv_alpha = 1 / _num(mapping.alpha)
        c2 = R**inv_alpha
        c2e = (_num(mapping.endpoint_factor) * R) ** inv_alpha
        resid = max(abs(sigma_d), abs(sigma_re))
    c3 = mpmath.mpf(_C3_DEFAULTS[mapping.tag]) if mapping.tag in _C3_DEFAULTS else None
    return ConvergenceModel(mapping.tag, +mu, +lam, +R, +c2, +c2e, c3, resid)


@dataclass(frozen=True)
class ErrorPrediction:
    log_error: object
    in_domain: bool
    chi: object


def error_model(g, K: int, mapping: str | MappingSpec, model: ConvergenceModel | None = None) -> ErrorPrediction:
    """Predicted natural log of the order-K error, (C3 - C2 Re g^(-1/alpha)) K^(1 - 1/alpha).

    Without a known C3 only the endpoint term is returned and the point counts as
    inside the domain (the alpha = 5/2 sector covers the whole first sheet).
    """
    mapping = get_mapping(mapping)
    if K < 1:
        raise ValueError("K must be at least 1")
    model = model or saddle_constants(mapping)
    g = mpmath.mpc(g)
    if mpmath.im(g) == 0 and mpmath.re(g) < 0:
        g = mpmath.mpc(mpmath.re(g), 0)  # principal branch: arg = +pi
    inv_alpha = 1 / _num(mapping.alpha)
    chi = g ** (-inv_alpha)
    power = mpmath.mpf(K) ** (1 - inv_alpha)
    c3 = model.C3 if model.C3 is not None else 0
    log_err = (c3 - model.C2 * mpmath.re(chi)) * power
    in_domain = True if model.C3 is None else mpmath.re(chi) > model.domain_boundary
    return ErrorPrediction(log_err, bool(in_domain), chi)
