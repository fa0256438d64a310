"""Order-K pipelines shared by the command line and the acceptance checks.

A :class:`Workspace` owns the weak-series caches and the per-order strong sets,
which take most of the time at K = 150 and are therefore written to disk:

* ``ground``: level 0 through mapping (a) with the fitted rho schedule;
* ``excited``: level 1 through mapping (a) with rho from the roots of P_K;
* ``half-sum`` and ``half-difference-squared``: S01 and D01 with their own fits.

Strong series are accelerated on the odd orders below K. The direct ground series
uses Aitken passes, the symmetric pair uses the epsilon algorithm.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import mpmath

from .contfrac import ContinuedFraction, calibrate_gamma, cf_eval, cf_from_series
from .odm import RhoMode, aitken_accelerate, build_rho_polynomials, get_mapping, odm_sequence, select_rho
from .perturbation import WeakSeries, weak_coefficients
from .precision import digits_for_order
from .series import RhoPolynomialSeries
from .strong import (
    DIFFERENCE_MAPPING,
    SUM_MAPPING,
    SYMMETRIC_SCHEDULES,
    MergePair,
    RawStrongSet,
    StrongRun,
    StrongSeries,
    accelerate_run,
    chi_from_g,
    merge_analysis,
    reconstruct_ground_from_symmetric,
    strong_coefficients_at,
    symmetric_weak_series,
)

__all__ = ["RUN_KINDS", "DEFAULT_PMAX", "SumResult", "Workspace", "default_cache_dir", "write_strong_run", "read_strong_run"]

RUN_KINDS = ("ground", "excited", "half-sum", "half-difference-squared")
# deepest level whose coefficient is stable against the order-K - 2 data
DEFAULT_PMAX = 21


def default_cache_dir() -> Path:
    env = os.environ.get("CUBICSUM_CACHE")
    return Path(env) if env else Path.home() / ".cache" / "cubicsum"


def write_strong_run(path, run: StrongRun, digits: int) -> None:
    lines = [f"# kind={run.level} mapping={run.mapping.tag} orders={','.join(map(str, run.orders))} digits={digits}"]
    for K in run.orders:
        s = run.raw[K]
        cells = [str(K), mpmath.nstr(s.rho, digits, strip_zeros=False), "1" if s.truncated else "0"]
        cells += [mpmath.nstr(c, digits, strip_zeros=False) for c in s.coefficients]
        lines.append(" ".join(cells))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    os.replace(tmp, path)


def read_strong_run(path, mapping) -> StrongRun:
    text = Path(path).read_text().splitlines()
    head = dict(item.split("=", 1) for item in text[0][1:].split())
    run = StrongRun(head["kind"], get_mapping(mapping))
    for line in text[1:]:
        K, rho, trunc, *coeffs = line.split()
        run.raw[int(K)] = RawStrongSet(int(K), mpmath.mpf(rho), tuple(mpmath.mpf(c) for c in coeffs), trunc == "1")
    return run


@dataclass
class Workspace:
    """Weak series, strong runs and derived series for one top order K."""

    cache_dir: Path | None = None
    K: int = 150
    k_min: int = 60
    n_max: int = 28
    _runs: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)

    @property
    def digits(self) -> int:
        return digits_for_order(self.K)

    def weak(self, level: int) -> WeakSeries:
        return weak_coefficients(level, self.K + 1, cache_dir=self.cache_dir)

    # -- strong runs -------------------------------------------------------

    def _run_spec(self, kind: str):
        if kind == "ground":
            return self.weak(0), get_mapping("a"), RhoMode.FITTED, None, False
        if kind == "excited":
            return self.weak(1), get_mapping("a"), RhoMode.ROOTS, None, False
        half_sum, squared = symmetric_weak_series(self.weak(0), self.weak(1))
        if kind == "half-sum":
            return half_sum, SUM_MAPPING, RhoMode.FITTED, SYMMETRIC_SCHEDULES[kind], False
        if kind == "half-difference-squared":
            return squared, DIFFERENCE_MAPPING, RhoMode.FITTED, SYMMETRIC_SCHEDULES[kind], True
        raise ValueError(f"unknown run {kind!r}; choose from {RUN_KINDS}")

    def _run_path(self, kind: str) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"strong_{kind}_K{self.k_min}-{self.K}_n{self.n_max}_d{self.digits}.txt"

    def strong_run(self, kind: str) -> StrongRun:
        if kind in self._runs:
            return self._runs[kind]
        if self.k_min < 4 or self.K - self.k_min < 8:
            raise ValueError(f"strong runs need at least eight orders between {self.k_min} and K={self.K}")
        path = self._run_path(kind)
        series, mapping, mode, fit, transformed = self._run_spec(kind)
        if path is not None and path.exists():
            with mpmath.workdps(self.digits):
                run = read_strong_run(path, mapping)
        else:
            with mpmath.workdps(self.digits):
                polys: RhoPolynomialSeries = build_rho_polynomials(
                    series.coefficients if isinstance(series, WeakSeries) else series,
                    mapping,
                    self.K,
                    transformed=transformed,
                )
                run = StrongRun(kind, mapping)
                for K in range(self.k_min, self.K + 1):
                    rho = select_rho(polys, K, mapping, mode, fit).rho
                    run.raw[K] = strong_coefficients_at(polys, mapping, K, rho, self.n_max)
            if path is not None:
                write_strong_run(path, run, self.digits)
        self._runs[kind] = run
        return run

    def _accelerated(self, kind: str, method: str, top: int | None) -> StrongSeries:
        run = self.strong_run(kind)
        top = self.K if top is None else top
        parity = (self.K - 1) % 2
        sub = StrongRun(run.level, run.mapping, {K: v for K, v in run.raw.items() if K <= top})
        with mpmath.workdps(self.digits // 2):
            return accelerate_run(sub, parity, method)

    # -- derived series ----------------------------------------------------

    def ground_direct(self) -> StrongSeries:
        """Ground-state strong series straight from mapping (a)."""
        return self._accelerated("ground", "aitken", None)

    def excited_direct(self) -> StrongSeries:
        return self._accelerated("excited", "aitken", None)

    def symmetric_pair(self, top: int | None = None) -> tuple[StrongSeries, StrongSeries]:
        return (
            self._accelerated("half-sum", "wynn", top),
            self._accelerated("half-difference-squared", "wynn", top),
        )

    def ground_symmetric(self, top: int | None = None) -> StrongSeries:
        """Ground-state strong series rebuilt as S01 - sqrt(D01)."""
        with mpmath.workdps(self.digits // 2):
            return reconstruct_ground_from_symmetric(self.symmetric_pair(top))

    @cached_property
    def merge(self) -> MergePair:
        half_sum, delta = self.symmetric_pair()
        with mpmath.workdps(self.digits // 2):
            return merge_analysis(half_sum=half_sum, delta=delta)

    def strong_cf(self, depth: int | None = None) -> ContinuedFraction:
        """Continued fraction of the rebuilt ground series.

        Uncertainties are the coefficient changes when the order-K data are
        replaced by order K - 2.
        """
        depth = self.n_max - 1 if depth is None else depth
        with mpmath.workdps(self.digits // 2):
            lower = cf_from_series(self.ground_symmetric(self.K - 2).coefficients, "strong-chi", depth)
            return cf_from_series(self.ground_symmetric().coefficients, "strong-chi", depth, reference=lower)

    # -- sums ---------------------------------------------------------------

    def polys(self, mapping: str, K: int | None = None) -> RhoPolynomialSeries:
        K = self.K if K is None else K
        key = ("polys", mapping, K)
        if key not in self._runs:
            with mpmath.workdps(self.digits):
                self._runs[key] = build_rho_polynomials(self.weak(0), mapping, K + 1)
        return self._runs[key]

    def weak_sum(self, g, method: str = "a", K: int | None = None, rho: str = "fitted") -> "SumResult":
        """E(g) of the ground level by ODM at order K.

        Mapping (a) is summed at every order from 15 to K and the sequence is
        Aitken-accelerated; (b) and (c) use the single order K, with the change
        from order K - 1 as the uncertainty. ``rho`` is ``fitted`` or ``roots``
        (largest real root of P'_K); mapping (c) has no fitted schedule.
        """
        K = self.K if K is None else K
        mapping = get_mapping(method)
        mode = RhoMode.FITTED if rho == "fitted" else RhoMode.DERIVATIVE_ROOTS
        with mpmath.workdps(digits_for_order(K)):
            polys = self.polys(method, K)
            orders = range(15, K + 1) if method == "a" else (K - 1, K)
            seq = odm_sequence(None, mapping, list(orders), _as_number(g), mode=mode, polys=polys)
            if method == "a":
                acc = aitken_accelerate([s.value for s in seq])
                value, unc = acc.value, acc.uncertainty
            else:
                value, unc = seq[-1].value, abs(seq[-1].value - seq[-2].value)
            return SumResult(g, method, K, +value, +unc, seq[-1].flags)

    def cf_value(self, chi, p_max: int = DEFAULT_PMAX) -> "SumResult":
        """E^qqc(chi) from the continued fraction with the calibrated square-root tail.

        The uncertainty is the change when the tail moves one level up.
        """
        cf = self.strong_cf()
        with mpmath.workdps(self.digits // 2):
            chi = _as_number(chi)
            here = cf_eval(cf, chi, tail=calibrate_gamma(cf, p_max))
            below = cf_eval(cf, chi, tail=calibrate_gamma(cf, p_max - 1))
            return SumResult(chi, "cf", self.K, here, abs(here - below), ())

    def cf_energy(self, g, p_max: int = DEFAULT_PMAX) -> "SumResult":
        """E(g) = g^(1/5) E^qqc(g^(-4/5)) - 1/(3g) from the continued fraction."""
        with mpmath.workdps(self.digits // 2):
            g = _as_number(g)
            gc = mpmath.mpc(g)
            fifth = mpmath.power(gc, mpmath.mpf(1) / 5)
            inner = self.cf_value(chi_from_g(g), p_max)
            value = fifth * inner.value - 1 / (3 * gc)
            if not isinstance(g, mpmath.mpc):
                value = mpmath.re(value)
            return SumResult(g, "cf", self.K, value, abs(fifth) * inner.uncertainty, ())


@dataclass(frozen=True)
class SumResult:
    point: object
    method: str
    K: int
    value: object
    uncertainty: object
    flags: tuple = ()


def _as_number(x):
    """Real positive values stay real; anything on the negative axis becomes |x| e^(i pi)."""
    if isinstance(x, (mpmath.mpc, complex)):
        x = mpmath.mpc(x)
        if mpmath.im(x) == 0 and mpmath.re(x) > 0:
            return mpmath.re(x)
        return x
    x = mpmath.mpf(x)
    return x if x > 0 else mpmath.mpc(x)
