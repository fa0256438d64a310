from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicsum.odm import (
    FITTED_SCHEDULES,
    MAPPINGS,
    FittedSchedule,
    InversionError,
    aitken,
    aitken_accelerate,
    build_rho_polynomials,
    error_model,
    export_rho_csv,
    get_mapping,
    invert_mapping,
    odm_sequence,
    odm_sum,
    saddle_constants,
    select_rho,
    target_coefficients,
)
from cubicsum.perturbation import weak_coefficients
from cubicsum.series import PowerSeries, binomial_pow, series_compose, series_mul


@pytest.fixture(scope="module")
def ground():
    return weak_coefficients(0, 70)


def mapped_series_oracle(coeffs, mapping, rho: Fraction, K: int):
    """phi(lambda) = (1 - lambda)^p T(rho zeta(lambda)) by exact series composition."""
    lam = PowerSeries([Fraction(0), Fraction(1)], order=K)
    zeta = series_mul(lam, binomial_pow(-mapping.alpha, K))
    if mapping.half_factor:
        zeta = series_mul(zeta, PowerSeries([Fraction(1), Fraction(-1, 2)], order=K))
    g = PowerSeries([c * rho for c in zeta.coeffs])
    t = PowerSeries(coeffs[: K + 1])
    composed = series_compose(t, g)
    return series_mul(binomial_pow(mapping.prefactor, K), composed).coeffs


@pytest.mark.parametrize("tag", ["a", "b", "c"])
def test_rho_table_matches_direct_composition(ground, tag):
    mapping = get_mapping(tag)
    K = 14
    polys = build_rho_polynomials(ground, mapping, K)
    rho = Fraction(3, 7)
    oracle = mapped_series_oracle(target_coefficients(ground, mapping), mapping, rho, K)
    for L in range(K + 1):
        row = polys.coefficients(L)
        assert len(row) == L + 1
        assert sum(c * rho**m for m, c in enumerate(row)) == oracle[L]


def test_unknown_mapping():
    with pytest.raises(ValueError):
        get_mapping("z")


@pytest.mark.parametrize(
    "tag,mu,lam,c2",
    [("a", "3.811522", "-0.259901", "10.23"), ("b", "4.445762", "-0.216262", "3.40"), ("c", "4.895690", "-0.189645", "3.53")],
)
def test_saddle_constants(tag, mu, lam, c2):
    mpmath.mp.dps = 40
    m = saddle_constants(tag)
    # the printed digits are truncated, not rounded
    assert 0 <= m.mu_c - mpmath.mpf(mu) < mpmath.mpf(10) ** -6
    assert 0 <= mpmath.mpf(lam) - m.lambda_c < mpmath.mpf(10) ** -6
    # C2 is printed rounded for (a) and truncated for (c); allow one unit in the last place
    assert abs(m.C2 - mpmath.mpf(c2)) < mpmath.mpf("0.01")
    assert m.residual < mpmath.mpf(10) ** -30


def test_endpoint_constant_keeps_half_factor():
    mpmath.mp.dps = 30
    m = saddle_constants("b")
    assert abs(m.C2_endpoint - (m.R / 2) ** (mpmath.mpf(2) / 5)) < mpmath.mpf(10) ** -25


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from(["a", "b", "c"]),
    st.floats(min_value=0.05, max_value=2.0),
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=-2.9, max_value=2.9),
)
def test_inversion_round_trip(tag, rho, log_r, theta):
    mpmath.mp.dps = 40
    mapping = get_mapping(tag)
    g = mpmath.mpf(10) ** log_r * mpmath.expj(theta)
    lam = invert_mapping(g, rho, mapping)
    assert abs(rho * mapping.zeta(lam) - g) < mpmath.mpf(10) ** -30 * abs(g)


def test_inversion_positive_axis_stays_in_unit_interval():
    mpmath.mp.dps = 30
    for tag in "abc":
        lam = invert_mapping(mpmath.mpf(1000), mpmath.mpf("0.3"), tag)
        assert isinstance(lam, mpmath.mpf) and 0 < lam < 1


def test_inversion_negative_axis_upper_half_plane():
    mpmath.mp.dps = 30
    lam = invert_mapping(mpmath.mpc(-5), mpmath.mpf("0.5"), "c")
    assert mpmath.im(lam) > 0
    assert abs(lam - mpmath.mpc("0.8276", "0.3395")) < mpmath.mpf("1e-3")


def test_inversion_error_carries_trace():
    err = InversionError("x", [(1, 2)])
    assert err.trace == [(1, 2)]


def test_fitted_schedule_value():
    mpmath.mp.dps = 30
    R = saddle_constants("a").R
    rho = FITTED_SCHEDULES["a"].rho(55, R)
    expected = R / 55 * (1 - mpmath.mpf("12.94") / (mpmath.mpf(58) ** (mpmath.mpf(4) / 5) + mpmath.mpf("11.97")))
    assert rho == expected


def test_root_selectors_agree(ground):
    mpmath.mp.dps = 100
    polys = build_rho_polynomials(ground, "c", 31)
    scan = select_rho(polys, 30, "c", "roots-derivative")
    full = select_rho(polys, 30, "c", "roots-derivative", all_roots=True)
    assert abs(scan.rho - full.rho) < mpmath.mpf(10) ** -80
    assert not scan.fallback


def test_mapping_c_without_fit_needs_root_mode(ground):
    polys = build_rho_polynomials(ground, "c", 10)
    with pytest.raises(ValueError):
        select_rho(polys, 10, "c", "fitted")


def test_rho_csv_export(ground):
    mpmath.mp.dps = 40
    polys = build_rho_polynomials(ground, "a", 12)
    text = export_rho_csv([select_rho(polys, K, "a") for K in (10, 11)], digits=12)
    lines = text.splitlines()
    assert lines[0] == "K,rho" and lines[1].startswith("10,0.")


def test_odm_converges_on_positive_axis(ground):
    mpmath.mp.dps = 120
    polys = build_rho_polynomials(ground, "c", 41)
    prev = None
    for K in (20, 30, 40):
        rho = select_rho(polys, K, "c", "roots-derivative").rho
        approx = odm_sum(polys, "c", K, rho, mpmath.mpf("0.5"))
        err = abs(approx.value - mpmath.mpf("0.51689176425317197821115889"))
        assert isinstance(approx.value, mpmath.mpf) and approx.value > 0
        if prev is not None:
            assert err < prev
        prev = err
    assert prev < mpmath.mpf(10) ** -17


@settings(max_examples=15, deadline=None)
@given(st.floats(min_value=0.01, max_value=200))
def test_approximants_real_and_positive(g):
    mpmath.mp.dps = 60
    s = weak_coefficients(0, 26)
    for tag in ("a", "c"):
        polys = build_rho_polynomials(s, tag, 26)
        rho = select_rho(polys, 25, tag, "roots-derivative" if tag == "c" else "fitted").rho
        v = odm_sum(polys, tag, 25, rho, mpmath.mpf(g)).value
        assert isinstance(v, mpmath.mpf) and v > 0


def test_aitken_exact_on_geometric_tail():
    seq = [1 + mpmath.mpf(1) / 3**n for n in range(6)]
    assert all(abs(x - 1) < mpmath.mpf(10) ** -14 for x in aitken(seq))


def test_accelerate_alternating_log2():
    mpmath.mp.dps = 50
    partial, s = [], mpmath.mpf(0)
    for k in range(1, 40):
        s += mpmath.mpf((-1) ** (k + 1)) / k
        partial.append(s)
    acc = aitken_accelerate(partial, split_parity=False)
    assert abs(acc.value - mpmath.log(2)) < mpmath.mpf(10) ** -20
    assert acc.stages > 3
    capped = aitken_accelerate(partial, max_stages=1, split_parity=False)
    assert capped.stages == 1
    with pytest.raises(ValueError):
        aitken_accelerate(partial[:2])


def test_error_model_domain():
    mpmath.mp.dps = 30
    assert not error_model(mpmath.mpf("-0.5"), 150, "a").in_domain
    assert error_model(mpmath.mpf(-1), 150, "a").in_domain
    assert error_model(mpmath.mpf(1), 150, "c").in_domain


def test_flag_on_non_convergent_point(ground):
    mpmath.mp.dps = 60
    seq = odm_sequence(ground, "a", [20, 21], mpmath.mpc(-0.5))
    assert "no-convergence" in seq[-1].flags
    assert mpmath.im(seq[-1].value) > 0


def test_mapping_registry():
    assert set(MAPPINGS) == {"a", "b", "c"}
    assert MAPPINGS["b"].endpoint_factor == Fraction(1, 2)
    assert MAPPINGS["a"].strong_exponent == Fraction(6, 5)
