from fractions import Fraction

import mpmath
import pytest
from oracles import rayleigh_schrodinger

from cubicsum import kernels
from cubicsum.perturbation import (
    Convention,
    cubic_coupling_energies,
    large_order_ratio,
    read_weak_cache,
    shifted_strong_form,
    weak_coefficients,
)


@pytest.mark.parametrize("level", [0, 1, 2])
def test_bender_wu_matches_rayleigh_schrodinger(level):
    oracle = rayleigh_schrodinger(level, 12)
    assert cubic_coupling_energies(level, 12) == oracle
    series = weak_coefficients(level, 6)
    assert series.coefficients == tuple(oracle[2 * L] * Fraction(-1, 36) ** L for L in range(7))


def test_first_coefficients_both_conventions():
    g = weak_coefficients(0, 3).coefficients
    assert g == (Fraction(1, 2), Fraction(11, 288), Fraction(-930, 288**2), Fraction(39709, 5971968))
    assert weak_coefficients(1, 2).coefficients == (Fraction(3, 2), Fraction(71, 288), Fraction(-625, 4608))
    unit = weak_coefficients(0, 2, Convention.UNIT_CUBIC).coefficients
    assert unit == (Fraction(1, 2), Fraction(-11, 8), Fraction(-465, 32))


def test_odd_orders_in_b_vanish():
    e = cubic_coupling_energies(2, 15)
    assert all(e[k] == 0 for k in range(1, 16, 2))


def test_compiled_and_python_kernels_agree():
    from cubicsum import _kernels_py

    for level, order in ((0, 40), (3, 25)):
        assert list(kernels.bender_wu(level, order)) == list(_kernels_py.bender_wu(level, order))


def test_cache_round_trip_and_reuse(tmp_path):
    first = weak_coefficients(1, 20, cache_dir=tmp_path)
    path = tmp_path / "weak_cubic-over-six_N1.txt"
    text = path.read_text()
    assert text.splitlines()[0] == "# convention=cubic-over-six level=1 order=20"
    assert read_weak_cache(path) == first
    assert weak_coefficients(1, 10, cache_dir=tmp_path) == first.truncate(10)
    assert path.read_text() == text
    weak_coefficients(1, 25, cache_dir=tmp_path)
    assert read_weak_cache(path).order == 25


def test_signs_alternate():
    c = weak_coefficients(0, 60).coefficients
    assert all((c[L] > 0) == (L % 2 == 1) for L in range(1, 61))


def test_large_order_ratio_approaches_one():
    mpmath.mp.dps = 50
    s = weak_coefficients(0, 90)
    ratios = [large_order_ratio(s, L) for L in (20, 40, 60, 80, 90)]
    assert abs(ratios[3] - 1) < mpmath.mpf("0.05")
    # the 1/L correction shrinks monotonically
    assert all(abs(a - 1) > abs(b - 1) for a, b in zip(ratios, ratios[1:]))


def test_level_one_large_order():
    mpmath.mp.dps = 50
    s = weak_coefficients(1, 100)
    r50, r100 = large_order_ratio(s, 50), large_order_ratio(s, 100)
    # the subleading correction is larger than for the ground level but still fading
    assert abs(r100 - 1) < abs(r50 - 1) < mpmath.mpf("0.15")


def test_shifted_strong_form_exact():
    form = shifted_strong_form()
    assert (form.linear, form.constant, form.level_shift) == (Fraction(-1, 12), Fraction(1, 108), Fraction(1, 108))
    with pytest.raises(ValueError):
        shifted_strong_form("cubic-over-six")


def test_rejects_negative_order():
    with pytest.raises(ValueError):
        weak_coefficients(0, -1)
