"""Working-precision policy shared by every numeric layer (mpmath contexts)."""
from __future__ import annotations

import contextlib

import mpmath

MIN_DIGITS = 30


def digits_for_order(K: int) -> int:
    """Guard-digit rule for order-K summation: max(64, 4K) decimal digits."""
    return max(64, 4 * K)


@contextlib.contextmanager
def working_digits(digits: int):
    """Run a block at ``digits`` decimal digits, never below the floor of 30 and never
    below the precision already active in the caller."""
    if digits < MIN_DIGITS:
        raise ValueError(f"precision must be at least {MIN_DIGITS} digits, got {digits}")
    with mpmath.workdps(max(digits, mpmath.mp.dps)):
        yield


def precision_floor():
    """Relative size of one unit in the last place at the current precision."""
    return mpmath.mpf(2) ** (-mpmath.mp.prec)
