"""Interpreted twins of the compiled kernels (same signatures, same results)."""
from __future__ import annotations

import gmpy2
from gmpy2 import mpq


def bender_wu(level: int, order: int) -> list:
    """Energy corrections e_0..e_order in powers of the cubic coupling b."""
    if level < 0 or order < 0:
        raise ValueError("level and order must be non-negative")
    N = level
    u0 = [mpq(0)] * (N + 1)
    u0[N] = mpq(1)
    for j in range(N - 2, -1, -2):
        u0[j] = mpq((j + 2) * (j + 1), 2) * u0[j + 2] / (j - N)
    u = [u0]
    e = [mpq(2 * N + 1, 2)]
    for k in range(1, order + 1):
        prev = u[k - 1]
        top = 3 * k + N
        ck = [mpq(0)] * (top + 1)
        ek = mpq(0)
        have_e = False
        for j in range(top, -1, -2):
            rhs = -prev[j - 3] if 0 <= j - 3 < len(prev) else mpq(0)
            for m in range(2, k, 2):
                um = u[k - m]
                if e[m] and j < len(um):
                    rhs += e[m] * um[j]
            if j == N:
                ek = prev[N - 3] if N >= 3 else mpq(0)
                if N + 2 <= top:
                    ek -= mpq((N + 2) * (N + 1), 2) * ck[N + 2]
                have_e = True
            else:
                if have_e and j <= N:
                    rhs += ek * u0[j]
                if j + 2 <= top:
                    rhs += mpq((j + 2) * (j + 1), 2) * ck[j + 2]
                ck[j] = rhs / (j - N)
        e.append(ek)
        u.append(ck)
    return e


def horner_rows(rows: list, x, prec: int) -> list:
    """Evaluate every row of a triangular coefficient table at the real point x."""
    out = []
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        for row in rows:
            acc = row[-1]
            for c in reversed(row[:-1]):
                acc = gmpy2.fma(acc, x, c)
            out.append(gmpy2.mpfr(acc))
    return out
