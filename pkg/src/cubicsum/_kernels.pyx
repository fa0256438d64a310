# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: exact perturbative recursion and polynomial-table evaluation.

Both functions mirror ``cubicsum._kernels_py`` and must return identical values.
"""
from cpython.mem cimport PyMem_Malloc, PyMem_Free
from gmpy2 cimport *

cdef extern from "gmp.h":
    void mpq_init(mpq_ptr x)
    void mpq_clear(mpq_ptr x)
    void mpq_set_si(mpq_ptr rop, long num, unsigned long den)
    void mpq_add(mpq_ptr rop, mpq_srcptr a, mpq_srcptr b)
    void mpq_sub(mpq_ptr rop, mpq_srcptr a, mpq_srcptr b)
    void mpq_mul(mpq_ptr rop, mpq_srcptr a, mpq_srcptr b)
    void mpq_div(mpq_ptr rop, mpq_srcptr a, mpq_srcptr b)
    int mpq_sgn(mpq_srcptr x)

cdef extern from "mpfr.h":
    void mpfr_init2(mpfr_ptr x, mpfr_prec_t prec)
    void mpfr_clear(mpfr_ptr x)
    int mpfr_fma(mpfr_ptr rop, mpfr_srcptr a, mpfr_srcptr b, mpfr_srcptr c, mpfr_rnd_t rnd)

import_gmpy2()


def bender_wu(int level, int order):
    """Energy corrections e_0..e_order in powers of the cubic coupling b.

    Works on u(x) = sum_k b^k u_k(x), psi = exp(-x^2/2) u, for the potential
    x^2/2 + b x^3, with the x^level coefficient of u_k pinned to zero for k >= 1.
    """
    if level < 0 or order < 0:
        raise ValueError("level and order must be non-negative")
    cdef int N = level
    cdef int K = order
    cdef Py_ssize_t *off = <Py_ssize_t *> PyMem_Malloc((K + 2) * sizeof(Py_ssize_t))
    if off == NULL:
        raise MemoryError()
    cdef Py_ssize_t total = 0
    cdef int k, j, m, top, ptop
    for k in range(K + 1):
        off[k] = total
        total += 3 * k + N + 1
    off[K + 1] = total

    cdef __mpq_struct *u = <__mpq_struct *> PyMem_Malloc(total * sizeof(__mpq_struct))
    cdef __mpq_struct *e = <__mpq_struct *> PyMem_Malloc((K + 1) * sizeof(__mpq_struct))
    if u == NULL or e == NULL:
        PyMem_Free(off)
        PyMem_Free(u)
        PyMem_Free(e)
        raise MemoryError()
    cdef Py_ssize_t i
    for i in range(total):
        mpq_init(&u[i])
    for k in range(K + 1):
        mpq_init(&e[k])

    cdef mpq_t rhs, tmp, fac
    mpq_init(rhs)
    mpq_init(tmp)
    mpq_init(fac)
    cdef bint have_e
    cdef __mpq_struct *ck
    cdef __mpq_struct *prev
    cdef __mpq_struct *u0 = &u[0]

    # unperturbed Hermite-type polynomial with leading x^N coefficient 1
    mpq_set_si(&u0[N], 1, 1)
    j = N - 2
    while j >= 0:
        mpq_set_si(fac, (j + 2) * (j + 1), 2)
        mpq_mul(tmp, fac, &u0[j + 2])
        mpq_set_si(fac, j - N, 1)
        mpq_div(&u0[j], tmp, fac)
        j -= 2
    mpq_set_si(&e[0], 2 * N + 1, 2)

    for k in range(1, K + 1):
        prev = &u[off[k - 1]]
        ck = &u[off[k]]
        top = 3 * k + N
        ptop = top - 3
        have_e = False
        j = top
        while j >= 0:
            mpq_set_si(rhs, 0, 1)
            if 0 <= j - 3 <= ptop:
                mpq_sub(rhs, rhs, &prev[j - 3])
            m = 2
            while m < k:
                if j <= 3 * (k - m) + N and mpq_sgn(&e[m]) != 0:
                    mpq_mul(tmp, &e[m], &u[off[k - m] + j])
                    mpq_add(rhs, rhs, tmp)
                m += 2
            if j == N:
                if N >= 3:
                    mpq_set(&e[k], &prev[N - 3])
                if N + 2 <= top:
                    mpq_set_si(fac, (N + 2) * (N + 1), 2)
                    mpq_mul(tmp, fac, &ck[N + 2])
                    mpq_sub(&e[k], &e[k], tmp)
                have_e = True
            else:
                if have_e and j <= N:
                    mpq_mul(tmp, &e[k], &u0[j])
                    mpq_add(rhs, rhs, tmp)
                if j + 2 <= top:
                    mpq_set_si(fac, (j + 2) * (j + 1), 2)
                    mpq_mul(tmp, fac, &ck[j + 2])
                    mpq_add(rhs, rhs, tmp)
                mpq_set_si(fac, j - N, 1)
                mpq_div(&ck[j], rhs, fac)
            j -= 2

    result = []
    for k in range(K + 1):
        result.append(GMPy_MPQ_From_mpq(&e[k]))

    mpq_clear(rhs)
    mpq_clear(tmp)
    mpq_clear(fac)
    for i in range(total):
        mpq_clear(&u[i])
    for k in range(K + 1):
        mpq_clear(&e[k])
    PyMem_Free(u)
    PyMem_Free(e)
    PyMem_Free(off)
    return result


def horner_rows(list rows, x, long prec):
    """Evaluate every row of a triangular coefficient table at the real point x.

    ``rows[L]`` holds mpfr coefficients of x^0..x^L; values come back as mpfr
    with ``prec`` bits.
    """
    cdef mpfr_t acc
    mpfr_init2(acc, prec)
    cdef list out = []
    cdef list row
    cdef Py_ssize_t L, m
    cdef mpfr xv
    cdef mpfr res
    if not MPFR_Check(x):
        mpfr_clear(acc)
        raise TypeError("x must be a gmpy2 mpfr")
    xv = <mpfr> x
    for L in range(len(rows)):
        row = rows[L]
        mpfr_set(acc, (<mpfr?> row[len(row) - 1]).f, MPFR_RNDN)
        for m in range(len(row) - 2, -1, -1):
            mpfr_fma(acc, acc, xv.f, (<mpfr?> row[m]).f, MPFR_RNDN)
        res = GMPy_MPFR_New(prec, NULL)
        mpfr_set(res.f, acc, MPFR_RNDN)
        out.append(res)
    mpfr_clear(acc)
    return out
