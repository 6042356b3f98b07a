# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops. Signatures mirror ``tspqaoa.kernels._fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, INFINITY

cnp.import_array()


def _nbits(Py_ssize_t size):
    cdef int n = 0
    while (<Py_ssize_t>1 << n) < size:
        n += 1
    if (<Py_ssize_t>1 << n) != size:
        raise ValueError("length %d is not a power of two" % size)
    return n


def zeta_int64(cnp.int64_t[::1] a):
    """In-place subset sum: a[S] <- sum over T subset of S of a[T]."""
    cdef Py_ssize_t size = a.shape[0], i, bit
    _nbits(size)
    with nogil:
        bit = 1
        while bit < size:
            for i in range(size):
                if i & bit:
                    a[i] += a[i ^ bit]
            bit <<= 1


def mobius_int64(cnp.int64_t[::1] a):
    """In-place inverse of :func:`zeta_int64`."""
    cdef Py_ssize_t size = a.shape[0], i, bit
    _nbits(size)
    with nogil:
        bit = 1
        while bit < size:
            for i in range(size):
                if i & bit:
                    a[i] -= a[i ^ bit]
            bit <<= 1


def walsh_int64(cnp.int64_t[::1] a):
    """In-place unnormalised Walsh-Hadamard transform."""
    cdef Py_ssize_t size = a.shape[0], i, bit
    cdef cnp.int64_t u, v
    _nbits(size)
    with nogil:
        bit = 1
        while bit < size:
            for i in range(size):
                if not (i & bit):
                    u = a[i]
                    v = a[i | bit]
                    a[i] = u + v
                    a[i | bit] = u - v
            bit <<= 1


def apply_phase(double complex[::1] psi, const double[::1] energies, double gamma):
    cdef Py_ssize_t i, size = psi.shape[0]
    cdef double th
    if energies.shape[0] != size:
        raise ValueError("dimension mismatch")
    with nogil:
        for i in range(size):
            th = -gamma * energies[i]
            psi[i] = psi[i] * (cos(th) + 1j * sin(th))


def apply_mixer(double complex[::1] psi, double beta):
    cdef Py_ssize_t size = psi.shape[0], i, bit
    cdef double c = cos(beta), s = sin(beta)
    cdef double complex a, b, mis = -1j * s
    _nbits(size)
    with nogil:
        bit = 1
        while bit < size:
            for i in range(size):
                if not (i & bit):
                    a = psi[i]
                    b = psi[i | bit]
                    psi[i] = c * a + mis * b
                    psi[i | bit] = mis * a + c * b
            bit <<= 1


def expectation(const double complex[::1] psi, const double[::1] energies):
    cdef Py_ssize_t i, size = psi.shape[0]
    cdef double acc = 0.0
    if energies.shape[0] != size:
        raise ValueError("dimension mismatch")
    with nogil:
        for i in range(size):
            acc += (psi[i].real * psi[i].real + psi[i].imag * psi[i].imag) * energies[i]
    return acc


def held_karp(const double[:, ::1] W):
    """Exact closed-tour DP with city 0 fixed as the start.

    Returns ``(length, tour)`` where ``tour`` lists cities starting at 0.
    """
    cdef Py_ssize_t n = W.shape[0]
    if n < 2:
        raise ValueError("need at least two cities")
    if n == 2:
        return W[0, 1] + W[1, 0], [0, 1]
    cdef Py_ssize_t m = n - 1
    cdef Py_ssize_t full = (<Py_ssize_t>1 << m) - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=2] dp_arr = np.full((full + 1, m), np.inf)
    cdef cnp.ndarray[cnp.int8_t, ndim=2] par_arr = np.full((full + 1, m), -1, dtype=np.int8)
    cdef double[:, ::1] dp = dp_arr
    cdef cnp.int8_t[:, ::1] par = par_arr
    cdef Py_ssize_t mask, j, i, prev
    cdef double best, cand
    with nogil:
        for j in range(m):
            dp[<Py_ssize_t>1 << j, j] = W[0, j + 1]
        for mask in range(1, full + 1):
            for j in range(m):
                if not (mask >> j) & 1:
                    continue
                prev = mask ^ (<Py_ssize_t>1 << j)
                if prev == 0:
                    continue
                best = INFINITY
                for i in range(m):
                    if (prev >> i) & 1:
                        cand = dp[prev, i] + W[i + 1, j + 1]
                        if cand < best:
                            best = cand
                            par[mask, j] = <cnp.int8_t>i
                dp[mask, j] = best
    best = INFINITY
    cdef Py_ssize_t last = -1
    for j in range(m):
        cand = dp[full, j] + W[j + 1, 0]
        if cand < best:
            best = cand
            last = j
    tour = []
    mask = full
    j = last
    while j >= 0:
        tour.append(j + 1)
        i = par[mask, j]
        mask ^= <Py_ssize_t>1 << j
        j = i if mask else -1
    tour.append(0)
    tour.reverse()
    return best, tour
