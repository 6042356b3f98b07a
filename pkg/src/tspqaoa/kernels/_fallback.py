"""Numpy implementations of the kernel set.

Every function works on its argument in place (where it returns nothing)
and accepts the same inputs as the compiled versions in ``_core.pyx``.
The subset transforms also accept ``object`` arrays of Python ints, which
is how callers get exact arithmetic beyond the int64 range.
"""
import numpy as np


def _nbits(size):
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"length {size} is not a power of two")
    return n


def _halves(a, q):
    """View ``a`` as (high, bit q, low) so axis 1 indexes bit ``q``."""
    return a.reshape(-1, 2, 1 << q)


def zeta_int64(a):
    for q in range(_nbits(a.shape[0])):
        v = _halves(a, q)
        v[:, 1, :] += v[:, 0, :]


def mobius_int64(a):
    for q in range(_nbits(a.shape[0])):
        v = _halves(a, q)
        v[:, 1, :] -= v[:, 0, :]


def walsh_int64(a):
    for q in range(_nbits(a.shape[0])):
        v = _halves(a, q)
        lo = v[:, 0, :].copy()
        v[:, 0, :] += v[:, 1, :]
        v[:, 1, :] = lo - v[:, 1, :]


def apply_phase(psi, energies, gamma):
    if energies.shape[0] != psi.shape[0]:
        raise ValueError("dimension mismatch")
    psi *= np.exp(-1j * gamma * energies)


def apply_mixer(psi, beta):
    c, s = np.cos(beta), np.sin(beta)
    for q in range(_nbits(psi.shape[0])):
        v = _halves(psi, q)
        a = v[:, 0, :].copy()
        b = v[:, 1, :]
        v[:, 0, :] = c * a - 1j * s * b
        v[:, 1, :] = -1j * s * a + c * b


def expectation(psi, energies):
    if energies.shape[0] != psi.shape[0]:
        raise ValueError("dimension mismatch")
    return float(np.dot(psi.real**2 + psi.imag**2, energies))


def held_karp(W):
    n = W.shape[0]
    if n < 2:
        raise ValueError("need at least two cities")
    if n == 2:
        return float(W[0, 1] + W[1, 0]), [0, 1]
    m = n - 1
    full = (1 << m) - 1
    sub = W[1:, 1:]
    dp = np.full((full + 1, m), np.inf)
    par = np.full((full + 1, m), -1, dtype=np.int8)
    for j in range(m):
        dp[1 << j, j] = W[0, j + 1]

    masks = np.arange(full + 1)
    popcount = np.zeros(full + 1, dtype=np.int64)
    for j in range(m):
        popcount += (masks >> j) & 1
    # Layers by subset size: every predecessor state has one fewer city.
    for size in range(2, m + 1):
        layer = masks[popcount == size]
        for j in range(m):
            sel = layer[(layer >> j) & 1 == 1]
            prev = sel ^ (1 << j)
            cand = dp[prev] + sub[:, j]
            best = np.argmin(cand, axis=1)
            dp[sel, j] = cand[np.arange(sel.size), best]
            par[sel, j] = best
    closing = dp[full] + W[1:, 0]
    last = int(np.argmin(closing))
    length = float(closing[last])
    tour = []
    mask, j = full, last
    while j >= 0:
        tour.append(j + 1)
        i = int(par[mask, j])
        mask ^= 1 << j
        j = i if mask else -1
    tour.append(0)
    tour.reverse()
    return length, tour
