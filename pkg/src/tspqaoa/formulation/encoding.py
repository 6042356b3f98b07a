"""Qubit layouts for the two encodings and bitstring <-> tour conversion.

City 0 is fixed at time step 0, so only steps ``1 .. n-1`` carry qubits.

* compact: step ``t`` owns ``k = ceil(log2 n)`` qubits starting at
  ``(t - 1) * k``; bit ``b`` of the block is bit ``b`` of the city number.
* one-hot: qubit ``(t - 1) * (n - 1) + (c - 1)`` is set when city ``c``
  (``1 .. n-1``) is visited at step ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from .polynomial import bits_to_index

COMPACT = "compact"
ONEHOT = "onehot"
ENCODINGS = (COMPACT, ONEHOT)


def bits_per_step(n: int) -> int:
    return max(1, (n - 1).bit_length())


@dataclass(frozen=True)
class EncodingScheme:
    kind: Literal["compact", "onehot"]
    n: int

    def __post_init__(self):
        if self.kind not in ENCODINGS:
            raise ValueError(f"unknown encoding {self.kind!r}")
        if self.n < 2:
            raise ValueError("n must be at least 2")

    @property
    def k(self) -> int:
        return bits_per_step(self.n) if self.kind == COMPACT else self.n

    @property
    def steps(self) -> int:
        return self.n - 1

    @property
    def qubit_count(self) -> int:
        return qubit_count(self)

    def compact_var(self, t: int, b: int) -> int:
        return (t - 1) * self.k + b

    def onehot_var(self, city: int, t: int) -> int:
        return (t - 1) * (self.n - 1) + (city - 1)


def qubit_count(scheme: EncodingScheme) -> int:
    if scheme.kind == COMPACT:
        return (scheme.n - 1) * bits_per_step(scheme.n)
    return (scheme.n - 1) ** 2


@dataclass(frozen=True)
class Decoded:
    tour: tuple[int, ...] | None
    reason: str | None = None

    @property
    def valid(self) -> bool:
        return self.tour is not None

    def __bool__(self):
        return self.valid


def decode_assignment(bits, scheme: EncodingScheme) -> Decoded:
    """Read a basis state (index or bit sequence) back as a tour."""
    z = bits_to_index(bits, scheme.qubit_count)
    n = scheme.n
    cities = []
    if scheme.kind == COMPACT:
        k = scheme.k
        for t in range(1, n):
            code = z >> ((t - 1) * k) & ((1 << k) - 1)
            if code >= n:
                return Decoded(None, f"invalid code {code} at step {t}")
            cities.append(code)
    else:
        m = n - 1
        for t in range(1, n):
            column = z >> ((t - 1) * m) & ((1 << m) - 1)
            if bin(column).count("1") != 1:
                return Decoded(None, f"step {t} has {bin(column).count('1')} cities set, expected 1")
            cities.append(column.bit_length())
    seen = {0}
    for t, c in enumerate(cities, start=1):
        if c in seen:
            return Decoded(None, f"city {c} repeated at step {t}")
        seen.add(c)
    return Decoded((0, *cities))


def encode_tour(tour, scheme: EncodingScheme) -> int:
    """Basis index of a tour starting at city 0."""
    tour = tuple(tour)
    if len(tour) != scheme.n or tour[0] != 0 or sorted(tour) != list(range(scheme.n)):
        raise ValueError(f"{tour} is not a tour of {scheme.n} cities starting at 0")
    z = 0
    for t, c in enumerate(tour[1:], start=1):
        if scheme.kind == COMPACT:
            z |= c << ((t - 1) * scheme.k)
        else:
            z |= 1 << scheme.onehot_var(c, t)
    return z
