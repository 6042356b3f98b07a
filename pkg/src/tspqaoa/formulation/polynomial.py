"""Multilinear pseudo-Boolean polynomials with exact rational coefficients.

Variable ``i`` corresponds to bit ``1 << i`` of both a term mask and a
basis-state index. Coefficients are :class:`fractions.Fraction`: penalty
terms are orders of magnitude larger than distances and cancel against
each other, so float coefficients would leave rounding residue in the
energies and spurious near-zero Pauli terms in the gate counts. Dense
tables are produced by exact integer transforms and rounded once, so
every table entry is the correctly rounded value of the polynomial.
"""
from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .. import kernels
from ..kernels import _fallback

MAX_TABLE_QUBITS = 26
MAX_DIRECT_QUBITS = 14


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"non-finite coefficient {value!r}")
    return Fraction(value)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _submasks(mask: int):
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


class BinaryPolynomial:
    """Sparse multilinear polynomial ``sum_S a_S prod_{i in S} x_i``."""

    def __init__(self, num_vars: int, terms: Mapping[int, object] | None = None):
        if num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        self.num_vars = num_vars
        self.terms: dict[int, Fraction] = {}
        for mask, coeff in (terms or {}).items():
            self.add_term(mask, coeff)

    @classmethod
    def constant(cls, num_vars: int, value) -> "BinaryPolynomial":
        return cls(num_vars, {0: value})

    @classmethod
    def variable(cls, num_vars: int, index: int) -> "BinaryPolynomial":
        return cls(num_vars, {1 << index: 1})

    def add_term(self, mask: int, coeff) -> None:
        mask = int(mask)
        if mask < 0 or mask >> self.num_vars:
            raise ValueError(f"mask {mask:#x} outside {self.num_vars} variables")
        c = self.terms.get(mask, Fraction(0)) + _as_fraction(coeff)
        if c:
            self.terms[mask] = c
        else:
            self.terms.pop(mask, None)

    def copy(self) -> "BinaryPolynomial":
        out = BinaryPolynomial(self.num_vars)
        out.terms = dict(self.terms)
        return out

    def _check_compatible(self, other):
        if other.num_vars != self.num_vars:
            raise ValueError("polynomials have different variable counts")

    def __add__(self, other):
        if not isinstance(other, BinaryPolynomial):
            return self + BinaryPolynomial.constant(self.num_vars, other)
        self._check_compatible(other)
        out = self.copy()
        for mask, c in other.terms.items():
            out.add_term(mask, c)
        return out

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BinaryPolynomial):
            k = _as_fraction(other)
            return BinaryPolynomial(self.num_vars, {m: c * k for m, c in self.terms.items()})
        self._check_compatible(other)
        out = BinaryPolynomial(self.num_vars)
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                out.add_term(m1 | m2, c1 * c2)  # x*x = x on 0/1 values
        return out

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        out = BinaryPolynomial.constant(self.num_vars, 1)
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, BinaryPolynomial):
            return NotImplemented
        return self.num_vars == other.num_vars and self.terms == other.terms

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"BinaryPolynomial(num_vars={self.num_vars}, terms={len(self.terms)})"

    @property
    def degree(self) -> int:
        return max((_popcount(m) for m in self.terms), default=0)

    def coefficient(self, mask: int) -> Fraction:
        return self.terms.get(mask, Fraction(0))

    def embed(self, num_vars: int, var_map: Sequence[int]) -> "BinaryPolynomial":
        """Relabel local variable ``i`` as ``var_map[i]`` in a larger space."""
        out = BinaryPolynomial(num_vars)
        for mask, c in self.terms.items():
            g = 0
            for i, v in enumerate(var_map):
                if mask >> i & 1:
                    g |= 1 << v
            out.add_term(g, c)
        return out

    def evaluate(self, bits) -> Fraction:
        """Exact value at a 0/1 assignment (basis index or bit sequence)."""
        z = bits_to_index(bits, self.num_vars)
        return sum((c for m, c in self.terms.items() if m & z == m), Fraction(0))


@dataclass(frozen=True)
class PauliPolynomial:
    """Sum of Pauli-Z strings: ``sum_T c_T prod_{i in T} Z_i``."""

    num_qubits: int
    terms: dict = field(default_factory=dict)

    def evaluate(self, bits) -> Fraction:
        z = bits_to_index(bits, self.num_qubits)
        return sum(
            (c if _popcount(z & m) % 2 == 0 else -c for m, c in self.terms.items()),
            Fraction(0),
        )

    def spectrum(self) -> "EnergyTable":
        """Diagonal of the operator, one entry per basis state."""
        _check_table_size(self.num_qubits)
        return EnergyTable(_exact_dense(self.terms, self.num_qubits, "walsh"))


@dataclass(frozen=True, eq=False)
class EnergyTable:
    """Dense diagonal of a problem Hamiltonian, indexed by basis state."""

    energies: np.ndarray

    def __post_init__(self):
        e = np.array(self.energies, dtype=np.float64)
        size = e.shape[0]
        if e.ndim != 1 or size == 0 or size & (size - 1):
            raise ValueError("energy table length must be a power of two")
        if not np.all(np.isfinite(e)):
            raise ValueError("energy table has non-finite entries")
        e.setflags(write=False)
        object.__setattr__(self, "energies", e)

    @property
    def num_qubits(self) -> int:
        return self.energies.shape[0].bit_length() - 1

    def __len__(self):
        return self.energies.shape[0]

    def __getitem__(self, z):
        return self.energies[z]

    def __array__(self, dtype=None, copy=None):
        return self.energies if dtype is None else self.energies.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, EnergyTable):
            return NotImplemented
        return np.array_equal(self.energies, other.energies)


def bits_to_index(bits, num_vars: int) -> int:
    """Accept a basis index or a 0/1 sequence (entry ``i`` is variable ``i``)."""
    if isinstance(bits, (int, np.integer)):
        z = int(bits)
        if z < 0 or z >> num_vars:
            raise ValueError(f"basis index {z} outside {num_vars} variables")
        return z
    bits = list(bits)
    if len(bits) != num_vars:
        raise ValueError(f"expected {num_vars} bits, got {len(bits)}")
    z = 0
    for i, b in enumerate(bits):
        if b not in (0, 1):
            raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
        z |= int(b) << i
    return z


# ---------------------------------------------------------------------------
# Exact dense transforms
# ---------------------------------------------------------------------------

_LIMB = 31
_SAFE = 1 << 53


def _common_denominator(values) -> int:
    d = 1
    for v in values:
        d = d * v.denominator // math.gcd(d, v.denominator)
    return d


def _exact_dense(terms: Mapping[int, Fraction], nbits: int, transform: str) -> np.ndarray:
    """Apply a +/-1 subset transform to sparse exact data, round once.

    ``transform`` is ``"zeta"`` (subset sums, i.e. polynomial evaluation)
    or ``"walsh"`` (Z-string evaluation). Both have entries of absolute
    value at most the sum of absolute inputs, which bounds the integer
    width needed.
    """
    size = 1 << nbits
    D = _common_denominator(terms.values())
    nums = {m: int(c * D) for m, c in terms.items()}
    bound = sum(abs(v) for v in nums.values())
    shift = D.bit_length() - 1
    pow2 = D == 1 << shift
    name = "zeta_int64" if transform == "zeta" else "walsh_int64"

    def run(values, dtype):
        arr = np.zeros(size, dtype=dtype)
        for m, v in values.items():
            arr[m] = v
        kern = getattr(kernels if dtype is np.int64 else _fallback, name)
        kern(arr)
        return arr

    if pow2 and bound < 1 << 62:
        # int64 -> float64 rounds to nearest; the power-of-two scale is exact.
        return np.ldexp(run(nums, np.int64).astype(np.float64), -shift)
    if pow2:
        hi = {m: v >> _LIMB for m, v in nums.items()}
        lo = {m: v & ((1 << _LIMB) - 1) for m, v in nums.items()}
        if sum(abs(v) for v in hi.values()) < _SAFE and sum(lo.values()) < _SAFE:
            # Both parts are exact floats, so their sum is rounded once.
            h = np.ldexp(run(hi, np.int64).astype(np.float64), _LIMB - shift)
            l = np.ldexp(run(lo, np.int64).astype(np.float64), -shift)
            return h + l
    arr = run(nums, object)
    return np.array([v / D for v in arr], dtype=np.float64)


def _check_table_size(n: int):
    if n > MAX_TABLE_QUBITS:
        raise ValueError(f"dense tables limited to {MAX_TABLE_QUBITS} qubits, got {n}")


def energy_table(poly: BinaryPolynomial, num_qubits: int | None = None,
                 method: str = "zeta") -> EnergyTable:
    """Evaluate ``poly`` on every basis state.

    ``method="zeta"`` uses the fast subset-sum transform; ``"direct"``
    sums the contained terms per entry and is only meant as a check.
    """
    N = poly.num_vars if num_qubits is None else num_qubits
    if N != poly.num_vars:
        raise ValueError(f"table size {N} does not match {poly.num_vars} variables")
    _check_table_size(N)
    if method == "zeta":
        return EnergyTable(_exact_dense(poly.terms, N, "zeta"))
    if method == "direct":
        if N > MAX_DIRECT_QUBITS:
            raise ValueError(f"direct evaluation limited to {MAX_DIRECT_QUBITS} qubits")
        return EnergyTable(np.array([float(poly.evaluate(z)) for z in range(1 << N)]))
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Coefficients from function values
# ---------------------------------------------------------------------------

def subset_order(nvars: int) -> list[int]:
    """Masks ordered by subset size, ties broken by mask value."""
    return sorted(range(1 << nvars), key=lambda m: (_popcount(m), m))


def evaluation_matrix(nvars: int) -> np.ndarray:
    """Row ``r``, column ``c``: monomial ``c`` evaluated at indicator ``r``.

    Rows and columns both follow :func:`subset_order`, which makes the
    matrix lower triangular with a unit diagonal.
    """
    order = subset_order(nvars)
    rows = np.array(order)[:, None]
    cols = np.array(order)[None, :]
    return ((rows & cols) == cols).astype(np.int64)


@lru_cache(maxsize=None)
def _lower_structure(nvars: int):
    order = subset_order(nvars)
    E = evaluation_matrix(nvars)
    below = [tuple(int(c) for c in np.flatnonzero(E[r, :r])) for r in range(len(order))]
    return order, below


def _rhs_vector(rhs, nvars: int) -> list[Fraction]:
    """Normalise rhs to a list indexed by the concatenated input mask.

    ``rhs`` may be a sequence indexed by mask or a mapping keyed by mask or
    by ``(x_i, x_j)`` code pairs (each code holding ``nvars // 2`` bits).
    """
    size = 1 << nvars
    if isinstance(rhs, Mapping):
        k = nvars // 2
        values = [None] * size
        for key, v in rhs.items():
            if isinstance(key, tuple):
                a, b = key
                if not (0 <= a < 1 << k and 0 <= b < 1 << k):
                    raise ValueError(f"rhs key {key} out of range")
                key = a | b << k
            values[int(key)] = v
        missing = [m for m, v in enumerate(values) if v is None]
        if missing:
            raise ValueError(f"incomplete rhs: {len(missing)} of {size} inputs missing")
    else:
        values = list(rhs)
        if len(values) != size:
            raise ValueError(f"incomplete rhs: expected {size} values, got {len(values)}")
    return [_as_fraction(v) for v in values]


def solve_pair_coefficients(rhs, k: int) -> BinaryPolynomial:
    """Solve for the 2^(2k) coefficients by forward substitution.

    Rows of the evaluation matrix are taken in subset-size order, so row
    ``M`` only involves coefficients of subsets of ``M`` and each step
    isolates one new coefficient.
    """
    return solve_triangular(rhs, 2 * k)


def solve_triangular(rhs, nvars: int) -> BinaryPolynomial:
    values = _rhs_vector(rhs, nvars)
    order, below = _lower_structure(nvars)
    D = _common_denominator(values)
    nums = [int(v * D) for v in values]
    coef = [0] * len(order)
    for r, mask in enumerate(order):
        coef[r] = nums[mask] - sum(coef[c] for c in below[r])
    return BinaryPolynomial(nvars, {order[r]: Fraction(c, D) for r, c in enumerate(coef) if c})


def mobius_pair_coefficients(rhs, k: int) -> BinaryPolynomial:
    """Same result as :func:`solve_pair_coefficients` in O(4^k k) steps."""
    return mobius_transform(rhs, 2 * k)


def mobius_transform(rhs, nvars: int) -> BinaryPolynomial:
    values = _rhs_vector(rhs, nvars)
    D = _common_denominator(values)
    nums = [int(v * D) for v in values]
    # Mobius outputs are bounded by the sum of absolute inputs.
    if sum(abs(v) for v in nums) < 1 << 62:
        arr = np.array(nums, dtype=np.int64)
        kernels.mobius_int64(arr)
    else:
        arr = np.array(nums, dtype=object)
        _fallback.mobius_int64(arr)
    return BinaryPolynomial(nvars, {m: Fraction(int(c), D) for m, c in enumerate(arr) if c})


# ---------------------------------------------------------------------------
# Pauli form and gate counts
# ---------------------------------------------------------------------------

def pauli_expand(poly: BinaryPolynomial) -> PauliPolynomial:
    """Substitute ``x_i = (1 - Z_i) / 2`` and collect Z-strings.

    A term ``a_S x_S`` contributes ``a_S (-1)^|T| / 2^|S|`` to every
    ``T`` contained in ``S``.
    """
    if not poly.terms:
        return PauliPolynomial(poly.num_vars, {})
    D = _common_denominator(poly.terms.values())
    top = poly.degree
    acc: dict[int, int] = {}
    for S, c in poly.terms.items():
        v = int(c * D) << (top - _popcount(S))
        for T in _submasks(S):
            acc[T] = acc.get(T, 0) + (-v if _popcount(T) & 1 else v)
    scale = D << top
    return PauliPolynomial(poly.num_vars, {T: Fraction(v, scale) for T, v in acc.items() if v})


@dataclass(frozen=True)
class GateCounts:
    rotations: int
    two_qubit: int
    weight_histogram: dict

    def as_dict(self) -> dict:
        return {
            "rotations": self.rotations,
            "two_qubit": self.two_qubit,
            "weight_histogram": {str(w): c for w, c in sorted(self.weight_histogram.items())},
        }


def gate_count(pp: PauliPolynomial) -> GateCounts:
    """Cost of exp(-i theta H) compiled term by term with CNOT ladders.

    A weight-``w`` Z-string needs one Z rotation and ``2 (w - 1)`` CNOTs;
    the identity term is a global phase and costs nothing.
    """
    hist: dict[int, int] = {}
    for T, c in pp.terms.items():
        w = _popcount(T)
        if c and w:
            hist[w] = hist.get(w, 0) + 1
    return GateCounts(
        rotations=sum(hist.values()),
        two_qubit=sum(2 * (w - 1) * cnt for w, cnt in hist.items()),
        weight_histogram=hist,
    )


# ---------------------------------------------------------------------------
# Text formats
# ---------------------------------------------------------------------------

def _format_coeff(c: Fraction) -> str:
    f = float(c)
    return repr(f) if Fraction(f) == c else f"{c.numerator}/{c.denominator}"


def _parse_coeff(s: str) -> Fraction:
    return Fraction(s) if "/" in s else Fraction(float(s))


def _format_mask(mask: int) -> str:
    idx = [str(i) for i in range(mask.bit_length()) if mask >> i & 1]
    return ",".join(idx) if idx else "-"


def _parse_mask(s: str) -> int:
    if s == "-":
        return 0
    mask = 0
    for tok in s.split(","):
        i = int(tok)
        if i < 0 or mask >> i & 1:
            raise ValueError(f"bad variable index {tok!r}")
        mask |= 1 << i
    return mask


def dumps_polynomial(poly) -> str:
    """Text form: a header, then one ``indices coefficient`` line per term.

    Indices are comma-separated and sorted; ``-`` marks the constant term.
    Coefficients are written as a float when exact, otherwise ``p/q``.
    """
    if isinstance(poly, PauliPolynomial):
        head = f"# pauli-polynomial num_qubits={poly.num_qubits}"
    else:
        head = f"# binary-polynomial num_vars={poly.num_vars}"
    lines = [head]
    for mask in sorted(poly.terms, key=lambda m: (_popcount(m), m)):
        lines.append(f"{_format_mask(mask)} {_format_coeff(poly.terms[mask])}")
    return "\n".join(lines) + "\n"


def loads_polynomial(text: str):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing polynomial header line")
    head = lines[0][1:].split()
    if len(head) != 2 or "=" not in head[1]:
        raise ValueError(f"malformed header {lines[0]!r}")
    kind, (_, count) = head[0], head[1].split("=", 1)
    size = int(count)
    terms = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'indices coefficient'")
        try:
            mask, c = _parse_mask(parts[0]), _parse_coeff(parts[1])
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if mask >> size:
            raise ValueError(f"line {lineno}: index beyond {size} variables")
        terms[mask] = terms.get(mask, Fraction(0)) + c
    if kind == "binary-polynomial":
        return BinaryPolynomial(size, terms)
    if kind == "pauli-polynomial":
        return PauliPolynomial(size, {m: c for m, c in terms.items() if c})
    raise ValueError(f"unknown polynomial kind {kind!r}")


def save_polynomial(poly, path) -> None:
    Path(path).write_text(dumps_polynomial(poly))


def load_polynomial(path):
    return loads_polynomial(Path(path).read_text())
