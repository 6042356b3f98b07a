"""Energy functions whose minima are optimal tours, for both encodings.

Valid assignments always evaluate to the exact closed-tour length (scaled
by ``B`` in the one-hot case); every invalid assignment pays at least one
penalty larger than any tour.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..instances import TspInstance
from .encoding import COMPACT, ONEHOT, EncodingScheme
from .polynomial import BinaryPolynomial, mobius_transform, solve_pair_coefficients


def _max_w(inst: TspInstance) -> float:
    return float(inst.W.max())


@dataclass(frozen=True)
class OneHotConfig:
    A: float | None = None  # None: 2 * B * n * max(W)
    B: float = 1.0

    def resolve(self, inst: TspInstance) -> "OneHotConfig":
        if not self.B > 0:
            raise ValueError("B must be positive")
        A = self.A
        if A is None:
            A = 2 * self.B * inst.n * _max_w(inst) or 1.0
        if not A > 0:
            raise ValueError("A must be positive")
        if not A > self.B * _max_w(inst):
            raise ValueError(f"A={A} must exceed B*max(W)={self.B * _max_w(inst)}")
        return OneHotConfig(A=float(A), B=float(self.B))


@dataclass(frozen=True)
class CompactConfig:
    P: float | None = None  # None: 2 * n * max(W)
    solver: str = "triangular"  # or "mobius"; both are exact

    def resolve(self, inst: TspInstance) -> "CompactConfig":
        P = self.P
        if P is None:
            P = 2 * inst.n * _max_w(inst) or 1.0
        bound = inst.n * _max_w(inst)
        if not P > bound:
            raise ValueError(f"penalty P={P} must exceed n*max(W)={bound}")
        if self.solver not in ("triangular", "mobius"):
            raise ValueError(f"unknown solver {self.solver!r}")
        return CompactConfig(P=float(P), solver=self.solver)


def build_onehot_energy(inst: TspInstance, cfg: OneHotConfig | None = None) -> BinaryPolynomial:
    """Quadratic penalty formulation over the (n-1) x (n-1) free grid.

    Each free city must appear once and each free step must hold one city.
    Route terms price consecutive free steps plus the two edges joining
    the tour to the fixed city 0.
    """
    cfg = (cfg or OneHotConfig()).resolve(inst)
    n = inst.n
    scheme = EncodingScheme(ONEHOT, n)
    N = scheme.qubit_count
    A, B = Fraction(cfg.A), Fraction(cfg.B)
    W = inst.W
    cities = steps = range(1, n)

    def x(c, t):
        return BinaryPolynomial.variable(N, scheme.onehot_var(c, t))

    energy = BinaryPolynomial(N)
    for c in cities:
        energy += A * (1 - sum((x(c, t) for t in steps), BinaryPolynomial(N))) ** 2
    for t in steps:
        energy += A * (1 - sum((x(c, t) for c in cities), BinaryPolynomial(N))) ** 2

    for t in range(1, n - 1):
        for u in cities:
            for v in cities:
                if u != v:
                    energy.add_term(
                        1 << scheme.onehot_var(u, t) | 1 << scheme.onehot_var(v, t + 1),
                        B * Fraction(W[u][v]),
                    )
    for c in cities:
        energy.add_term(1 << scheme.onehot_var(c, 1), B * Fraction(W[0][c]))
        energy.add_term(1 << scheme.onehot_var(c, n - 1), B * Fraction(W[c][0]))
    return energy


def pair_rhs(inst: TspInstance, P: float, i: int, j: int) -> list[float]:
    """Target energies of the (step i, step j) block pair, indexed by
    ``code_i | code_j << k``.

    Equal codes cost ``P``; unequal codes cost ``W[u][v]`` on adjacent
    steps and nothing otherwise. Codes that name no city get 0 here and
    are penalised by the unary term instead.
    """
    n = inst.n
    k = EncodingScheme(COMPACT, n).k
    rhs = []
    for y in range(1 << 2 * k):
        a, b = y & ((1 << k) - 1), y >> k
        if a == b:
            rhs.append(P)
        elif j == i + 1 and a < n and b < n:
            rhs.append(float(inst.W[a][b]))
        else:
            rhs.append(0.0)
    return rhs


def unary_rhs(inst: TspInstance, P: float, t: int) -> list[Fraction]:
    """Target energy of step ``t`` on its own.

    City 0 sits at step 0 as a constant block; pairing it with step ``t``
    leaves a penalty on code 0 and, on the first and last step, the edge
    to or from city 0. Codes ``>= n`` are penalised as invalid.
    """
    n = inst.n
    k = EncodingScheme(COMPACT, n).k
    rhs = []
    for code in range(1 << k):
        if code == 0 or code >= n:
            rhs.append(Fraction(P))
            continue
        e = Fraction(0)
        if t == 1:
            e += Fraction(inst.W[0][code])
        if t == n - 1:
            e += Fraction(inst.W[code][0])
        rhs.append(e)
    return rhs


def build_compact_energy(inst: TspInstance, cfg: CompactConfig | None = None) -> BinaryPolynomial:
    """Binary-code formulation: one pairwise polynomial per pair of steps.

    Each pair polynomial is the unique multilinear interpolant of
    :func:`pair_rhs` over the two blocks' ``2k`` bits.
    """
    cfg = (cfg or CompactConfig()).resolve(inst)
    n = inst.n
    scheme = EncodingScheme(COMPACT, n)
    k, N = scheme.k, scheme.qubit_count
    solve = solve_pair_coefficients if cfg.solver == "triangular" else _mobius_pair

    energy = BinaryPolynomial(N)
    for t in range(1, n):
        block = [scheme.compact_var(t, b) for b in range(k)]
        energy += mobius_transform(unary_rhs(inst, cfg.P, t), k).embed(N, block)
    for i in range(1, n):
        for j in range(i + 1, n):
            local = solve(pair_rhs(inst, cfg.P, i, j), k)
            var_map = [scheme.compact_var(i, b) for b in range(k)]
            var_map += [scheme.compact_var(j, b) for b in range(k)]
            energy += local.embed(N, var_map)
    return energy


def _mobius_pair(rhs, k):
    return mobius_transform(rhs, 2 * k)


def build_energy(inst: TspInstance, encoding: str, penalty: float | None = None) -> BinaryPolynomial:
    """Build either encoding; ``penalty`` is ``P`` (compact) or ``A`` (one-hot)."""
    if encoding == COMPACT:
        return build_compact_energy(inst, CompactConfig(P=penalty))
    if encoding == ONEHOT:
        return build_onehot_energy(inst, OneHotConfig(A=penalty))
    raise ValueError(f"unknown encoding {encoding!r}")
