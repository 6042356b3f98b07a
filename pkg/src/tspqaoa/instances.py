"""TSP instances: generation, file I/O and exact classical solvers.

Cities are numbered from 0 and city 0 is the fixed start of every tour.
Tour lengths are summed with :func:`math.fsum`, so a length is the
correctly rounded value of the exact sum of its edges regardless of the
order in which the edges are visited.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import kernels

MAX_ENUMERATION_CITIES = 12
MAX_HELD_KARP_CITIES = 20


class InstanceFormatError(ValueError):
    """Raised when an instance file is malformed."""


@dataclass(frozen=True)
class GenConfig:
    plane_size: float = 100.0
    sigma_squared: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if not self.plane_size > 0:
            raise ValueError("plane_size must be positive")
        if not self.sigma_squared > 0:
            raise ValueError("sigma_squared must be positive")

    def quadrant_centres(self) -> list[tuple[float, float]]:
        """Midpoints of the 2x2 grid, in the order cities are assigned."""
        lo, hi = self.plane_size / 4, 3 * self.plane_size / 4
        return [(lo, lo), (lo, hi), (hi, lo), (hi, hi)]


class TspInstance:
    """Symmetric Euclidean TSP instance.

    ``W`` is stored as given (never recomputed from ``coords``) so that a
    loaded instance is bit-identical to the saved one.
    """

    def __init__(self, W, coords=None, seed=None, generator=None):
        W = np.array(W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] != W.shape[1]:
            raise ValueError("W must be a square matrix")
        n = W.shape[0]
        if n < 2:
            raise ValueError("an instance needs at least 2 cities")
        if not np.all(np.isfinite(W)):
            raise ValueError("W has non-finite entries")
        if np.any(W < 0):
            raise ValueError("W has negative entries")
        if not np.array_equal(W, W.T):
            raise ValueError("W not symmetric")
        if np.any(np.diag(W) != 0):
            raise ValueError("W diagonal must be zero")
        W.setflags(write=False)
        self.W = W
        if coords is not None:
            coords = np.array(coords, dtype=np.float64)
            if coords.shape != (n, 2):
                raise ValueError(f"coords must have shape ({n}, 2)")
            coords.setflags(write=False)
        self.coords = coords
        self.seed = seed
        self.generator = generator

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @classmethod
    def from_coords(cls, coords, **kw) -> "TspInstance":
        return cls(distance_matrix(coords), coords=coords, **kw)

    def tour_length(self, tour) -> float:
        return tour_length(self.W, tour)

    def __eq__(self, other):
        if not isinstance(other, TspInstance):
            return NotImplemented
        if (self.coords is None) != (other.coords is None):
            return False
        return (
            np.array_equal(self.W, other.W)
            and (self.coords is None or np.array_equal(self.coords, other.coords))
            and self.seed == other.seed
        )

    def __repr__(self):
        return f"TspInstance(n={self.n}, seed={self.seed})"


@dataclass(frozen=True)
class OptimalSolution:
    tour: tuple[int, ...]
    length: float
    all_optimal_tours: frozenset = field(default_factory=frozenset)
    # Distinct undirected tours examined; only filled in by enumeration.
    undirected_count: int | None = None


def distance_matrix(coords) -> np.ndarray:
    xy = np.asarray(coords, dtype=np.float64)
    dx = xy[:, None, 0] - xy[None, :, 0]
    dy = xy[:, None, 1] - xy[None, :, 1]
    return np.hypot(dx, dy)


def tour_length(W, tour) -> float:
    """Closed tour length, correctly rounded."""
    tour = list(tour)
    return math.fsum(W[a][b] for a, b in zip(tour, tour[1:] + tour[:1]))


def canonical_tours(tour) -> frozenset:
    """The tour and its reversal, both starting at city 0."""
    t = tuple(tour)
    return frozenset({t, (t[0],) + t[:0:-1]})


def generate_instance(n: int, cfg: GenConfig | None = None) -> TspInstance:
    """Draw ``n`` cities, cycling through the four quadrants of the plane.

    City ``i`` is sampled from a normal distribution centred on quadrant
    ``i % 4`` with variance ``cfg.sigma_squared``. Coordinates are not
    clamped to the plane.
    """
    cfg = cfg or GenConfig()
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = np.random.default_rng(cfg.seed)
    centres = np.array(cfg.quadrant_centres())
    means = centres[np.arange(n) % 4]
    coords = rng.normal(means, math.sqrt(cfg.sigma_squared))
    return TspInstance.from_coords(coords, seed=cfg.seed, generator=asdict(cfg))


def solve_exact_enumeration(inst: TspInstance) -> OptimalSolution:
    """Brute force over all (n-1)! directed tours starting at city 0."""
    n = inst.n
    if n > MAX_ENUMERATION_CITIES:
        raise ValueError(f"enumeration limited to n <= {MAX_ENUMERATION_CITIES}")
    best = math.inf
    optimal = []
    undirected = set()
    for rest in itertools.permutations(range(1, n)):
        tour = (0,) + rest
        undirected.add(min(tour, (0,) + rest[::-1]))
        length = inst.tour_length(tour)
        if length < best:
            best, optimal = length, [tour]
        elif length == best:
            optimal.append(tour)
    return OptimalSolution(
        tour=optimal[0],
        length=best,
        all_optimal_tours=frozenset(optimal),
        undirected_count=len(undirected),
    )


def solve_exact_held_karp(inst: TspInstance) -> OptimalSolution:
    if inst.n > MAX_HELD_KARP_CITIES:
        raise ValueError(f"Held-Karp limited to n <= {MAX_HELD_KARP_CITIES}")
    _, tour = kernels.held_karp(np.ascontiguousarray(inst.W))
    tour = tuple(int(c) for c in tour)
    return OptimalSolution(
        tour=tour,
        length=inst.tour_length(tour),
        all_optimal_tours=canonical_tours(tour),
    )


def instance_to_dict(inst: TspInstance) -> dict:
    return {
        "n": inst.n,
        "coords": None if inst.coords is None else inst.coords.tolist(),
        "W": inst.W.tolist(),
        "seed": inst.seed,
        "generator": inst.generator,
    }


def instance_from_dict(doc) -> TspInstance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be an object")
    for key in ("n", "W"):
        if key not in doc:
            raise InstanceFormatError(f"missing field {key!r}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise InstanceFormatError("field 'n' must be an integer >= 2")
    W = doc["W"]
    if (
        not isinstance(W, list)
        or len(W) != n
        or any(not isinstance(row, list) or len(row) != n for row in W)
    ):
        raise InstanceFormatError(f"field 'W' must be an {n}x{n} array")
    try:
        W = np.array(W, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"field 'W' has non-numeric entries: {exc}") from None
    coords = doc.get("coords")
    if coords is not None:
        if not isinstance(coords, list) or len(coords) != n:
            raise InstanceFormatError(f"field 'coords' must list {n} points")
        try:
            coords = np.array(coords, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise InstanceFormatError(f"field 'coords' is malformed: {exc}") from None
        if coords.shape != (n, 2):
            raise InstanceFormatError("field 'coords' must hold [x, y] pairs")
    try:
        return TspInstance(W, coords=coords, seed=doc.get("seed"), generator=doc.get("generator"))
    except ValueError as exc:
        raise InstanceFormatError(f"field 'W': {exc}") from None


def save_instance(inst: TspInstance, path) -> None:
    # json writes floats with repr(), which round-trips exactly.
    Path(path).write_text(json.dumps(instance_to_dict(inst), indent=2) + "\n")


def load_instance(path) -> TspInstance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from None
    return instance_from_dict(doc)
