"""Output-state quality metrics: approximation ratio, true percentage, rank."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .formulation.encoding import EncodingScheme, encode_tour
from .instances import canonical_tours
from .simulator import expectation, probabilities


@dataclass(frozen=True)
class RunMetrics:
    approximation_ratio: float
    true_percentage: float
    rank: int
    layer: int
    encoding: str

    def as_dict(self) -> dict:
        return asdict(self)


def optimal_indices(scheme: EncodingScheme, optimal_tours) -> list[int]:
    """Basis states of every optimal tour, in both directions."""
    tours = set()
    for t in optimal_tours:
        tours |= canonical_tours(t)
    if not tours:
        raise ValueError("optimal_tours is empty")
    return sorted(encode_tour(t, scheme) for t in tours)


def approximation_ratio(psi: np.ndarray, table, opt_length: float) -> float:
    if not opt_length > 0:
        raise ValueError("opt_length must be positive")
    return expectation(psi, table) / opt_length


def true_percentage(psi: np.ndarray, scheme: EncodingScheme, optimal_tours) -> float:
    """Probability of measuring any optimal tour (a fraction in [0, 1])."""
    idx = optimal_indices(scheme, optimal_tours)
    return float(probabilities(psi)[idx].sum())


def rank(psi: np.ndarray, scheme: EncodingScheme, optimal_tours) -> int:
    """1 + number of basis states strictly more likely than the best optimal one."""
    p = probabilities(psi)
    q = p[optimal_indices(scheme, optimal_tours)].max()
    return 1 + int(np.count_nonzero(p > q))


def run_metrics(psi, table, scheme: EncodingScheme, solution, layer: int) -> RunMetrics:
    return RunMetrics(
        approximation_ratio=approximation_ratio(psi, table, solution.length),
        true_percentage=true_percentage(psi, scheme, solution.all_optimal_tours),
        rank=rank(psi, scheme, solution.all_optimal_tours),
        layer=layer,
        encoding=scheme.kind,
    )
