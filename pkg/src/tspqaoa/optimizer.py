"""Basin-hopping over a Nelder-Mead local search, and layerwise QAOA training."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
from scipy.optimize import minimize

from . import simulator
from .simulator import QaoaSchedule


class NonFiniteObjective(FloatingPointError):
    pass


@dataclass(frozen=True)
class OptConfig:
    hops: int = 500
    step_size: float = 0.3
    temperature: float = 1.0
    local_tolerance: float = 1e-6
    max_local_iters: int = 400
    seed: int = 0
    simplex_size: float = 0.1

    def __post_init__(self):
        if self.hops < 1:
            raise ValueError("hops must be >= 1")
        for name in ("step_size", "temperature", "local_tolerance", "simplex_size"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_local_iters < 1:
            raise ValueError("max_local_iters must be >= 1")


def _checked(f):
    def wrapped(x):
        v = float(f(x))
        if not math.isfinite(v):
            raise NonFiniteObjective(f"objective is {v} at {list(x)}")
        return v
    return wrapped


def local_minimize(f, x0, cfg: OptConfig = OptConfig()):
    """Nelder-Mead from ``x0``; never returns a point worse than ``x0``."""
    f = _checked(f)
    x0 = np.atleast_1d(np.asarray(x0, dtype=np.float64))
    f0 = f(x0)
    simplex = np.vstack([x0, x0 + cfg.simplex_size * np.eye(x0.size)])
    res = minimize(
        f,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "xatol": cfg.local_tolerance,
            "fatol": cfg.local_tolerance,
            "maxiter": cfg.max_local_iters,
        },
    )
    if res.fun < f0:
        return np.asarray(res.x, dtype=np.float64), float(res.fun)
    return x0, f0


def basin_hopping(f, x0, cfg: OptConfig = OptConfig(), rng=None, callback=None):
    """Global search: perturb, relax, Metropolis-accept; keep the best seen.

    ``rng`` defaults to a generator seeded from ``cfg.seed``.
    ``callback(hop, x, fx, accepted)`` is called after every hop.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    x, fx = local_minimize(f, x0, cfg)
    best_x, best_f = x, fx
    for hop in range(cfg.hops):
        trial = x + rng.uniform(-cfg.step_size, cfg.step_size, size=x.shape)
        xn, fn = local_minimize(f, trial, cfg)
        if fn < best_f:
            best_x, best_f = xn, fn
        accepted = fn <= fx or rng.uniform() < math.exp(-(fn - fx) / cfg.temperature)
        if accepted:
            x, fx = xn, fn
        if callback is not None:
            callback(hop, xn, fn, accepted)
    return best_x, best_f


@dataclass
class TrainResult:
    schedule: QaoaSchedule
    best_value: float
    per_layer_history: list = field(default_factory=list)  # [(layer, value)]
    initial_value: float = math.nan  # expectation of the uniform state

    def to_dict(self) -> dict:
        return {
            "gammas": list(self.schedule.gammas),
            "betas": list(self.schedule.betas),
            "best_value": self.best_value,
            "initial_value": self.initial_value,
            "per_layer_history": [[p, v] for p, v in self.per_layer_history],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "TrainResult":
        return cls(
            schedule=QaoaSchedule(tuple(doc["gammas"]), tuple(doc["betas"])),
            best_value=float(doc["best_value"]),
            per_layer_history=[(int(p), float(v)) for p, v in doc["per_layer_history"]],
            initial_value=float(doc.get("initial_value", math.nan)),
        )


def layerwise_train(table, L: int, cfg: OptConfig = OptConfig(), log=None) -> TrainResult:
    """Train layer ``p`` with layers ``1 .. p-1`` frozen, for ``p = 1 .. L``.

    Each new layer starts at ``(0, 0)``, where it acts as the identity, so
    the best value can only go down as layers are added.
    """
    if L < 1:
        raise ValueError("L must be >= 1")
    e = simulator._energies(table)
    rng = np.random.default_rng(cfg.seed)
    base = simulator.uniform_state(e.shape[0].bit_length() - 1)
    initial = simulator.expectation(base, e)
    schedule = QaoaSchedule((), ())
    history = []

    for p in range(1, L + 1):
        frozen = base

        def objective(theta):
            psi = frozen.copy()
            simulator.apply_phase(psi, e, theta[0])
            simulator.apply_mixer(psi, theta[1])
            return simulator.expectation(psi, e)

        theta, value = basin_hopping(objective, np.zeros(2), cfg, rng=rng)
        gamma, beta = float(theta[0]), float(theta[1])
        schedule = schedule.appended(gamma, beta)
        base = frozen.copy()
        simulator.apply_phase(base, e, gamma)
        simulator.apply_mixer(base, beta)
        history.append((p, value))
        if log is not None:
            log(p, gamma, beta, value)

    return TrainResult(schedule, history[-1][1], history, initial)


def config_from_mapping(doc: dict, base: OptConfig = OptConfig()) -> OptConfig:
    known = {k: v for k, v in doc.items() if k in asdict(base)}
    types = {k: type(v) for k, v in asdict(base).items()}
    return replace(base, **{k: types[k](v) for k, v in known.items()})
