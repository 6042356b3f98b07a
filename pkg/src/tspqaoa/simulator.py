"""Statevector QAOA for diagonal problem Hamiltonians and the X mixer.

States are plain ``complex128`` numpy arrays of length ``2**N``. Each
layer applies ``exp(-i gamma H_P)`` and then ``exp(-i beta sum_i X_i)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .formulation.polynomial import MAX_TABLE_QUBITS, EnergyTable


@dataclass(frozen=True)
class QaoaSchedule:
    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        g = tuple(float(v) for v in self.gammas)
        b = tuple(float(v) for v in self.betas)
        if len(g) != len(b):
            raise ValueError("gammas and betas differ in length")
        if not all(np.isfinite(g + b)):
            raise ValueError("schedule parameters must be finite")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @classmethod
    def from_layers(cls, layers) -> "QaoaSchedule":
        layers = list(layers)
        return cls(tuple(g for g, _ in layers), tuple(b for _, b in layers))

    @property
    def layers(self) -> list[tuple[float, float]]:
        return list(zip(self.gammas, self.betas))

    def __len__(self):
        return len(self.gammas)

    def truncated(self, p: int) -> "QaoaSchedule":
        return QaoaSchedule(self.gammas[:p], self.betas[:p])

    def appended(self, gamma: float, beta: float) -> "QaoaSchedule":
        return QaoaSchedule(self.gammas + (gamma,), self.betas + (beta,))


def _energies(table) -> np.ndarray:
    if isinstance(table, EnergyTable):
        return table.energies
    return np.ascontiguousarray(table, dtype=np.float64)


def uniform_state(num_qubits: int) -> np.ndarray:
    if not 1 <= num_qubits <= MAX_TABLE_QUBITS:
        raise ValueError(f"num_qubits must be in 1..{MAX_TABLE_QUBITS}")
    size = 1 << num_qubits
    return np.full(size, 1 / np.sqrt(size), dtype=np.complex128)


def basis_state(num_qubits: int, z: int) -> np.ndarray:
    psi = np.zeros(1 << num_qubits, dtype=np.complex128)
    psi[z] = 1.0
    return psi


def _check_state(psi, energies=None):
    if psi.dtype != np.complex128 or not psi.flags.c_contiguous:
        raise TypeError("state must be a contiguous complex128 array")
    if energies is not None and energies.shape[0] != psi.shape[0]:
        raise ValueError(
            f"dimension mismatch: state has {psi.shape[0]} amplitudes, table {energies.shape[0]}"
        )


def apply_phase(psi: np.ndarray, table, gamma: float) -> np.ndarray:
    """Multiply amplitude ``z`` by ``exp(-i gamma E_z``) in place."""
    e = _energies(table)
    _check_state(psi, e)
    kernels.apply_phase(psi, e, float(gamma))
    return psi


def apply_mixer(psi: np.ndarray, beta: float) -> np.ndarray:
    """Apply ``[[cos b, -i sin b], [-i sin b, cos b]]`` on every qubit in place."""
    _check_state(psi)
    kernels.apply_mixer(psi, float(beta))
    return psi


def evolve(psi: np.ndarray, table, schedule: QaoaSchedule) -> np.ndarray:
    """Apply every layer of ``schedule`` to ``psi`` in place."""
    e = _energies(table)
    _check_state(psi, e)
    for gamma, beta in zip(schedule.gammas, schedule.betas):
        kernels.apply_phase(psi, e, gamma)
        kernels.apply_mixer(psi, beta)
    return psi


def run_qaoa(table, schedule: QaoaSchedule) -> np.ndarray:
    e = _energies(table)
    psi = uniform_state(e.shape[0].bit_length() - 1)
    return evolve(psi, e, schedule)


def expectation(psi: np.ndarray, table) -> float:
    e = _energies(table)
    _check_state(psi, e)
    return kernels.expectation(psi, e)


def probabilities(psi: np.ndarray) -> np.ndarray:
    return psi.real**2 + psi.imag**2


def dump_state(psi: np.ndarray, path) -> None:
    """Write ``index re im`` lines, one per amplitude."""
    lines = [f"{z} {a.real!r} {a.imag!r}" for z, a in enumerate(psi.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def load_state(path) -> np.ndarray:
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    psi = np.zeros(len(rows), dtype=np.complex128)
    for z, re, im in rows:
        psi[int(z)] = complex(float(re), float(im))
    return psi
