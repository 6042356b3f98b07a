"""Problem Hamiltonians for TSP under one-hot and binary-code encodings."""
from .encoding import (
    COMPACT,
    ENCODINGS,
    ONEHOT,
    Decoded,
    EncodingScheme,
    bits_per_step,
    decode_assignment,
    encode_tour,
    qubit_count,
)
from .hamiltonians import (
    CompactConfig,
    OneHotConfig,
    build_compact_energy,
    build_energy,
    build_onehot_energy,
)
from .polynomial import (
    BinaryPolynomial,
    EnergyTable,
    GateCounts,
    PauliPolynomial,
    dumps_polynomial,
    energy_table,
    evaluation_matrix,
    gate_count,
    load_polynomial,
    loads_polynomial,
    mobius_pair_coefficients,
    mobius_transform,
    pauli_expand,
    save_polynomial,
    solve_pair_coefficients,
    solve_triangular,
    subset_order,
)

__all__ = [name for name in dir() if not name.startswith("_")]
