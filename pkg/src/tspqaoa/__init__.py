"""Compile TSP instances into diagonal QAOA Hamiltonians and train QAOA on them."""

__version__ = "0.1.0"
