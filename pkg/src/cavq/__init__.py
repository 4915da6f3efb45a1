"""Cavity-centric quantum transpiler and noisy-simulation toolkit."""

__version__ = "0.1.0"

from .pauli import Hamiltonian, PauliTerm, ProblemGraph  # noqa: F401
from .topology import (build_cavity, build_honeycomb,  # noqa: F401
                       build_octagonal)
