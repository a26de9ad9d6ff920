"""Gate-level circuits for continuous-time quantum-walk search on complete,
complete bipartite and hypercube graphs, with a dense-Hamiltonian reference."""

from .circuit import Circuit, Gate, decompose, export_qasm, gate_count, simulate
from .spectral import Family, GraphSpec

__all__ = [
    "Circuit",
    "Family",
    "Gate",
    "GraphSpec",
    "decompose",
    "export_qasm",
    "gate_count",
    "simulate",
]
__version__ = "0.1.0"
