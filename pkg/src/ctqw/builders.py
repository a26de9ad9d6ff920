"""Walk and search circuits for complete, complete bipartite and hypercube graphs.

Search circuits take the marked vertex to be 0 and apply the reflection-like
factors ``R = I + (exp(-i t lambda) - 1)|0><0|`` conjugated by the state
preparation ``A_lambda`` of each relevant eigenvector.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .circuit import RX, Circuit, basis_state_phase_gate
from .spectral import (
    Eigenpair,
    Family,
    GraphSpec,
    bipartite_spectrum,
    complete_spectrum,
    hypercube_spectral,
    spectrum,
)
from .stateprep import prepare


@dataclass(frozen=True)
class WalkCircuitRequest:
    graph: GraphSpec
    t: float = 1.0
    gamma_override: float | None = None
    approx_bipartite: bool = False
    asymptotic_eigs: bool = False

    def __post_init__(self) -> None:
        if not math.isfinite(self.t):
            raise ValueError("t must be finite")
        if self.gamma_override is not None and not self.gamma_override > 0:
            raise ValueError("gamma_override must be positive")


def _hadamard_layer(c: Circuit) -> None:
    for q in range(c.width):
        c.h(q)


def eigen_factor(pair: Eigenpair, t: float, width: int) -> Circuit:
    """``exp(-i t lambda |lambda><lambda|)`` as ``A R A^dagger`` (time order A^dagger, R, A)."""
    prep, _ = prepare(pair.vector)
    c = prep.inverse()
    c.extend(basis_state_phase_gate(width, 0, -t * pair.value))
    c.compose(prep)
    return c


def _product(pairs: Sequence[Eigenpair], t: float, width: int) -> Circuit:
    c = Circuit(width)
    for pair in pairs:
        c.compose(eigen_factor(pair, t, width))
    return c


def build_complete_walk(q: int, t: float) -> Circuit:
    """``exp(i t A / N)`` on ``K_N``: H layer, X layer, controlled phase, X layer, H layer."""
    c = Circuit(q, global_phase=-t / 2**q)
    _hadamard_layer(c)
    for k in range(q):
        c.x(k)
    c.extend(basis_state_phase_gate(q, 2**q - 1, t))
    for k in range(q):
        c.x(k)
    _hadamard_layer(c)
    return c


def build_complete_search(q: int, t: float) -> Circuit:
    """``exp(-iHt)`` for ``H = -A/N - |0><0|``; the ``exp(-it/N)`` factor is the global phase."""
    model = complete_spectrum(q)
    c = _product(model.eigen, t, q)
    c.global_phase += -t * model.shift
    return c


def build_bipartite_walk(m: int, t: float) -> Circuit:
    """``exp(i t A / n)`` on ``K_{n,n}`` with ``n = 2**(m-1)``."""
    if m < 2:
        raise ValueError("bipartite graph needs m >= 2")
    n = 2 ** (m - 1)
    c = Circuit(m)
    _hadamard_layer(c)
    c.extend(basis_state_phase_gate(m, 0, t))
    c.extend(basis_state_phase_gate(m, n, -t))
    _hadamard_layer(c)
    return c


def build_bipartite_search(m: int, t: float, approx: bool = False) -> Circuit:
    """Three eigen-factors (lambda_-, lambda_+, lambda_0); ``approx`` drops lambda_0."""
    model = bipartite_spectrum(m)
    pairs = model.eigen[:2] if approx else model.eigen
    return _product(pairs, t, m)


def build_hypercube_walk(q: int, t: float, gamma: float) -> Circuit:
    """``exp(i gamma t sum_j X_j)`` as one ``Rx(-2 gamma t)`` per qubit."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    c = Circuit(q)
    for k in range(q):
        c.rot(RX, -2 * gamma * t, k)
    return c


def build_hypercube_search(q: int, t: float, asymptotic_eigs: bool = False) -> Circuit:
    """``exp(-i t H_approx)`` from the normalised two-level approximation."""
    model = hypercube_spectral(q, asymptotic=asymptotic_eigs)
    return _product(model.eigen, t, q)


def build_walk(request: WalkCircuitRequest) -> Circuit:
    spec, t = request.graph, request.t
    if spec.family is Family.COMPLETE:
        return build_complete_walk(spec.qubits, t)
    if spec.family is Family.BIPARTITE:
        return build_bipartite_walk(spec.qubits, t)
    gamma = request.gamma_override
    if gamma is None:
        gamma = hypercube_spectral(spec.qubits).gamma
    return build_hypercube_walk(spec.qubits, t, gamma)


def build_search(spec: GraphSpec, t: float = 1.0, approx: bool = False,
                 asymptotic_eigs: bool = False) -> Circuit:
    if spec.marked != 0:
        raise ValueError("search circuits are built for marked vertex 0 only")
    if spec.family is Family.COMPLETE:
        if approx:
            raise ValueError("the complete-graph circuit has no approximate variant")
        return build_complete_search(spec.qubits, t)
    if spec.family is Family.BIPARTITE:
        return build_bipartite_search(spec.qubits, t, approx=approx)
    if approx:
        raise ValueError("the hypercube circuit is already the two-level approximation")
    return build_hypercube_search(spec.qubits, t, asymptotic_eigs=asymptotic_eigs)


def stateprep_circuits(spec: GraphSpec, asymptotic_eigs: bool = False) -> list[Circuit]:
    """The ``A_lambda`` circuits used by the search circuit of ``spec``."""
    model = spectrum(spec, asymptotic=asymptotic_eigs)
    return [prepare(p.vector)[0] for p in model.eigen]

