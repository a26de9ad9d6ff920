"""Reference dynamics from dense Hamiltonians and success-probability curves."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import builders
from .circuit import simulate, uniform_state
from .spectral import Family, GraphSpec, spectrum

MAX_DIMENSION = 4096
SOURCES = ("oracle", "circuit", "circuit-approx")


def adjacency(spec: GraphSpec) -> np.ndarray:
    N = spec.N
    idx = np.arange(N)
    if spec.family is Family.COMPLETE:
        return np.ones((N, N)) - np.eye(N)
    if spec.family is Family.BIPARTITE:
        part = idx >= N // 2
        return (part[:, None] != part[None, :]).astype(float)
    diff = idx[:, None] ^ idx[None, :]
    return ((diff & (diff - 1)) == 0).astype(float) * (diff != 0)


def default_gamma(spec: GraphSpec) -> float:
    """Hopping rate used by the search circuits of each family."""
    if spec.family is Family.HYPERCUBE:
        return spectrum(spec).gamma
    if spec.family is Family.COMPLETE:
        return 1 / spec.N
    return 2 / spec.N


@dataclass
class DenseHamiltonian:
    """``H = -gamma A - |w><w|`` with a lazily cached eigendecomposition."""

    matrix: np.ndarray
    gamma: float
    marked: int | None = 0

    def __post_init__(self) -> None:
        if self.matrix.shape[0] > MAX_DIMENSION:
            raise ValueError(f"dense oracle limited to N <= {MAX_DIMENSION}")

    @classmethod
    def for_graph(cls, spec: GraphSpec, gamma: float | None = None,
                  marked: int | None = 0) -> "DenseHamiltonian":
        if spec.N > MAX_DIMENSION:
            raise ValueError(f"dense oracle limited to N <= {MAX_DIMENSION}")
        g = default_gamma(spec) if gamma is None else gamma
        h = -g * adjacency(spec)
        if marked is not None:
            h[marked, marked] -= 1.0
        return cls(h, g, marked)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.matrix)

    def propagator(self, t: float) -> np.ndarray:
        vals, vecs = self.eigh
        return (vecs * np.exp(-1j * vals * t)) @ vecs.T

    def evolve(self, t: float, state: np.ndarray) -> np.ndarray:
        return exact_evolve(self, t, state)


def exact_evolve(h: DenseHamiltonian, t: float, state: np.ndarray) -> np.ndarray:
    """``exp(-iHt)|state>`` via the cached eigendecomposition."""
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (h.dimension,):
        raise ValueError(f"state of shape {psi.shape} does not match N={h.dimension}")
    vals, vecs = h.eigh
    return vecs @ (np.exp(-1j * vals * t) * (vecs.T @ psi))


@dataclass
class ExperimentResult:
    source: str
    spec: GraphSpec
    times: np.ndarray
    probabilities: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def peak(self) -> tuple[float, float]:
        i = int(np.argmax(self.probabilities))
        return float(self.times[i]), float(self.probabilities[i])


def success_curve(
    spec: GraphSpec,
    source: str = "oracle",
    steps: int = 0,
    dt: float = 1.0,
    asymptotic_eigs: bool = False,
) -> ExperimentResult:
    """``|<w|psi(t)>|^2`` at ``t = 0, dt, ..., steps*dt`` starting from the uniform state.

    Circuit sources build one ``U(dt)`` and apply it repeatedly; the oracle
    evaluates ``exp(-iHt)`` directly at each sample time.
    """
    if source not in SOURCES:
        raise ValueError(f"unknown source {source!r}; expected one of {SOURCES}")
    if steps < 0:
        raise ValueError("steps must be non-negative")
    w = spec.marked
    psi0 = uniform_state(spec.qubits)
    times = np.arange(steps + 1) * dt
    probs = np.empty(steps + 1)
    if source == "oracle":
        h = DenseHamiltonian.for_graph(spec, marked=w)
        vals, vecs = h.eigh
        coeff = vecs.T @ psi0
        row = vecs[w]
        for i, t in enumerate(times):
            probs[i] = abs(row @ (np.exp(-1j * vals * t) * coeff)) ** 2
        return ExperimentResult(source, spec, times, probs, {"gamma": h.gamma})
    if w != 0:
        raise ValueError("circuits are built for marked vertex 0 only")
    step = builders.build_search(
        spec, dt, approx=(source == "circuit-approx"), asymptotic_eigs=asymptotic_eigs)
    psi = psi0
    probs[0] = abs(psi[0]) ** 2
    for i in range(1, steps + 1):
        psi = simulate(step, psi)
        probs[i] = abs(psi[0]) ** 2
    return ExperimentResult(source, spec, times, probs, {"gates": len(step)})


def locality_leak(spec: GraphSpec, gamma: float, vertex: int = 0, t: float = 1.0) -> float:
    """Probability outside ``vertex`` and its neighbours after time ``t``, no marked vertex."""
    a = adjacency(spec)
    h = DenseHamiltonian(-gamma * a, gamma, None)
    start = np.zeros(spec.N, dtype=complex)
    start[vertex] = 1.0
    psi = exact_evolve(h, t, start)
    near = a[vertex].astype(bool)
    near[vertex] = True
    return float(np.sum(np.abs(psi[~near]) ** 2))


def expected_energy(h: DenseHamiltonian, psi: np.ndarray) -> float:
    return float(np.real(np.vdot(psi, h.matrix @ psi)))

