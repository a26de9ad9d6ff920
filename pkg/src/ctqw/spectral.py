"""Eigen-data of the search Hamiltonian ``-gamma A - |w><w|`` with ``w = 0``.

Closed forms for the three graph families plus the generic two-level model
built from the adjacency spectrum (sums ``S1``, ``S2``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

CUBIC_TOL = 1e-12


class Family(str, Enum):
    COMPLETE = "complete"
    BIPARTITE = "bipartite"
    HYPERCUBE = "hypercube"


_MIN_QUBITS = {Family.COMPLETE: 1, Family.BIPARTITE: 2, Family.HYPERCUBE: 2}


@dataclass(frozen=True)
class GraphSpec:
    """Graph on ``N = 2**qubits`` vertices; the marked vertex is always 0.

    Hypercube walks without a marked vertex work from one qubit, but search on
    ``Q_1`` is degenerate, hence the minimum of two.
    """

    family: Family
    qubits: int
    marked: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", Family(self.family))
        low = _MIN_QUBITS[self.family]
        if self.qubits < low:
            raise ValueError(
                f"{self.family.value} graph needs at least {low} qubits, got {self.qubits}")
        if not 0 <= self.marked < self.N:
            raise ValueError("marked vertex out of range")

    @property
    def N(self) -> int:
        return 2**self.qubits


@dataclass(frozen=True)
class Eigenpair:
    value: float
    vector: np.ndarray
    exact: bool = True

    def entry(self, j: int) -> float:
        return float(self.vector[j])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


@dataclass
class SpectralModel:
    """Two (or three) relevant eigenpairs and the derived search quantities.

    ``eigen`` is sorted by eigenvalue.  ``shift`` is the multiple of the identity
    removed from the Hamiltonian before the eigenpairs were taken (``1/N`` for
    the complete graph, else 0).  ``overlap_marked`` and ``overlap_initial`` map
    ``"minus"``/``"plus"`` to ``<w|lambda>`` and ``<psi(0)|lambda>``.
    """

    gamma: float
    eigen: list[Eigenpair]
    epsilon: float
    overlap_marked: dict[str, float]
    overlap_initial: dict[str, float]
    t_opt: float
    shift: float = 0.0
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def minus(self) -> Eigenpair:
        return self.eigen[0]

    @property
    def plus(self) -> Eigenpair:
        return self.eigen[1]


def _overlaps(pairs: Sequence[Eigenpair], N: int) -> tuple[dict, dict]:
    names = ("minus", "plus")
    marked = {k: p.vector[0] / p.norm for k, p in zip(names, pairs)}
    initial = {k: p.vector.sum() / (p.norm * math.sqrt(N)) for k, p in zip(names, pairs)}
    return ({k: float(v) for k, v in marked.items()},
            {k: float(v) for k, v in initial.items()})


# --------------------------------------------------------------------------
# complete graph


def complete_spectrum(q: int) -> SpectralModel:
    """Nonzero eigenpairs of ``H - I/N`` on ``K_N`` with ``gamma = 1/N``."""
    if q < 1:
        raise ValueError("complete graph needs at least one qubit")
    N = 2**q
    pairs = []
    for sign in (-1, 1):
        lam = -1 + sign / math.sqrt(N)
        vec = np.full(N, -sign / math.sqrt(-2 * N * lam))
        vec[0] = math.sqrt(-lam) / math.sqrt(2)
        pairs.append(Eigenpair(lam, vec))
    marked, initial = _overlaps(pairs, N)
    return SpectralModel(
        gamma=1 / N,
        eigen=pairs,
        epsilon=1 / math.sqrt(N),
        overlap_marked=marked,
        overlap_initial=initial,
        t_opt=math.pi / 2 * math.sqrt(N),
        shift=1 / N,
    )


# --------------------------------------------------------------------------
# complete bipartite graph


def _cubic(lam: float, n: int) -> float:
    return lam**3 + lam**2 - lam - (1 - 1 / n)


def bipartite_roots(m: int) -> tuple[float, float, float]:
    """Roots ``lambda_- < lambda_+ < lambda_0`` of ``x^3 + x^2 - x - (1 - 1/n)``."""
    if m < 2:
        raise ValueError("bipartite graph needs m >= 2")
    n = 2 ** (m - 1)
    d = -(1 - 1 / n)
    # discriminant of x^3 + b x^2 + c x + d with b = 1, c = -1
    b, c = 1.0, -1.0
    disc = 18 * b * c * d - 4 * b**3 * d + b**2 * c**2 - 4 * c**3 - 27 * d**2
    if disc <= 0:
        raise ArithmeticError(f"cubic for n={n} lacks three distinct real roots")
    companion = np.array([[-b, -c, -d], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    roots = np.sort(np.linalg.eigvals(companion).real)
    polished = []
    for r in roots:
        for _ in range(3):
            f = _cubic(r, n)
            df = 3 * r**2 + 2 * r - 1
            if df == 0 or f == 0:
                break
            r -= f / df
        polished.append(float(r))
    lo, mid, hi = sorted(polished)
    return lo, mid, hi


def bipartite_coefficients(lam: float, m: int) -> tuple[float, float, float]:
    n = 2 ** (m - 1)
    a = (n * lam**2 + n * lam - 1) / (n - 1)
    b = -1 - lam
    c = 1 + (n - 1) * a**2 + n * b**2
    return a, b, c


def bipartite_eigvec(lam: float, m: int) -> np.ndarray:
    """Unit eigenvector for root ``lam``.

    Vertex 0 (marked) carries ``1``, the rest of its part ``1..n-1`` carries ``a``
    and the opposite part ``n..N-1`` carries ``b``, all over ``sqrt(c)``.
    """
    if m < 2:
        raise ValueError("bipartite graph needs m >= 2")
    n = 2 ** (m - 1)
    a, b, c = bipartite_coefficients(lam, m)
    vec = np.empty(2 * n)
    vec[0] = 1.0
    vec[1:n] = a
    vec[n:] = b
    return vec / math.sqrt(c)


def bipartite_spectrum(m: int) -> SpectralModel:
    """Exact three eigenpairs; ``epsilon`` comes from the two inner roots.

    The overlaps are exact inner products with the two inner eigenvectors.  The
    generic two-level values for the spectrum ``{n, 0, -n}`` are kept in
    ``extras`` for comparison.
    """
    lo, mid, hi = bipartite_roots(m)
    N = 2**m
    n = N // 2
    pairs = [Eigenpair(lam, bipartite_eigvec(lam, m)) for lam in (lo, mid, hi)]
    marked, initial = _overlaps(pairs, N)
    two_level = appendix_b_model([n, 0, -n], [1 / N, (N - 2) / N, 1 / N], N)
    eps = (mid - lo) / 2
    return SpectralModel(
        gamma=1 / n,
        eigen=pairs,
        epsilon=eps,
        overlap_marked=marked,
        overlap_initial=initial,
        t_opt=math.pi / (2 * eps),
        extras={
            "lambda_0": hi,
            "initial_0": float(pairs[2].vector.sum() / math.sqrt(N)),
            "two_level_marked": two_level.overlap_marked["plus"],
            "two_level_initial": two_level.overlap_initial["minus"],
            "max_cubic_residual": max(abs(_cubic(x, n)) for x in (lo, mid, hi)),
        },
    )


# --------------------------------------------------------------------------
# hypercube and the generic two-level model


def hypercube_projector_norms(n: int) -> list[float]:
    """``||P_k |w>||**2 = C(n, k) / 2**n`` for ``k = 0..n``."""
    N = 2**n
    return [math.comb(n, k) / N for k in range(n + 1)]


def spectral_sums(phis: Sequence[float], weights: Sequence[float]) -> tuple[float, float]:
    s1 = s2 = 0.0
    for phi, wt in zip(phis[1:], weights[1:]):
        gap = phis[0] - phi
        s1 += wt / gap
        s2 += wt / gap**2
    return s1, s2


def appendix_b_model(
    phis: Sequence[float],
    projector_norms: Sequence[float],
    N: int,
    s_values: np.ndarray | None = None,
) -> SpectralModel:
    """Two-level approximation from the distinct adjacency eigenvalues.

    ``phis`` must be strictly decreasing and ``projector_norms`` holds
    ``||P_l |w>||**2``.  ``s_values[j]`` is ``gamma * sum_l phi_l <j|P_l|psi(0)>``;
    when omitted the uniform state is assumed to span the top eigenspace, giving
    ``gamma * phi_0 / sqrt(N)`` for every ``j``.
    """
    phis = [float(p) for p in phis]
    weights = [float(w) for w in projector_norms]
    if len(phis) != len(weights) or len(phis) < 2:
        raise ValueError("need matching eigenvalue and weight lists of length >= 2")
    if any(b >= a for a, b in zip(phis, phis[1:])):
        raise ValueError("eigenvalues must be strictly decreasing")
    if abs(sum(weights) - 1) > 1e-10:
        raise ValueError("projector norms must sum to 1")
    s1, s2 = spectral_sums(phis, weights)
    gamma = s1
    p0 = math.sqrt(weights[0])
    eps = s1 * p0 / math.sqrt(s2)
    if eps <= 0:
        raise ValueError("degenerate spectral gap")
    lam_minus = -gamma * phis[0] - eps
    lam_plus = -gamma * phis[0] + eps
    w_overlap = s1 / math.sqrt(2 * s2)
    init = {"minus": 1 / (math.sqrt(2 * N) * p0), "plus": -1 / (math.sqrt(2 * N) * p0)}
    if s_values is None:
        s_values = np.full(N, gamma * phis[0] / math.sqrt(N))
    delta = np.zeros(N)
    delta[0] = 1.0
    pairs = []
    for name, lam, other, sign in (("minus", lam_minus, lam_plus, 1), ("plus", lam_plus, lam_minus, -1)):
        vec = sign / (2 * eps * math.sqrt(N) * init[name]) * (
            math.sqrt(N) * s_values + delta + other)
        pairs.append(Eigenpair(lam, vec, exact=False))
    return SpectralModel(
        gamma=gamma,
        eigen=pairs,
        epsilon=eps,
        overlap_marked={"minus": w_overlap, "plus": w_overlap},
        overlap_initial=init,
        t_opt=math.pi / (2 * eps),
        extras={"S1": s1, "S2": s2},
    )


def hypercube_spectral(q: int, asymptotic: bool = False) -> SpectralModel:
    """Approximate ground/first-excited pair for ``Q_n`` with exact finite sums.

    Entries are ``(delta_{j0} -/+ 1/sqrt(N)) / sqrt(2)``; these vectors are
    orthogonal but have squared norm ``1 -/+ 1/sqrt(N)``.  ``asymptotic=True``
    replaces the eigenvalues by ``-1 -/+ 1/sqrt(N)``.
    """
    if q < 2:
        raise ValueError("hypercube search needs q >= 2")
    n, N = q, 2**q
    phis = [float(n - 2 * k) for k in range(n + 1)]
    model = appendix_b_model(phis, hypercube_projector_norms(n), N)
    lam_minus, lam_plus = model.minus.value, model.plus.value
    if asymptotic:
        lam_minus, lam_plus = -1 - 1 / math.sqrt(N), -1 + 1 / math.sqrt(N)
    pairs = []
    for lam, sign in ((lam_minus, 1), (lam_plus, -1)):
        vec = np.full(N, sign / math.sqrt(N))
        vec[0] += 1.0
        pairs.append(Eigenpair(lam, vec / math.sqrt(2), exact=False))
    model.eigen = pairs
    if asymptotic:
        model.epsilon = 1 / math.sqrt(N)
        model.t_opt = math.pi / 2 * math.sqrt(N)
    return model


def spectrum(spec: GraphSpec, asymptotic: bool = False) -> SpectralModel:
    if spec.family is Family.COMPLETE:
        return complete_spectrum(spec.qubits)
    if spec.family is Family.BIPARTITE:
        return bipartite_spectrum(spec.qubits)
    return hypercube_spectral(spec.qubits, asymptotic=asymptotic)


def predicted_success(model: SpectralModel, t: float) -> float:
    """Two-level success probability, clipped to [0, 1].

    With ``a_pm = <w|lambda_pm><lambda_pm|psi0>`` the two-term evolution gives
    ``(a_- + a_+)^2 cos^2(eps t) + (a_- - a_+)^2 sin^2(eps t)``.  For symmetric
    overlaps (``a_- = -a_+``, as in the generic two-level model) this is
    ``4 |<lambda+|psi0>|^2 |<w|lambda+>|^2 sin^2(eps t)``.
    """
    if model.epsilon <= 0:
        raise ValueError("model has no spectral gap")
    a_minus = model.overlap_marked["minus"] * model.overlap_initial["minus"]
    a_plus = model.overlap_marked["plus"] * model.overlap_initial["plus"]
    et = model.epsilon * t
    p = (a_minus + a_plus) ** 2 * math.cos(et) ** 2 + (a_minus - a_plus) ** 2 * math.sin(et) ** 2
    return float(min(1.0, max(0.0, p)))
