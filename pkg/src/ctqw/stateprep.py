"""Preparation of real states that are constant on dyadic index blocks.

The block basis is ``|alpha_0> = |0>`` and, for ``k >= 1``, the uniform
superposition of indices ``2**(k-1) .. 2**k - 1``.  Any real state in their span
is produced from ``|0>`` by a Hadamard layer followed by a ladder of
open-controlled Ry rotations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import RY, Circuit

RESIDUAL_TOL = 1e-8
NORM_TOL = 1e-10


@dataclass(frozen=True)
class AlphaDecomposition:
    n: int
    alphas: np.ndarray
    residual: float = 0.0
    norm: float = 1.0


@dataclass(frozen=True)
class AnglePlan:
    theta_prime: np.ndarray  # index 0 holds the fixed value pi/2
    theta: np.ndarray  # theta[k-1] is the angle of ladder gate k

    @property
    def n(self) -> int:
        return len(self.theta)


def block_basis(n: int) -> np.ndarray:
    """Rows are ``|alpha_0>, ..., |alpha_n>``."""
    basis = np.zeros((n + 1, 2**n))
    basis[0, 0] = 1.0
    for k in range(1, n + 1):
        lo, hi = 2 ** (k - 1), 2**k
        basis[k, lo:hi] = 1 / math.sqrt(hi - lo)
    return basis


def alphas_from_state(state) -> AlphaDecomposition:
    v = np.asarray(state)
    if np.iscomplexobj(v):
        if np.abs(v.imag).max(initial=0.0) > RESIDUAL_TOL:
            raise ValueError("state has non-negligible imaginary part")
        v = v.real
    v = v.astype(float)
    n = v.size.bit_length() - 1
    if v.ndim != 1 or v.size != 2**n or n < 1:
        raise ValueError(f"state length {v.size} is not a power of two >= 2")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise ValueError("cannot prepare the zero vector")
    v = v / norm
    alphas = np.empty(n + 1)
    alphas[0] = v[0]
    for k in range(1, n + 1):
        block = v[2 ** (k - 1): 2**k]
        alphas[k] = block.sum() / math.sqrt(block.size)
    residual = float(np.linalg.norm(v - alphas @ block_basis(n)))
    if residual > RESIDUAL_TOL:
        raise ValueError(
            f"state lies outside the block span (residual {residual:.3g})")
    return AlphaDecomposition(n, alphas, residual, norm)


def angles_from_alphas(dec: AlphaDecomposition) -> AnglePlan:
    """Solve ``alpha_k = sin(t'_k) * prod_{j>k} cos(t'_j)`` from the top down.

    ``t'_k = atan2(alpha_k, sqrt(1 - sum_{j>=k} alpha_j**2))``.  For ``k = 1`` the
    square root equals ``|alpha_0|``, and the signed ``alpha_0`` is used instead so
    that negative ``alpha_0`` is reachable.
    """
    a = np.asarray(dec.alphas, dtype=float)
    n = a.size - 1
    total = float(a @ a)
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"alphas are not normalised (sum of squares {total!r})")
    theta_prime = np.empty(n + 1)
    theta_prime[0] = math.pi / 2
    tail = 0.0
    for k in range(n, 0, -1):
        tail += a[k] ** 2
        if k == 1:
            denom = a[0]
        else:
            radicand = 1.0 - tail
            if radicand < -NORM_TOL:
                raise ValueError("negative radicand: alphas exceed unit norm")
            denom = math.sqrt(max(radicand, 0.0))
        theta_prime[k] = math.atan2(a[k], denom)
    theta = np.array([2 * theta_prime[n - k + 1] - math.pi / 2 for k in range(1, n + 1)])
    return AnglePlan(theta_prime, theta)


def build_stateprep_circuit(plan: AnglePlan) -> Circuit:
    """Hadamards on every qubit, then Ry(theta_k) with k-1 open controls.

    Gate k acts on qubit ``n - k`` and is controlled by all higher qubits, so the
    first rotation sits on the most significant bit.
    """
    n = plan.n
    if n < 1:
        raise ValueError("need at least one qubit")
    c = Circuit(n)
    for q in range(n):
        c.h(q)
    for k in range(1, n + 1):
        target = n - k
        controls = [(q, 0) for q in range(n - 1, target, -1)]
        c.rot(RY, plan.theta[k - 1], target, controls)
    return c


def prepare(state) -> tuple[Circuit, AlphaDecomposition]:
    """Circuit ``A`` with ``A|0> = state / ||state||`` and the decomposition used."""
    dec = alphas_from_state(state)
    return build_stateprep_circuit(angles_from_alphas(dec)), dec
