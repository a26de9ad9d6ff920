"""Shared fixtures and the acceptance summary printed at the end of a run."""
from __future__ import annotations

import time

import numpy as np
import pytest

from ctqw.circuit import Circuit, circuit_unitary
from ctqw.oracle import DenseHamiltonian
from ctqw.spectral import GraphSpec

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}
SUITE_BUDGET_S = 300.0
_START = [time.perf_counter()]


def record(number: int, title: str, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = (title, bool(ok), detail)


def pytest_sessionstart(session):
    _START[0] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    elapsed = time.perf_counter() - _START[0]
    if 9 in ACCEPTANCE:
        title, ok, detail = ACCEPTANCE[9]
        within = elapsed <= SUITE_BUDGET_S
        ACCEPTANCE[9] = (title, ok and within,
                         f"{detail}; suite runtime {elapsed:.1f} s (<= {SUITE_BUDGET_S:.0f} s)")
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(rng, width: int) -> np.ndarray:
    v = rng.normal(size=2**width) + 1j * rng.normal(size=2**width)
    return v / np.linalg.norm(v)


def dense_propagator(spec: GraphSpec, t: float, gamma: float | None = None) -> np.ndarray:
    return DenseHamiltonian.for_graph(spec, gamma=gamma).propagator(t)


def unitary(c: Circuit) -> np.ndarray:
    return circuit_unitary(c)
