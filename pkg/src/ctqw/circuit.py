"""Gate IR, statevector simulation, decomposition to a basic gate set and QASM 3 export.

Qubit ``i`` holds bit ``i`` of the basis index, so ``|j>`` with
``j = sum(b_i * 2**i)``.  Rotation conventions::

    Rz(t) = diag(exp(-it/2), exp(it/2))
    Ry(t) = exp(-i t Y / 2)
    Rx(t) = exp(-i t X / 2)
    P(t)  = diag(1, exp(it)) = exp(it/2) Rz(t)
"""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

H, X, CX = "h", "x", "cx"
RX, RY, RZ, PHASE, GPHASE = "rx", "ry", "rz", "p", "gphase"

ROTATIONS = frozenset({RX, RY, RZ, PHASE})
KINDS = frozenset({H, X, CX, GPHASE}) | ROTATIONS
BASIC_KINDS = frozenset({H, X, CX, RY, RZ, PHASE, GPHASE})

_INV_SQRT2 = 1 / math.sqrt(2)
_H_MATRIX = np.array([[1, 1], [1, -1]], dtype=complex) * _INV_SQRT2
_X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)


class CircuitError(ValueError):
    """Raised for malformed gates, width mismatches and unsupported exports."""


@dataclass(frozen=True)
class Gate:
    """A single-qubit gate with optional controls.

    ``controls`` holds ``(qubit, polarity)`` pairs; polarity 1 fires on ``|1>``,
    polarity 0 (open control) fires on ``|0>``.  ``cx`` is an X with exactly one
    polarity-1 control.  ``gphase`` ignores ``target`` and takes no controls.
    """

    kind: str
    target: int = 0
    angle: float = 0.0
    controls: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind in ROTATIONS or self.kind == GPHASE:
            if not math.isfinite(self.angle):
                raise CircuitError(f"non-finite angle in {self.kind} gate")
        qubits = [q for q, _ in self.controls]
        if len(set(qubits)) != len(qubits):
            raise CircuitError("duplicate control qubits")
        if any(p not in (0, 1) for _, p in self.controls):
            raise CircuitError("control polarity must be 0 or 1")
        if self.kind == GPHASE:
            if self.controls:
                raise CircuitError("gphase cannot be controlled")
            return
        if self.target in qubits:
            raise CircuitError("target qubit appears among controls")
        if self.kind == CX and (len(self.controls) != 1 or self.controls[0][1] != 1):
            raise CircuitError("cx needs exactly one polarity-1 control")

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.kind == GPHASE:
            return ()
        return (self.target,) + tuple(q for q, _ in self.controls)

    def matrix(self) -> np.ndarray:
        """2x2 matrix applied to the target when all controls fire."""
        return single_qubit_matrix(self.kind, self.angle)

    def inverse(self) -> "Gate":
        if self.kind in ROTATIONS or self.kind == GPHASE:
            return Gate(self.kind, self.target, -self.angle, self.controls)
        return self


def single_qubit_matrix(kind: str, angle: float = 0.0) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    if kind == H:
        return _H_MATRIX
    if kind in (X, CX):
        return _X_MATRIX
    if kind == RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == RZ:
        return np.array([[c - 1j * s, 0], [0, c + 1j * s]], dtype=complex)
    if kind == PHASE:
        return np.array([[1, 0], [0, np.exp(1j * angle)]], dtype=complex)
    raise CircuitError(f"{kind} has no 2x2 matrix")


@dataclass
class Circuit:
    """Ordered gate list on ``width`` qubits plus an accumulated global phase."""

    width: int
    gates: list[Gate] = field(default_factory=list)
    global_phase: float = 0.0

    def __post_init__(self) -> None:
        if self.width < 1:
            raise CircuitError("circuit width must be at least 1")
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if any(q < 0 or q >= self.width for q in gate.qubits):
            raise CircuitError(f"gate {gate} addresses a qubit outside width {self.width}")

    def append(self, gate: Gate) -> "Circuit":
        self._check(gate)
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[Gate]) -> "Circuit":
        for g in gates:
            self.append(g)
        return self

    def compose(self, other: "Circuit") -> "Circuit":
        """Append ``other`` after ``self`` (in time order), in place."""
        if other.width != self.width:
            raise CircuitError("cannot compose circuits of different widths")
        self.extend(other.gates)
        self.global_phase += other.global_phase
        return self

    def inverse(self) -> "Circuit":
        return Circuit(
            self.width,
            [g.inverse() for g in reversed(self.gates)],
            -self.global_phase,
        )

    def copy(self) -> "Circuit":
        return Circuit(self.width, list(self.gates), self.global_phase)

    # Convenience builders used throughout the package.
    def h(self, q: int) -> "Circuit":
        return self.append(Gate(H, q))

    def x(self, q: int, controls: Sequence[tuple[int, int]] = ()) -> "Circuit":
        return self.append(Gate(X, q, 0.0, tuple(controls)))

    def cx(self, control: int, target: int) -> "Circuit":
        return self.append(Gate(CX, target, 0.0, ((control, 1),)))

    def rot(self, kind: str, angle: float, q: int,
            controls: Sequence[tuple[int, int]] = ()) -> "Circuit":
        return self.append(Gate(kind, q, float(angle), tuple(controls)))

    def gphase(self, angle: float) -> "Circuit":
        return self.append(Gate(GPHASE, 0, float(angle)))

    def __len__(self) -> int:
        return len(self.gates)


# --------------------------------------------------------------------------
# simulation


def basis_state(width: int, index: int = 0) -> np.ndarray:
    psi = np.zeros(2**width, dtype=complex)
    psi[index] = 1.0
    return psi


def uniform_state(width: int) -> np.ndarray:
    return np.full(2**width, 1 / math.sqrt(2**width), dtype=complex)


def _axis(width: int, qubit: int) -> int:
    # C-order reshape puts the most significant bit on axis 0.
    return width - 1 - qubit


def _apply_inplace(psi: np.ndarray, gate: Gate, width: int) -> None:
    if gate.kind == GPHASE:
        psi *= np.exp(1j * gate.angle)
        return
    tensor = psi.reshape((2,) * width)
    index: list = [slice(None)] * width
    for q, pol in gate.controls:
        index[_axis(width, q)] = pol
    ax = _axis(width, gate.target)
    i0, i1 = list(index), list(index)
    i0[ax], i1[ax] = 0, 1
    i0, i1 = tuple(i0), tuple(i1)
    m = gate.matrix()
    if m[0, 1] == 0 and m[1, 0] == 0:
        if m[0, 0] != 1:
            tensor[i0] *= m[0, 0]
        tensor[i1] *= m[1, 1]
        return
    a0 = tensor[i0].copy()
    a1 = tensor[i1]
    tensor[i0] = m[0, 0] * a0 + m[0, 1] * a1
    tensor[i1] = m[1, 0] * a0 + m[1, 1] * a1


def apply_gate(state: np.ndarray, gate: Gate) -> np.ndarray:
    """Return ``M|state>`` for the (controlled) gate ``M``; the input is not modified."""
    psi = np.array(state, dtype=complex)
    width = _width_of(psi)
    if any(q >= width for q in gate.qubits):
        raise CircuitError(f"gate {gate} does not fit a {width}-qubit state")
    _apply_inplace(psi, gate, width)
    return psi


def _width_of(psi: np.ndarray) -> int:
    n = psi.shape[0]
    width = n.bit_length() - 1
    if psi.ndim != 1 or n != 2**width or width < 1:
        raise CircuitError(f"state length {n} is not a power of two >= 2")
    return width


def simulate(circuit: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    """Apply every gate of ``circuit`` in order, then the circuit's global phase."""
    if initial is None:
        psi = basis_state(circuit.width)
    else:
        psi = np.array(initial, dtype=complex)
        if psi.shape != (2**circuit.width,):
            raise CircuitError(
                f"state of length {psi.shape[0]} does not match width {circuit.width}")
    for g in circuit.gates:
        _apply_inplace(psi, g, circuit.width)
    if circuit.global_phase:
        psi *= np.exp(1j * circuit.global_phase)
    return psi


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary, column by column.  Meant for small widths in tests."""
    dim = 2**circuit.width
    cols = [simulate(circuit, basis_state(circuit.width, j)) for j in range(dim)]
    return np.stack(cols, axis=1)


# --------------------------------------------------------------------------
# phase on a single basis state


def basis_state_phase_gate(width: int, j0: int, phi: float, target: int = 0) -> list[Gate]:
    """Gates implementing ``I + (exp(i phi) - 1)|j0><j0|`` exactly.

    The core is one phased Rz, ``P(phi) = exp(i phi/2) Rz(phi)``, controlled on the
    remaining qubits with polarities equal to the bits of ``j0``.  When the target
    bit of ``j0`` is 0 the core is conjugated by X.  With no controls the phase
    factor is emitted as a ``gphase`` next to a plain Rz.
    """
    if not 0 <= j0 < 2**width:
        raise CircuitError(f"basis index {j0} out of range for width {width}")
    if not 0 <= target < width:
        raise CircuitError(f"target {target} out of range for width {width}")
    if not math.isfinite(phi):
        raise CircuitError("non-finite phase")
    target_bit = (j0 >> target) & 1
    controls = tuple((q, (j0 >> q) & 1) for q in range(width) if q != target)
    if controls:
        core = [Gate(PHASE, target, phi, controls)]
    else:
        core = [Gate(RZ, target, phi), Gate(GPHASE, 0, phi / 2)]
    if target_bit:
        return core
    return [Gate(X, target)] + core + [Gate(X, target)]


# --------------------------------------------------------------------------
# decomposition


def _toffoli(a: int, b: int, t: int) -> list[Gate]:
    tg, tdg = math.pi / 4, -math.pi / 4
    return [
        Gate(H, t),
        Gate(CX, t, 0.0, ((b, 1),)),
        Gate(PHASE, t, tdg),
        Gate(CX, t, 0.0, ((a, 1),)),
        Gate(PHASE, t, tg),
        Gate(CX, t, 0.0, ((b, 1),)),
        Gate(PHASE, t, tdg),
        Gate(CX, t, 0.0, ((a, 1),)),
        Gate(PHASE, b, tg),
        Gate(PHASE, t, tg),
        Gate(H, t),
        Gate(CX, b, 0.0, ((a, 1),)),
        Gate(PHASE, a, tg),
        Gate(PHASE, b, tdg),
        Gate(CX, b, 0.0, ((a, 1),)),
    ]


def _mcx_vchain(ctrls: Sequence[int], target: int, dirty: Sequence[int]) -> list[Gate]:
    """Multi-controlled X with ``len(ctrls) - 2`` borrowed qubits restored on exit."""
    m = len(ctrls)
    anc = list(dirty[: m - 2])
    # Toffoli (c_{i+2}, a_i -> a_{i+1}) ladder; a_{m-2} feeds the real target.
    steps = [(ctrls[m - 1], anc[m - 3], target)]
    steps += [(ctrls[i + 2], anc[i], anc[i + 1]) for i in range(m - 4, -1, -1)]
    base = (ctrls[0], ctrls[1], anc[0])
    seq = steps + [base] + steps[::-1] + steps[1:] + [base] + steps[1:][::-1]
    out: list[Gate] = []
    for a, b, t in seq:
        out += _toffoli(a, b, t)
    return out


def _mcx(ctrls: Sequence[int], target: int, free: Sequence[int]) -> list[Gate]:
    """Positive-polarity multi-controlled X; ``free`` qubits may be borrowed (dirty)."""
    m = len(ctrls)
    if m == 0:
        return [Gate(X, target)]
    if m == 1:
        return [Gate(CX, target, 0.0, ((ctrls[0], 1),))]
    if m == 2:
        return _toffoli(ctrls[0], ctrls[1], target)
    if len(free) >= m - 2:
        return _mcx_vchain(ctrls, target, free)
    if free:
        # Split the controls and route through one borrowed qubit.
        a = free[0]
        m1 = (m + 1) // 2
        c1, c2 = list(ctrls[:m1]), list(ctrls[m1:])
        rest = list(free[1:])
        first = _mcx(c1, a, c2 + [target] + rest)
        second = _mcx(c2 + [a], target, c1 + rest)
        return second + first + second + first
    # Whole register busy: X = H P(pi) H on the target.
    return ([Gate(H, target)]
            + _mc_rotation(PHASE, math.pi, target, list(ctrls), [])
            + [Gate(H, target)])


def _mc_rotation(kind: str, angle: float, target: int, ctrls: list[int],
                 free: list[int]) -> list[Gate]:
    """Positive-polarity multi-controlled rotation in the basic gate set."""
    k = len(ctrls)
    if kind == RX:
        return [Gate(H, target)] + _mc_rotation(RZ, angle, target, ctrls, free) + [Gate(H, target)]
    if k == 0:
        return [Gate(kind, target, angle)]
    if kind == PHASE:
        # P(a) = exp(ia/2) Rz(a): the controlled scalar becomes a phase on the last control.
        last, rest = ctrls[-1], ctrls[:-1]
        return (_mc_rotation(RZ, angle, target, ctrls, free)
                + _mc_rotation(PHASE, angle / 2, last, rest, free + [target]))
    half = angle / 2
    if k == 1:
        c = ctrls[0]
        return [Gate(kind, target, half), Gate(CX, target, 0.0, ((c, 1),)),
                Gate(kind, target, -half), Gate(CX, target, 0.0, ((c, 1),))]
    # X R(-a/2) X = R(a/2) for Ry and Rz, so the last control gates the halves and
    # the remaining controls drive two X flips; the last control is idle during
    # those flips and can be borrowed.
    last, rest = ctrls[-1], ctrls[:-1]
    flip = _mcx(rest, target, [last] + free)
    return (_mc_rotation(kind, half, target, [last], free) + flip
            + _mc_rotation(kind, -half, target, [last], free) + flip)


def _decompose_gate(gate: Gate, width: int) -> list[Gate]:
    if gate.kind == GPHASE:
        return [gate]
    if gate.kind == CX:
        return [gate]
    if not gate.controls:
        if gate.kind == RX:
            return [Gate(H, gate.target), Gate(RZ, gate.target, gate.angle), Gate(H, gate.target)]
        return [gate]
    opened = [q for q, pol in gate.controls if pol == 0]
    ctrls = [q for q, _ in gate.controls]
    used = set(ctrls) | {gate.target}
    free = [q for q in range(width) if q not in used]
    if gate.kind == X:
        body = _mcx(ctrls, gate.target, free)
    elif gate.kind == H:
        # H = Ry(pi/4) Z Ry(-pi/4) and Z = P(pi)
        t = gate.target
        body = ([Gate(RY, t, -math.pi / 4)] + _mc_rotation(PHASE, math.pi, t, ctrls, free)
                + [Gate(RY, t, math.pi / 4)])
    else:
        body = _mc_rotation(gate.kind, gate.angle, gate.target, ctrls, free)
    flips = [Gate(X, q) for q in opened]
    return flips + body + flips


def decompose(circuit: Circuit) -> Circuit:
    """Rewrite into {h, x, cx, ry, rz, p, gphase} with at most one control per gate.

    Multi-controlled gates are expanded without ancillas; idle qubits of the
    register are borrowed in arbitrary states and restored.
    """
    out = Circuit(circuit.width, global_phase=circuit.global_phase)
    for g in circuit.gates:
        out.extend(_decompose_gate(g, circuit.width))
    return out


def is_basic(circuit: Circuit) -> bool:
    return all(g.kind in BASIC_KINDS and (not g.controls or g.kind == CX)
               for g in circuit.gates)


def gate_count(circuit: Circuit, decomposed: bool = True) -> Counter:
    """Histogram of gate kinds, after decomposition unless ``decomposed=False``."""
    c = decompose(circuit) if decomposed else circuit
    hist = Counter({k: 0 for k in sorted(BASIC_KINDS)})
    hist.update(g.kind for g in c.gates)
    return hist


def basic_gate_total(circuit: Circuit) -> int:
    """Number of physical gates after decomposition (``gphase`` excluded)."""
    return sum(1 for g in decompose(circuit).gates if g.kind != GPHASE)


# --------------------------------------------------------------------------
# OpenQASM 3


def export_qasm(circuit: Circuit, register: str = "r") -> str:
    """OpenQASM 3 text for an already decomposed circuit.

    Angles are printed with ``repr`` so the text round-trips at double precision.
    """
    lines = ["OPENQASM 3.0;", 'include "stdgates.inc";', f"qubit[{circuit.width}] {register};"]
    if circuit.global_phase:
        lines.append(f"gphase({circuit.global_phase!r});")
    for g in circuit.gates:
        if g.kind not in BASIC_KINDS or (g.controls and g.kind != CX):
            raise CircuitError(f"cannot export non-basic gate {g}; decompose first")
        if g.kind == GPHASE:
            lines.append(f"gphase({g.angle!r});")
        elif g.kind == CX:
            lines.append(f"cx {register}[{g.controls[0][0]}], {register}[{g.target}];")
        elif g.kind in (H, X):
            lines.append(f"{g.kind} {register}[{g.target}];")
        else:
            lines.append(f"{g.kind}({g.angle!r}) {register}[{g.target}];")
    return "\n".join(lines) + "\n"


_STMT = re.compile(r"^(\w+)(?:\(([^)]*)\))?\s*(.*);$")
_QREF = re.compile(r"\w+\[(\d+)\]")


def reload_emitted(text: str) -> Circuit:
    """Rebuild a circuit from text produced by :func:`export_qasm`.

    Only the statement forms this module emits are understood; this is a
    self-check for exported files, not a general QASM reader.
    """
    width = None
    circuit = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(("OPENQASM", "include")):
            continue
        if line.startswith("qubit["):
            width = int(line[len("qubit["): line.index("]")])
            circuit = Circuit(width)
            continue
        if circuit is None:
            raise CircuitError("statement before register declaration")
        match = _STMT.match(line)
        if not match:
            raise CircuitError(f"unrecognised statement: {line}")
        kind, arg, rest = match.groups()
        qubits = [int(q) for q in _QREF.findall(rest)]
        if kind == GPHASE:
            circuit.gphase(float(arg))
        elif kind == CX:
            circuit.cx(qubits[0], qubits[1])
        elif kind in (H, X):
            circuit.append(Gate(kind, qubits[0]))
        elif kind in (RY, RZ, PHASE):
            circuit.rot(kind, float(arg), qubits[0])
        else:
            raise CircuitError(f"unsupported statement kind {kind}")
    if circuit is None:
        raise CircuitError("no qubit register declared")
    return circuit
