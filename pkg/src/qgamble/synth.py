"""
Exact compilation of Bob's rotation and Alice's preparation into elementary gates.

Gate set: X (qubit flip), Z (phase flip), H, CNOT, plus the parametrized
rotations RY and RZ needed to hit arbitrary angles exactly.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import InvalidArgumentError
from .protocol import AliceStrategy, _check_theta
from .qstate import MAX_QUBITS, QubitState, apply_unitary, new_basis_state

GATE_KINDS = ("X", "Z", "H", "RY", "RZ", "CNOT")
PARAMETRIC = ("RY", "RZ")
VERIFY_TOL = 1e-10
_ANGLE_EPS = 1e-15

_FIXED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "H": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "CNOT": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
}


def ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def rz(angle: float) -> np.ndarray:
    return np.array([[cmath.exp(-0.5j * angle), 0], [0, cmath.exp(0.5j * angle)]], dtype=complex)


@dataclass(frozen=True)
class GateOp:
    kind: str
    wires: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise InvalidArgumentError(f"unknown gate kind {self.kind!r}")
        wires = tuple(int(w) for w in self.wires)
        arity = 2 if self.kind == "CNOT" else 1
        if len(wires) != arity or len(set(wires)) != arity or min(wires) < 0:
            raise InvalidArgumentError(f"{self.kind} needs {arity} distinct non-negative wire(s), got {wires}")
        if (self.kind in PARAMETRIC) != (self.angle is not None):
            raise InvalidArgumentError(f"angle given/missing for {self.kind}")
        if self.angle is not None and not math.isfinite(self.angle):
            raise InvalidArgumentError("gate angle must be finite")
        object.__setattr__(self, "wires", wires)
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    def matrix(self) -> np.ndarray:
        if self.kind == "RY":
            return ry(self.angle)
        if self.kind == "RZ":
            return rz(self.angle)
        return _FIXED[self.kind]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "wires": list(self.wires), "angle": self.angle}


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    ops: tuple[GateOp, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidArgumentError(f"n_qubits must be in 1..{MAX_QUBITS}")
        ops = tuple(self.ops)
        for op in ops:
            if max(op.wires) >= self.n_qubits:
                raise InvalidArgumentError(f"{op.kind} on wires {op.wires} exceeds {self.n_qubits} qubits")
        object.__setattr__(self, "ops", ops)

    def __len__(self):
        return len(self.ops)

    def to_json(self) -> str:
        return json.dumps([op.to_dict() for op in self.ops])

    @classmethod
    def from_json(cls, n_qubits: int, text: str) -> "Circuit":
        return cls(n_qubits, tuple(GateOp(d["kind"], tuple(d["wires"]), d.get("angle")) for d in json.loads(text)))

    def diagram(self, labels: list[str] | None = None) -> str:
        """Plain-text wire diagram, one column per gate."""
        labels = labels or [f"q{i}" for i in range(self.n_qubits)]
        width = max(len(l) for l in labels)
        rows = [f"{l:>{width}}: " for l in labels]
        for op in self.ops:
            if op.kind == "CNOT":
                cells = {op.wires[0]: "@", op.wires[1]: "X"}
                lo, hi = sorted(op.wires)
                for w in range(lo + 1, hi):
                    cells[w] = "|"
            elif op.kind in PARAMETRIC:
                cells = {op.wires[0]: f"{op.kind}({op.angle:.4f})"}
            else:
                cells = {op.wires[0]: op.kind}
            col = max(len(c) for c in cells.values())
            for w in range(self.n_qubits):
                rows[w] += "-" + cells.get(w, "").center(col, "-") + "-"
        return "\n".join(rows)


def _extend(u: np.ndarray, wires: tuple[int, ...], n: int) -> np.ndarray:
    dim = 2 ** n
    cols = [apply_unitary(new_basis_state(n, j), u, wires).amps for j in range(dim)]
    return np.column_stack(cols)


def circuit_unitary(c: Circuit) -> np.ndarray:
    total = np.eye(2 ** c.n_qubits, dtype=complex)
    for op in c.ops:
        total = _extend(op.matrix(), op.wires, c.n_qubits) @ total
    return total


def run_circuit(c: Circuit, state: QubitState | None = None) -> QubitState:
    state = state or new_basis_state(c.n_qubits, 0)
    for op in c.ops:
        state = apply_unitary(state, op.matrix(), op.wires)
    return state


def synth_u(theta: float) -> Circuit:
    """Bob's BC rotation on a 2-qubit circuit (wire 0 = B, wire 1 = C).

    CNOT(B->C) maps span{|01>, |10>} onto the C=1 subspace, where a C-controlled
    RY(-2 theta) on B does the rotation; a second CNOT(B->C) maps back.
    """
    theta = _check_theta(theta)
    if theta == 0.0:
        return Circuit(2)
    # controlled-RY(a) = CNOT(C->B) RY(-a/2) CNOT(C->B) RY(a/2), with a = -2 theta
    return Circuit(2, (
        GateOp("CNOT", (0, 1)),
        GateOp("RY", (0,), -theta),
        GateOp("CNOT", (1, 0)),
        GateOp("RY", (0,), theta),
        GateOp("CNOT", (1, 0)),
        GateOp("CNOT", (0, 1)),
    ))


def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (a, b, c) with u = exp(i phi) RZ(a) RY(b) RZ(c)."""
    u = np.asarray(u, dtype=complex)
    v = u / cmath.sqrt(np.linalg.det(u))
    x, y = v[0, 0], v[1, 0]
    b = 2.0 * math.atan2(abs(y), abs(x))
    sum_ac = -2.0 * cmath.phase(x) if abs(x) > _ANGLE_EPS else 0.0
    diff_ac = 2.0 * cmath.phase(y) if abs(y) > _ANGLE_EPS else 0.0
    a = (sum_ac + diff_ac) / 2.0
    c = (sum_ac - diff_ac) / 2.0
    return a, b, c


def _local_ops(u: np.ndarray, wire: int) -> list[GateOp]:
    a, b, c = zyz_angles(u)
    ops = []
    # circuit order is right-to-left in the matrix product
    for kind, ang in (("RZ", c), ("RY", b), ("RZ", a)):
        if abs(math.remainder(ang, 4 * math.pi)) > _ANGLE_EPS:
            ops.append(GateOp(kind, (wire,), ang))
    return ops


def synth_prep(alice: AliceStrategy) -> Circuit:
    """Circuit on (A, B) preparing Alice's state from |00> up to global phase.

    The amplitude matrix M[a, b] is split as U diag(s0, s1) V^H: RY loads the
    Schmidt weights on A, CNOT(A->B) correlates, then U on A and conj(V) on B.
    """
    m = alice.as_array().reshape(2, 2)
    u, sv, vh = np.linalg.svd(m)
    ops: list[GateOp] = []
    load = 2.0 * math.atan2(sv[1], sv[0])
    if load > _ANGLE_EPS:
        ops.append(GateOp("RY", (0,), load))
        ops.append(GateOp("CNOT", (0, 1)))
    ops += _local_ops(u, 0)
    ops += _local_ops(vh.T, 1)  # conj(V) = (V^H)^T
    return Circuit(2, tuple(ops))


@dataclass(frozen=True)
class VerifyReport:
    distance: float
    ok: bool
    phase: float


def _max_dist(a: np.ndarray, b: np.ndarray, phi: float) -> float:
    return float(np.max(np.abs(a - cmath.exp(1j * phi) * b)))


def verify_circuit(c: Circuit, target, phase_free: bool = True, tol: float = VERIFY_TOL) -> VerifyReport:
    """Max-entry distance between the circuit and ``target``.

    A 2-D target is compared with the full circuit unitary. A 1-D target (state
    vector or QubitState) is compared with the circuit's action on |0...0>.
    """
    if isinstance(target, QubitState):
        target = target.amps
    target = np.asarray(target, dtype=complex)
    full = circuit_unitary(c)
    got = full[:, 0] if target.ndim == 1 else full
    if got.shape != target.shape:
        raise InvalidArgumentError(f"circuit gives shape {got.shape}, target has {target.shape}")
    if not phase_free:
        return VerifyReport(_max_dist(got, target, 0.0), _max_dist(got, target, 0.0) <= tol, 0.0)
    overlap = np.vdot(target, got)
    phi = cmath.phase(overlap) if abs(overlap) > 0 else 0.0
    best = (_max_dist(got, target, phi), phi)
    res = minimize_scalar(lambda p: _max_dist(got, target, p), bounds=(phi - 0.5, phi + 0.5),
                          method="bounded", options={"xatol": 1e-14})
    if res.fun < best[0]:
        best = (float(res.fun), float(res.x))
    dist, phi = best
    return VerifyReport(dist, dist <= tol, math.remainder(phi, 2 * math.pi))
