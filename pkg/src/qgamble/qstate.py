"""
Dense state-vector engine for up to three qubits.

Wire convention: wires are numbered from the most significant bit, so for the
gambling register A=0, B=1, C=2 and the basis index of |abc> is 4a + 2b + c.
Ket strings therefore read left to right in wire order.

All values are immutable; every operation returns a new state.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, InvalidStateError

MAX_QUBITS = 3
COLLAPSE_FLOOR = 1e-12
NORM_TOL = 1e-9
UNITARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class QubitState:
    """Normalized amplitude vector over the computational basis of ``n_qubits``.

    Inputs whose squared norm is within ``NORM_TOL`` of one are renormalized
    exactly; anything further off raises :class:`InvalidStateError`.
    """

    n_qubits: int
    amps: np.ndarray

    def __post_init__(self):
        if not isinstance(self.n_qubits, (int, np.integer)) or not 1 <= self.n_qubits <= MAX_QUBITS:
            raise InvalidArgumentError(f"n_qubits must be in 1..{MAX_QUBITS}, got {self.n_qubits!r}")
        amps = np.array(self.amps, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.n_qubits:
            raise InvalidArgumentError(
                f"{self.n_qubits} qubits need {2 ** self.n_qubits} amplitudes, got {amps.size}"
            )
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm^2 = {norm2!r} deviates from 1 by more than {NORM_TOL}")
        amps = amps / np.sqrt(norm2)
        amps.setflags(write=False)
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps: Sequence[complex]) -> "QubitState":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        n = int(round(np.log2(amps.size))) if amps.size else 0
        if amps.size == 0 or 2 ** n != amps.size:
            raise InvalidArgumentError(f"amplitude count {amps.size} is not a power of two")
        return cls(n, amps)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def ket(self, tol: float = 1e-12) -> str:
        """Human readable expansion, e.g. ``0.7071|010> + 0.7071|100>``."""
        terms = []
        for idx, a in enumerate(self.amps):
            if abs(a) > tol:
                coeff = f"{a.real:.4g}" if abs(a.imag) <= tol else f"({a.real:.4g}{a.imag:+.4g}j)"
                terms.append(f"{coeff}|{idx:0{self.n_qubits}b}>")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"QubitState({self.ket()})"


@dataclass(frozen=True)
class ProjectionResult:
    pass_prob: float
    fail_prob: float
    passed_state: QubitState | None
    failed_state: QubitState | None


def _normalized(n_qubits: int, vec: np.ndarray) -> QubitState:
    return QubitState(n_qubits, vec / np.linalg.norm(vec))


def new_basis_state(n_qubits: int, basis_index: int) -> QubitState:
    if not isinstance(n_qubits, (int, np.integer)) or not 1 <= n_qubits <= MAX_QUBITS:
        raise InvalidArgumentError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits!r}")
    if not isinstance(basis_index, (int, np.integer)) or not 0 <= basis_index < 2 ** n_qubits:
        raise InvalidArgumentError(f"basis index {basis_index!r} out of range for {n_qubits} qubits")
    amps = np.zeros(2 ** n_qubits, dtype=complex)
    amps[basis_index] = 1.0
    return QubitState(n_qubits, amps)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def _check_wires(wires: Sequence[int], n_qubits: int) -> tuple[int, ...]:
    wires = tuple(int(w) for w in wires)
    if not wires:
        raise InvalidArgumentError("wire list is empty")
    if len(set(wires)) != len(wires):
        raise InvalidArgumentError(f"duplicate wire in {wires}")
    for w in wires:
        if not 0 <= w < n_qubits:
            raise InvalidArgumentError(f"wire {w} out of range for {n_qubits} qubits")
    return wires


def apply_unitary(state: QubitState, u: np.ndarray, wires: Sequence[int]) -> QubitState:
    """Apply ``u`` to ``wires`` (first listed wire is the most significant bit of ``u``)."""
    u = np.asarray(u, dtype=complex)
    wires = _check_wires(wires, state.n_qubits)
    k = len(wires)
    if u.shape != (2 ** k, 2 ** k):
        raise InvalidArgumentError(f"matrix of shape {u.shape} does not act on {k} wire(s)")
    n = state.n_qubits
    psi = state.amps.reshape((2,) * n)
    psi = np.moveaxis(psi, wires, range(k)).reshape(2 ** k, -1)
    psi = (u @ psi).reshape((2,) * n)
    psi = np.moveaxis(psi, range(k), wires).reshape(-1)
    return QubitState(n, psi)


def qubit_probabilities(state: QubitState, wire: int) -> tuple[float, float]:
    """Born probabilities (P(0), P(1)) for a single wire."""
    (wire,) = _check_wires([wire], state.n_qubits)
    probs = state.probabilities().reshape((2,) * state.n_qubits)
    p = np.moveaxis(probs, wire, 0).reshape(2, -1).sum(axis=1)
    return float(p[0]), float(p[1])


def postselect(state: QubitState, wire: int, bit: int) -> tuple[float, QubitState | None]:
    """Probability of reading ``bit`` on ``wire`` and the renormalized conditional state."""
    (wire,) = _check_wires([wire], state.n_qubits)
    if bit not in (0, 1):
        raise InvalidArgumentError(f"bit must be 0 or 1, got {bit!r}")
    n = state.n_qubits
    psi = np.moveaxis(state.amps.reshape((2,) * n), wire, 0).copy()
    psi[1 - bit] = 0.0
    vec = np.moveaxis(psi, 0, wire).reshape(-1)
    prob = float(np.vdot(vec, vec).real)
    if prob < COLLAPSE_FLOOR:
        return prob, None
    return prob, _normalized(n, vec)


def measure_qubit(state: QubitState, wire: int, rand01: float) -> tuple[int, float, QubitState]:
    """Sample a computational-basis measurement of one wire.

    The outcome is 0 iff ``rand01 < P(0)``, so the draw fully determines the result.
    """
    if not 0.0 <= rand01 < 1.0:
        raise InvalidArgumentError(f"rand01 must lie in [0, 1), got {rand01!r}")
    p0, p1 = qubit_probabilities(state, wire)
    bit = 0 if rand01 < p0 else 1
    # branches under the collapse floor are treated as impossible
    if bit == 1 and p1 < COLLAPSE_FLOOR:
        bit = 0
    elif bit == 0 and p0 < COLLAPSE_FLOOR:
        bit = 1
    _, collapsed = postselect(state, wire, bit)
    return bit, (p0, p1)[bit], collapsed


def project(state: QubitState, wires: Sequence[int], target: QubitState) -> ProjectionResult:
    """Binary projective measurement of ``wires`` onto ``target``.

    The passed branch is ``|target><target| (x) I`` applied to the state, the failed
    branch its orthogonal complement; both are returned as full-register states.
    """
    wires = _check_wires(wires, state.n_qubits)
    k = len(wires)
    if target.n_qubits != k:
        raise InvalidArgumentError(f"target has {target.n_qubits} qubits but {k} wires were given")
    n = state.n_qubits
    psi = np.moveaxis(state.amps.reshape((2,) * n), wires, range(k)).reshape(2 ** k, -1)
    t = target.amps
    rest = t.conj() @ psi
    passed = np.outer(t, rest)
    failed = psi - passed
    pass_prob = float(np.vdot(passed, passed).real)
    fail_prob = float(np.vdot(failed, failed).real)

    def back(m):
        return np.moveaxis(m.reshape((2,) * n), range(k), wires).reshape(-1)

    return ProjectionResult(
        pass_prob=pass_prob,
        fail_prob=fail_prob,
        passed_state=_normalized(n, back(passed)) if pass_prob >= COLLAPSE_FLOOR else None,
        failed_state=_normalized(n, back(failed)) if fail_prob >= COLLAPSE_FLOOR else None,
    )


def inner_product(a: QubitState, b: QubitState) -> complex:
    if a.n_qubits != b.n_qubits:
        raise InvalidArgumentError(f"cannot take <a|b> of {a.n_qubits}- and {b.n_qubits}-qubit states")
    return complex(np.vdot(a.amps, b.amps))
