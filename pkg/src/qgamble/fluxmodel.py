"""
Mesoscopic ring Hamiltonian and its reduction to the flux-qubit form.

The ring Hamiltonian has diagonal level energies E_n and off-diagonal entries
``H[m, n] = -hbar/2 * omega[m, n]`` (omega Hermitian, zero diagonal). Restricted
to its two lowest levels it is written as ``-1/2 (eps sz + Delta sx) + shift * I``.

All parameter values used in tests and examples are synthetic.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidSpecError, ReductionInvalidError

HERMITIAN_TOL = 1e-12
DEFAULT_GAP_RATIO = 10.0

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class RingSpec:
    energies: np.ndarray
    couplings: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float).reshape(-1)
        w = np.asarray(self.couplings, dtype=complex)
        n = e.size
        if n < 2:
            raise InvalidSpecError("a ring needs at least 2 levels")
        if w.shape != (n, n):
            raise InvalidSpecError(f"couplings must be {n}x{n}, got {w.shape}")
        if not (np.all(np.isfinite(e)) and np.all(np.isfinite(w))):
            raise InvalidSpecError("energies and couplings must be finite")
        if np.max(np.abs(np.diag(w))) > HERMITIAN_TOL:
            raise InvalidSpecError("couplings must have zero diagonal")
        if np.max(np.abs(w - w.conj().T)) > HERMITIAN_TOL:
            raise InvalidSpecError("couplings must be Hermitian")
        if not (math.isfinite(self.hbar) and self.hbar > 0):
            raise InvalidSpecError("hbar must be positive")
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "couplings", w)
        object.__setattr__(self, "hbar", float(self.hbar))

    @classmethod
    def from_dict(cls, doc: dict) -> "RingSpec":
        """``{"E": [...], "omega": [[...]], "hbar": 1.0}``; complex entries as [re, im]."""
        try:
            energies = doc["E"]
            omega = doc.get("omega")
            hbar = doc.get("hbar", 1.0)
        except (KeyError, TypeError, AttributeError) as exc:
            raise InvalidSpecError(f"malformed ring spec: {exc}") from exc
        n = len(energies)
        if omega is None:
            w = np.zeros((n, n), dtype=complex)
        else:
            try:
                w = np.array([[_complex(v) for v in row] for row in omega], dtype=complex)
            except (TypeError, ValueError) as exc:
                raise InvalidSpecError(f"malformed omega matrix: {exc}") from exc
        return cls(energies, w, float(hbar))

    @classmethod
    def load(cls, path) -> "RingSpec":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidSpecError(f"cannot read ring spec {path}: {exc}") from exc
        return cls.from_dict(doc)


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(float(re), float(im))
    return complex(float(v))


@dataclass(frozen=True)
class TwoLevelParams:
    epsilon: float
    delta: float
    trace_shift: float = 0.0
    gauge_angle: float = 0.0
    gap_ratio: float = math.inf
    diagnostics: dict = field(default_factory=dict, compare=False)

    def matrix(self) -> np.ndarray:
        return -0.5 * (self.epsilon * SIGMA_Z + self.delta * SIGMA_X) + self.trace_shift * np.eye(2)

    def eigenvalues(self) -> tuple[float, float]:
        half = 0.5 * math.hypot(self.epsilon, self.delta)
        return self.trace_shift - half, self.trace_shift + half


def build_hamiltonian(spec: RingSpec) -> np.ndarray:
    h = -0.5 * spec.hbar * spec.couplings
    h[np.diag_indices_from(h)] = spec.energies
    return h


def reduce_two_level(h: np.ndarray, gap_ratio_min: float = DEFAULT_GAP_RATIO) -> TwoLevelParams:
    """Fit the leading 2x2 block of ``h`` to the flux-qubit form.

    The off-diagonal element is made real and non-positive by a sigma_z gauge
    rotation (angle in ``gauge_angle``), so Delta >= 0. The block is accepted when
    every outer level sits at least ``gap_ratio_min`` times the largest coupling
    (Delta, |h[0,k]|, |h[1,k]|) above the higher of the two qubit levels.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    if h.ndim != 2 or h.shape != (n, n) or n < 2:
        raise InvalidSpecError(f"need a square matrix of size >= 2, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > HERMITIAN_TOL:
        raise InvalidSpecError("Hamiltonian is not Hermitian")

    h00, h11, h01 = h[0, 0].real, h[1, 1].real, h[0, 1]
    shift = 0.5 * (h00 + h11)
    epsilon = -2.0 * (h00 - shift)
    delta = 2.0 * abs(h01)
    # h01 = -|h01| exp(i chi); rotating by exp(-i chi sz / 2) removes chi
    gauge = cmath.phase(-h01) if abs(h01) > 0 else 0.0

    ratio = math.inf
    if n > 2:
        gap = float(np.min(h.diagonal().real[2:]) - max(h00, h11))
        scale = max(delta, float(np.max(np.abs(h[:2, 2:]))))
        if scale > 0:
            ratio = gap / scale
        else:
            ratio = math.inf if gap > 0 else 0.0
        if ratio < gap_ratio_min:
            raise ReductionInvalidError(
                f"gap ratio {ratio:.4g} below required {gap_ratio_min:.4g}", ratio, gap_ratio_min
            )
    return TwoLevelParams(
        epsilon=float(epsilon),
        delta=float(delta),
        trace_shift=float(shift),
        gauge_angle=float(gauge),
        gap_ratio=float(ratio),
        diagnostics={"h01": complex(h01), "levels": n},
    )


def evolve(params: TwoLevelParams, t: float, hbar: float = 1.0) -> np.ndarray:
    """exp(-i t H / hbar) for H = -1/2 (eps sz + Delta sx); the trace shift is dropped."""
    omega = math.hypot(params.epsilon, params.delta)
    if omega == 0.0:
        return np.eye(2, dtype=complex)
    nz, nx = params.epsilon / omega, params.delta / omega
    phi = 0.5 * omega * t / hbar
    # H = -(omega/2) n.sigma  ->  U = cos(phi) I + i sin(phi) n.sigma
    return math.cos(phi) * np.eye(2, dtype=complex) + 1j * math.sin(phi) * (nz * SIGMA_Z + nx * SIGMA_X)
