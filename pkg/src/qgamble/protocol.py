"""
The quantum gambling game on three qubits A, B (Bob's) and C (Bob's ancilla).

Round structure:

1. Alice prepares ``alpha|00> + beta|01> + gamma|10> + delta|11>`` on AB; C starts in |0>.
2. Bob rotates BC by ``bob_rotation(theta)``.
3. Bob measures B. Reading 1 wins him ``win_stake``.
4. On B = 0, AC is projected onto ``verification_state(theta)``. Passing pays
   ``loss_stake`` (Bob loses), failing pays Bob the prize ``R``.

Random streams: a round consumes one uniform draw for the B measurement and a second
one for the verification only when it is reached. ``simulate`` splits its rounds into
fixed-size shards; shard ``k`` draws from ``PCG64(SeedSequence([seed, k]))`` so the
aggregates do not depend on how many worker processes are used.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .errors import InvalidArgumentError, InvalidStrategyError
from .qstate import (
    COLLAPSE_FLOOR,
    QubitState,
    apply_unitary,
    measure_qubit,
    postselect,
    project,
    qubit_probabilities,
)

WIRE_A, WIRE_B, WIRE_C = 0, 1, 2
STRATEGY_TOL = 1e-9
SHARD_ROUNDS = 1 << 16
_DRAW_BLOCK = 1 << 14


@dataclass(frozen=True)
class AliceStrategy:
    """Amplitudes of |00>, |01>, |10>, |11> on wires A, B."""

    alpha: complex
    beta: complex
    gamma: complex
    delta: complex

    def __post_init__(self):
        vals = [complex(v) for v in (self.alpha, self.beta, self.gamma, self.delta)]
        if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in vals):
            raise InvalidStrategyError("strategy amplitudes must be finite")
        norm2 = sum(abs(v) ** 2 for v in vals)
        if abs(norm2 - 1.0) > STRATEGY_TOL:
            raise InvalidStrategyError(f"strategy norm^2 = {norm2!r}, expected 1")
        scale = 1.0 / math.sqrt(norm2)
        for name, v in zip(("alpha", "beta", "gamma", "delta"), vals):
            object.__setattr__(self, name, v * scale)

    @classmethod
    def honest(cls) -> "AliceStrategy":
        h = 1.0 / math.sqrt(2.0)
        return cls(0.0, h, h, 0.0)

    @classmethod
    def restricted(cls, eta: float) -> "AliceStrategy":
        """``sqrt(1-eta)|10> + sqrt(eta)|01>``; eta = 1/2 is honest play."""
        if not 0.0 <= eta <= 1.0:
            raise InvalidArgumentError(f"eta must lie in [0, 1], got {eta!r}")
        return cls(0.0, math.sqrt(eta), math.sqrt(1.0 - eta), 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma, self.delta], dtype=complex)


@dataclass(frozen=True)
class BobStrategy:
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_theta(self.theta))

    @classmethod
    def from_s(cls, s: float) -> "BobStrategy":
        if not 0.0 <= s <= 1.0:
            raise InvalidArgumentError(f"s = sin^2(theta) must lie in [0, 1], got {s!r}")
        return cls(math.asin(math.sqrt(s)))

    @property
    def s(self) -> float:
        return math.sin(self.theta) ** 2


@dataclass(frozen=True)
class GameRules:
    r_prize: float
    win_stake: float = 1.0
    loss_stake: float = -1.0

    def __post_init__(self):
        if not (math.isfinite(self.r_prize) and self.r_prize > 0):
            raise InvalidArgumentError(f"prize R must be positive, got {self.r_prize!r}")
        for name in ("win_stake", "loss_stake"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")


@dataclass(frozen=True)
class PayoffBreakdown:
    p_b1: float
    p_pass: float
    p_fail: float
    expected_gain: float


class Verification(enum.Enum):
    PASSED = "passed"
    FAILED = "failed"
    NOT_RUN = "not_run"


@dataclass(frozen=True)
class RoundOutcome:
    b_bit: int
    verification: Verification
    payoff: float


@dataclass(frozen=True)
class SimulationSummary:
    n_rounds: int
    seed: int
    mean_payoff: float
    std_error: float
    counts: dict = field(default_factory=dict)


class UniformStream(Protocol):
    def random(self) -> float: ...


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not (0.0 <= theta <= math.pi / 2):
        raise InvalidArgumentError(f"theta must lie in [0, pi/2], got {theta!r}")
    return theta


def initial_state(alice: AliceStrategy) -> QubitState:
    amps = np.zeros(8, dtype=complex)
    # C = 0: indices 4a + 2b
    amps[[0, 2, 4, 6]] = alice.as_array()
    return QubitState(3, amps)


def bob_rotation(theta: float) -> np.ndarray:
    """Givens rotation on span{|01>, |10>} of wires (B, C).

    |01> -> cos|01> - sin|10>,  |10> -> sin|01> + cos|10>.  This is the printed
    matrix of the protocol evaluated at -theta; with it honest play always passes
    verification.
    """
    theta = _check_theta(theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [[1, 0, 0, 0],
         [0, c, s, 0],
         [0, -s, c, 0],
         [0, 0, 0, 1]],
        dtype=complex,
    )


def verification_state(theta: float) -> QubitState:
    """Target of Bob's AC projection: (sin(theta)|01> + |10>) / sqrt(1 + sin^2)."""
    theta = _check_theta(theta)
    s = math.sin(theta) ** 2
    amps = np.array([0.0, math.sqrt(s / (1 + s)), math.sqrt(1 / (1 + s)), 0.0], dtype=complex)
    return QubitState(2, amps)


def rotated_state(alice: AliceStrategy, bob: BobStrategy) -> QubitState:
    return apply_unitary(initial_state(alice), bob_rotation(bob.theta), [WIRE_B, WIRE_C])


def _branch_probs(alice: AliceStrategy, bob: BobStrategy) -> tuple[float, float, float, float]:
    """(P(B=0), P(pass | B=0), P(B=1), P(fail | B=0)) from the state engine."""
    psi = rotated_state(alice, bob)
    p_b0, p_b1 = qubit_probabilities(psi, WIRE_B)
    _, cond = postselect(psi, WIRE_B, 0)
    if cond is None:
        return p_b0, 0.0, p_b1, 0.0
    proj = project(cond, [WIRE_A, WIRE_C], verification_state(bob.theta))
    return p_b0, proj.pass_prob, p_b1, proj.fail_prob


def expected_payoff(alice: AliceStrategy, bob: BobStrategy, rules: GameRules) -> PayoffBreakdown:
    p_b0, pass_cond, p_b1, fail_cond = _branch_probs(alice, bob)
    p_pass = p_b0 * pass_cond
    p_fail = p_b0 * fail_cond
    gain = rules.win_stake * p_b1 + rules.loss_stake * p_pass + rules.r_prize * p_fail
    return PayoffBreakdown(p_b1=p_b1, p_pass=p_pass, p_fail=p_fail, expected_gain=gain)


def _pass_threshold(pass_prob: float, fail_prob: float) -> float:
    # branches under the collapse floor are treated as impossible
    if fail_prob < COLLAPSE_FLOOR:
        return 1.0
    if pass_prob < COLLAPSE_FLOOR:
        return 0.0
    return pass_prob


def play_round(alice: AliceStrategy, bob: BobStrategy, rules: GameRules, rng: UniformStream) -> RoundOutcome:
    """Run one round, drawing uniforms from ``rng`` (anything with ``.random()``)."""
    psi = rotated_state(alice, bob)
    bit, _, collapsed = measure_qubit(psi, WIRE_B, rng.random())
    if bit == 1:
        return RoundOutcome(1, Verification.NOT_RUN, rules.win_stake)
    proj = project(collapsed, [WIRE_A, WIRE_C], verification_state(bob.theta))
    passed = rng.random() < _pass_threshold(proj.pass_prob, proj.fail_prob)
    if passed:
        return RoundOutcome(0, Verification.PASSED, rules.loss_stake)
    return RoundOutcome(0, Verification.FAILED, rules.r_prize)


def shard_generator(seed: int, shard: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, shard])))


def _run_shard(p_b0: float, pass_cond: float, seed: int, shard: int, n: int) -> tuple[int, int, int]:
    # Same thresholds as play_round; draws are consumed strictly in sequence.
    rng = shard_generator(seed, shard)
    n_b1 = n_pass = n_fail = 0
    buf = rng.random(_DRAW_BLOCK).tolist()
    pos = 0
    for _ in range(n):
        if pos >= len(buf):
            buf = rng.random(_DRAW_BLOCK).tolist()
            pos = 0
        u = buf[pos]
        pos += 1
        if u >= p_b0:
            n_b1 += 1
            continue
        if pos >= len(buf):
            buf = rng.random(_DRAW_BLOCK).tolist()
            pos = 0
        v = buf[pos]
        pos += 1
        if v < pass_cond:
            n_pass += 1
        else:
            n_fail += 1
    return n_b1, n_pass, n_fail


def _shard_task(args):
    return _run_shard(*args)


def simulate(
    alice: AliceStrategy,
    bob: BobStrategy,
    rules: GameRules,
    n_rounds: int,
    seed: int,
    jobs: int = 1,
) -> SimulationSummary:
    """Monte Carlo estimate of Bob's mean payoff over ``n_rounds`` rounds."""
    if int(n_rounds) != n_rounds or n_rounds < 1:
        raise InvalidArgumentError(f"n_rounds must be a positive integer, got {n_rounds!r}")
    if int(seed) != seed or seed < 0:
        raise InvalidArgumentError(f"seed must be a non-negative integer, got {seed!r}")
    n_rounds, seed = int(n_rounds), int(seed)
    p_b0, pass_cond, p_b1, fail_cond = _branch_probs(alice, bob)
    pass_cond = _pass_threshold(pass_cond, fail_cond)
    # mirror measure_qubit's handling of sub-floor branches
    if p_b0 < COLLAPSE_FLOOR:
        p_b0 = 0.0
    elif p_b1 < COLLAPSE_FLOOR:
        p_b0 = 1.0
    tasks = []
    for k, start in enumerate(range(0, n_rounds, SHARD_ROUNDS)):
        tasks.append((p_b0, pass_cond, seed, k, min(SHARD_ROUNDS, n_rounds - start)))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_shard_task, tasks))
    else:
        results = [_run_shard(*t) for t in tasks]
    n_b1 = sum(r[0] for r in results)
    n_pass = sum(r[1] for r in results)
    n_fail = sum(r[2] for r in results)

    values = (rules.win_stake, rules.loss_stake, rules.r_prize)
    counts = (n_b1, n_pass, n_fail)
    mean = sum(c * v for c, v in zip(counts, values)) / n_rounds
    if n_rounds > 1:
        ss = sum(c * (v - mean) ** 2 for c, v in zip(counts, values))
        std_error = math.sqrt(ss / (n_rounds - 1)) / math.sqrt(n_rounds)
    else:
        std_error = 0.0
    return SimulationSummary(
        n_rounds=n_rounds,
        seed=seed,
        mean_payoff=mean,
        std_error=std_error,
        counts={"b1": n_b1, "pass": n_pass, "fail": n_fail},
    )
