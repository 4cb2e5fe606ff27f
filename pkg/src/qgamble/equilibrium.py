"""
Max-min analysis of the gambling game.

Bob picks ``s = sin^2(theta)``; Alice answers with the preparation that minimizes
his expected gain. ``bob_guarantee`` maximizes that minimum over ``s``.

Alice's inner problem is searched over her full pure-state space with bounded
Nelder-Mead from several low-discrepancy starts. The parametrization is

    alpha = cos p1
    beta  = sin p1 cos p2                 * exp(i q1)
    gamma = sin p1 sin p2 cos p3          * exp(i q2)
    delta = sin p1 sin p2 sin p3          * exp(i q3)

with p in [0, pi/2] and q in [-pi, pi] (alpha carries the fixed global phase).
"""
from __future__ import annotations

import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize, minimize_scalar
from scipy.stats import qmc

from .errors import InvalidArgumentError
from .protocol import AliceStrategy, GameRules, _check_theta

_HALF_PI = math.pi / 2
_BOUNDS = [(0.0, _HALF_PI)] * 3 + [(-math.pi, math.pi)] * 3
_LO = np.array([b[0] for b in _BOUNDS])
_HI = np.array([b[1] for b in _BOUNDS])


@dataclass(frozen=True)
class SearchOptions:
    starts: int = 16
    tolerance: float = 1e-9
    max_evals: int = 20000
    seed: int = 0
    jobs: int = 1
    s_grid: int = 13
    s_min: float = 1e-6
    s_rtol: float = 1e-6

    def __post_init__(self):
        if self.starts < 1:
            raise InvalidArgumentError("need at least one start")
        if self.jobs < 1:
            raise InvalidArgumentError("jobs must be >= 1")
        if self.s_grid < 3:
            raise InvalidArgumentError("s_grid must have at least 3 points")
        if not 0 < self.s_min < 1:
            raise InvalidArgumentError("s_min must lie in (0, 1)")


@dataclass(frozen=True)
class RestrictedStrategy:
    """Weight ``eta`` on |01> in ``sqrt(1-eta)|10> + sqrt(eta)|01>``."""

    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 1.0:
            raise InvalidArgumentError(f"eta must lie in [0, 1], got {self.eta!r}")

    def to_alice(self) -> AliceStrategy:
        return AliceStrategy.restricted(self.eta)


@dataclass(frozen=True)
class BestResponse:
    alice: AliceStrategy
    value: float
    eta: float
    restricted_value: float
    evaluations: int
    converged: bool
    tolerance_achieved: float


@dataclass(frozen=True)
class EquilibriumResult:
    r_prize: float
    theta_star: float
    s_star: float
    guarantee: float
    alice_worst: RestrictedStrategy
    alice_full: AliceStrategy
    evaluations: int
    tolerance_achieved: float
    converged: bool


@dataclass(frozen=True)
class SweepRow:
    r_prize: float
    theta_star: float
    s_star: float
    guarantee: float
    paper_G: float
    ratio: float
    slope: float
    eta_star: float
    converged: bool


@dataclass(frozen=True)
class SweepTable:
    rows: list[SweepRow] = field(default_factory=list)
    slope: float = math.nan
    intercept: float = math.nan


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise InvalidArgumentError(f"eta must lie in [0, 1], got {eta!r}")
    return eta


def restricted_payoff(eta: float, theta: float, rules: GameRules) -> float:
    """Closed-form expected gain for Alice playing ``sqrt(1-eta)|10> + sqrt(eta)|01>``."""
    eta = _check_eta(eta)
    s = math.sin(_check_theta(theta)) ** 2
    return _restricted_payoff_s(eta, s, rules)


def _restricted_payoff_s(eta: float, s: float, rules: GameRules) -> float:
    root = math.sqrt(eta * (1.0 - eta))
    p_b1 = eta * (1.0 - s)
    p_pass = ((1.0 - eta) + 2.0 * s * root + s * s * eta) / (1.0 + s)
    p_fail = s * (math.sqrt(1.0 - eta) - math.sqrt(eta)) ** 2 / (1.0 + s)
    return rules.win_stake * p_b1 + rules.loss_stake * p_pass + rules.r_prize * p_fail


def _amplitudes(x) -> tuple[complex, complex, complex, complex]:
    p1, p2, p3, q1, q2, q3 = x
    s1 = math.sin(p1)
    s12 = s1 * math.sin(p2)
    return (
        complex(math.cos(p1), 0.0),
        s1 * math.cos(p2) * complex(math.cos(q1), math.sin(q1)),
        s12 * math.cos(p3) * complex(math.cos(q2), math.sin(q2)),
        s12 * math.sin(p3) * complex(math.cos(q3), math.sin(q3)),
    )


def _payoff_x(x, s: float, win: float, loss: float, prize: float) -> float:
    # Branch probabilities written out for the rotated register; cross-checked
    # against the circuit simulation in the tests.
    a, b, g, d = _amplitudes(x)
    nb = b.real * b.real + b.imag * b.imag
    nd = d.real * d.real + d.imag * d.imag
    ov = s * b + g
    p_b1 = (nb + nd) * (1.0 - s)
    p_b0 = a.real * a.real + g.real * g.real + g.imag * g.imag + s * (nb + nd)
    p_pass = (ov.real * ov.real + ov.imag * ov.imag) / (1.0 + s)
    p_fail = p_b0 - p_pass
    return win * p_b1 + loss * p_pass + prize * p_fail


def _params_for_eta(eta: float) -> np.ndarray:
    return np.array([_HALF_PI, math.acos(math.sqrt(eta)), 0.0, 0.0, 0.0, 0.0])


def _eta_of(alice: AliceStrategy) -> float:
    nb, ng = abs(alice.beta) ** 2, abs(alice.gamma) ** 2
    return nb / (nb + ng) if nb + ng > 0 else 0.5


def _restricted_minimum(s: float, rules: GameRules) -> tuple[float, float]:
    """(eta, value) minimizing the restricted family at fixed s."""
    res = minimize_scalar(
        _restricted_payoff_s, bounds=(0.0, 1.0), args=(s, rules), method="bounded",
        options={"xatol": 1e-12},
    )
    best = (float(res.x), float(res.fun))
    for eta in (0.0, 0.5, 1.0):
        v = _restricted_payoff_s(eta, s, rules)
        if v < best[1]:
            best = (eta, v)
    return best


def _start_points(opts: SearchOptions) -> np.ndarray:
    sampler = qmc.Halton(d=len(_BOUNDS), scramble=True, seed=opts.seed)
    return _LO + sampler.random(opts.starts) * (_HI - _LO)


def _local_search(x0, s, stakes, tolerance, max_evals):
    res = minimize(
        _payoff_x, np.asarray(x0, dtype=float), args=(s, *stakes), method="Nelder-Mead",
        bounds=_BOUNDS,
        options={"xatol": 1e-7, "fatol": tolerance * 0.1, "maxfev": max_evals},
    )
    spread = float(np.ptp(res.final_simplex[1]))
    return res.x, float(res.fun), int(res.nfev), bool(res.success), spread


def _local_search_task(args):
    return _local_search(*args)


def _best_response_s(s: float, rules: GameRules, opts: SearchOptions, pool: Executor | None) -> BestResponse:
    eta_r, value_r = _restricted_minimum(s, rules)
    stakes = (rules.win_stake, rules.loss_stake, rules.r_prize)
    starts = [_params_for_eta(eta_r)] + list(_start_points(opts))
    tasks = [(x0, s, stakes, opts.tolerance, opts.max_evals) for x0 in starts]
    if pool is not None:
        results = list(pool.map(_local_search_task, tasks))
    else:
        results = [_local_search(*t) for t in tasks]

    best_val = min(r[1] for r in results)
    # tie-break: closest to honest play among minima within tolerance
    chosen = None
    for x, val, _, ok, spread in results:
        if val > best_val + opts.tolerance:
            continue
        alice = AliceStrategy(*_amplitudes(x))
        key = abs(_eta_of(alice) - 0.5)
        if chosen is None or key < chosen[0]:
            chosen = (key, alice, val, ok, spread)
    _, alice, val, ok, spread = chosen
    return BestResponse(
        alice=alice,
        value=val,
        eta=_eta_of(alice),
        restricted_value=value_r,
        evaluations=sum(r[2] for r in results),
        converged=ok and spread <= opts.tolerance,
        tolerance_achieved=spread,
    )


def alice_best_response(theta: float, rules: GameRules, opts: SearchOptions | None = None) -> BestResponse:
    """Alice's preparation minimizing Bob's expected gain against a fixed ``theta``."""
    opts = opts or SearchOptions()
    s = math.sin(_check_theta(theta)) ** 2
    with _maybe_pool(opts.jobs) as pool:
        return _best_response_s(s, rules, opts, pool)


class _maybe_pool:
    def __init__(self, jobs: int):
        self.jobs = jobs
        self.pool = None

    def __enter__(self):
        if self.jobs > 1:
            self.pool = ProcessPoolExecutor(max_workers=self.jobs)
        return self.pool

    def __exit__(self, *exc):
        if self.pool is not None:
            self.pool.shutdown()


def _guarantee(rules: GameRules, opts: SearchOptions, pool: Executor | None) -> EquilibriumResult:
    cache: dict[float, BestResponse] = {}

    def inner(s: float) -> BestResponse:
        s = float(s)
        if s not in cache:
            cache[s] = _best_response_s(s, rules, opts, pool)
        return cache[s]

    grid = np.geomspace(opts.s_min, 1.0, opts.s_grid)
    values = [inner(s).value for s in grid]
    i = int(np.argmax(values))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = minimize_scalar(
        lambda s: -inner(s).value, bounds=(lo, hi), method="bounded",
        options={"xatol": opts.s_rtol * grid[i]},
    )
    s_star = float(res.x)
    if inner(s_star).value < values[i]:
        s_star = float(grid[i])
    br = inner(s_star)
    return EquilibriumResult(
        r_prize=rules.r_prize,
        theta_star=math.asin(math.sqrt(s_star)),
        s_star=s_star,
        guarantee=br.value,
        alice_worst=RestrictedStrategy(br.eta),
        alice_full=br.alice,
        evaluations=sum(b.evaluations for b in cache.values()),
        tolerance_achieved=br.tolerance_achieved,
        converged=br.converged,
    )


def bob_guarantee(rules: GameRules, opts: SearchOptions | None = None) -> EquilibriumResult:
    """Bob's max-min expected gain and the rotation that secures it."""
    opts = opts or SearchOptions()
    if not rules.r_prize > 1:
        raise InvalidArgumentError(f"equilibrium search needs R > 1, got {rules.r_prize!r}")
    with _maybe_pool(opts.jobs) as pool:
        return _guarantee(rules, opts, pool)


def _sweep_row_task(args):
    r, win, loss, opts = args
    return bob_guarantee(GameRules(r, win, loss), opts)


def sweep_R(
    r_values,
    opts: SearchOptions | None = None,
    win_stake: float = 1.0,
    loss_stake: float = -1.0,
) -> SweepTable:
    """One ``bob_guarantee`` per prize, plus the log-log slope of |guarantee| vs R."""
    opts = opts or SearchOptions()
    r_values = [float(r) for r in r_values]
    if any(r <= 1 for r in r_values):
        raise InvalidArgumentError("all prizes must exceed 1")
    if any(b < a for a, b in zip(r_values, r_values[1:])):
        raise InvalidArgumentError("prizes must be sorted ascending")
    if not r_values:
        return SweepTable()

    if opts.jobs > 1 and len(r_values) > 1:
        serial = SearchOptions(**{**opts.__dict__, "jobs": 1})
        with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
            results = list(pool.map(_sweep_row_task, [(r, win_stake, loss_stake, serial) for r in r_values]))
    else:
        results = [bob_guarantee(GameRules(r, win_stake, loss_stake), opts) for r in r_values]

    slope = intercept = math.nan
    if len(results) >= 2:
        x = np.log([r.r_prize for r in results])
        y = np.log([abs(r.guarantee) for r in results])
        slope, intercept = (float(v) for v in np.polyfit(x, y, 1))

    rows = []
    for r in results:
        asymptote = -math.sqrt(2.0 / r.r_prize)
        rows.append(SweepRow(
            r_prize=r.r_prize,
            theta_star=r.theta_star,
            s_star=r.s_star,
            guarantee=r.guarantee,
            paper_G=asymptote,
            ratio=r.guarantee / asymptote,
            slope=slope,
            eta_star=r.alice_worst.eta,
            converged=r.converged,
        ))
    return SweepTable(rows=rows, slope=slope, intercept=intercept)
