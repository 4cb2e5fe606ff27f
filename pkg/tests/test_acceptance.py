"""
Acceptance criteria, each at its stated tolerance and runtime limit.

Every test prints a single ``PASS``/``FAIL`` line (visible in ``pytest -v``
output and with ``-s``) before asserting, so the report survives a failure.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

from qgamble.equilibrium import SearchOptions, alice_best_response, restricted_payoff, sweep_R
from qgamble.fluxmodel import RingSpec, TwoLevelParams, build_hamiltonian, evolve, reduce_two_level
from qgamble.protocol import AliceStrategy, BobStrategy, GameRules, bob_rotation, expected_payoff, simulate
from qgamble.synth import synth_prep, synth_u, verify_circuit

from oracles import restricted_refined_min
from test_fluxmodel import random_four_level

SWEEP_R = [1e2, 1e3, 1e4]
TWO_LEVEL_SPEC = Path(__file__).resolve().parents[1] / "docs" / "ring_two_level.json"

MC_CONFIGS = [
    (AliceStrategy.honest(), 0.3, 10.0),
    (AliceStrategy.restricted(0.3), 0.7, 5.0),
    (AliceStrategy(0.6, 0.48, 0.64, 0), math.asin(math.sqrt(0.1)), 5.0),
    (AliceStrategy(0.5, 0.5j, 0.5, -0.5), 1.2, 20.0),
    (AliceStrategy.restricted(0.45), 0.1, 100.0),
]
MC_ROUNDS = 10 ** 6


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail, elapsed, limit=None):
        timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit is not None else "")
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} {name}: {detail}; {timing}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def sweep_serial():
    t0 = time.perf_counter()
    table = sweep_R(SWEEP_R, SearchOptions(seed=0, jobs=1))
    return table, time.perf_counter() - t0


def _run_mc(jobs):
    out = []
    for i, (alice, theta, r) in enumerate(MC_CONFIGS):
        rules, bob = GameRules(r), BobStrategy(theta)
        g = expected_payoff(alice, bob, rules).expected_gain
        for attempt in range(2):  # one retry with a fresh seed is allowed
            s = simulate(alice, bob, rules, MC_ROUNDS, seed=1000 + 10 * i + attempt, jobs=jobs)
            if abs(s.mean_payoff - g) <= 4 * s.std_error:
                break
        out.append((s, g, attempt))
    return out


@pytest.fixture(scope="module")
def mc_serial():
    t0 = time.perf_counter()
    res = _run_mc(1)
    return res, time.perf_counter() - t0


def test_c1_honest_verification_law(report):
    t0 = time.perf_counter()
    worst_fail = worst_gain = 0.0
    for theta in np.linspace(0, math.pi / 2, 50):
        b = expected_payoff(AliceStrategy.honest(), BobStrategy(theta), GameRules(10.0))
        worst_fail = max(worst_fail, b.p_fail)
        worst_gain = max(worst_gain, abs(b.expected_gain + math.sin(theta) ** 2))
    dt = time.perf_counter() - t0
    ok = worst_fail <= 1e-12 and worst_gain <= 1e-10 and dt < 1
    report("C1 honest verification law", ok,
           f"max p_fail={worst_fail:.2e} (<=1e-12), max |G+sin^2|={worst_gain:.2e} (<=1e-10)", dt, 1)


def test_c2_closed_form_agreement(report):
    t0 = time.perf_counter()
    worst = 0.0
    for r in (2.0, 10.0, 100.0):
        rules = GameRules(r)
        for eta in np.linspace(0, 1, 50):
            alice = AliceStrategy.restricted(eta)
            for theta in np.linspace(0, math.pi / 2, 50):
                full = expected_payoff(alice, BobStrategy(theta), rules).expected_gain
                worst = max(worst, abs(restricted_payoff(eta, theta, rules) - full))
    dt = time.perf_counter() - t0
    report("C2 closed-form agreement", worst <= 1e-12 and dt < 5, f"max diff={worst:.2e} (<=1e-12)", dt, 5)


def test_c3_asymptotics(report, sweep_serial):
    table, dt = sweep_serial
    rows = {row.r_prize: row for row in table.rows}
    g4, s4 = rows[1e4].guarantee, rows[1e4].s_star
    g2 = rows[1e2].guarantee
    err_g4 = abs(g4 / -math.sqrt(2 / 1e4) - 1)
    err_s4 = abs(s4 / math.sqrt(1 / 2e4) - 1)
    err_g2 = abs(g2 / -math.sqrt(2 / 1e2) - 1)
    ok = (err_g4 <= 0.05 and err_s4 <= 0.10 and err_g2 <= 0.20
          and abs(table.slope + 0.5) <= 0.03 and dt < 60 and all(r.converged for r in table.rows))
    detail = (f"R=1e4 G={g4:.7f} (rel {err_g4:.2%} <=5%), s*={s4:.7f} (rel {err_s4:.2%} <=10%); "
              f"R=1e2 G={g2:.6f} (rel {err_g2:.2%} <=20%); slope={table.slope:.4f} (-0.5+-0.03)")
    report("C3 asymptotics", ok, detail, dt, 60)


def test_c4_restriction_sufficiency(report):
    t0 = time.perf_counter()
    worst = -math.inf
    for r in (10.0, 100.0, 1000.0):
        rules = GameRules(r)
        for theta in np.linspace(0, math.pi / 2, 20):
            full = alice_best_response(theta, rules).value
            restricted = restricted_refined_min(math.sin(theta) ** 2, r)
            worst = max(worst, restricted - full)
    dt = time.perf_counter() - t0
    report("C4 restriction sufficiency", worst <= 1e-6 and dt < 120,
           f"max(restricted min - full min)={worst:.2e} (<=1e-6)", dt, 120)


def test_c5_monte_carlo(report, mc_serial):
    res, dt = mc_serial
    zs = [abs(s.mean_payoff - g) / s.std_error for s, g, _ in res]
    retries = sum(a for _, _, a in res)
    ok = max(zs) <= 4 and dt < 30
    report("C5 Monte Carlo consistency", ok,
           f"max |mean-G|/se={max(zs):.2f} (<=4) over {len(res)} configs x 1e6 rounds, retries={retries}", dt, 30)


def test_c6_synthesis_fidelity(report):
    t0 = time.perf_counter()
    worst = 0.0
    for theta in np.linspace(0, math.pi / 2, 25):
        worst = max(worst, verify_circuit(synth_u(theta), bob_rotation(theta), phase_free=True).distance)
    rng = np.random.default_rng(12345)
    strategies = [AliceStrategy.honest()]
    for _ in range(100):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        strategies.append(AliceStrategy(*(v / np.linalg.norm(v))))
    for a in strategies:
        worst = max(worst, verify_circuit(synth_prep(a), a.as_array(), phase_free=True).distance)
    dt = time.perf_counter() - t0
    report("C6 synthesis fidelity", worst <= 1e-10 and dt < 5,
           f"max distance={worst:.2e} (<=1e-10) over 25 rotations + 101 preparations", dt, 5)


def test_c7_flux_reduction(report):
    t0 = time.perf_counter()
    spec = RingSpec.load(TWO_LEVEL_SPEC)
    p = reduce_two_level(build_hamiltonian(spec))
    e, w = spec.energies[1] - spec.energies[0], spec.couplings[0, 1].real
    two_err = max(abs(p.epsilon - e), abs(p.delta - spec.hbar * w))

    rng = np.random.default_rng(2026)
    worst_scaled = 0.0
    for _ in range(100):
        h = build_hamiltonian(random_four_level(rng))
        red = reduce_two_level(h, 10)
        full = np.linalg.eigvalsh(h)
        err = np.max(np.abs(full[:2] - red.eigenvalues())) / (full[-1] - full[0])
        worst_scaled = max(worst_scaled, err * red.gap_ratio ** 2)

    d = 0.9
    rabi = max(abs(abs(evolve(TwoLevelParams(0.0, d), t)[1, 0]) ** 2 - math.sin(d * t / 2) ** 2)
               for t in np.linspace(0, 20, 100))
    dt = time.perf_counter() - t0
    ok = two_err <= 1e-12 and worst_scaled <= 5 and rabi <= 1e-9 and dt < 2
    report("C7 flux reduction", ok,
           f"2-level err={two_err:.1e} (<=1e-12), max err*rho^2={worst_scaled:.2f} (<=5), "
           f"Rabi err={rabi:.1e} (<=1e-9)", dt, 2)


def test_c8_determinism(report, sweep_serial, mc_serial):
    t0 = time.perf_counter()
    table4 = sweep_R(SWEEP_R, SearchOptions(seed=0, jobs=4))
    mc4 = _run_mc(4)
    dt = time.perf_counter() - t0
    same_sweep = table4 == sweep_serial[0]
    same_mc = [(s, a) for s, _, a in mc4] == [(s, a) for s, _, a in mc_serial[0]]
    report("C8 determinism", same_sweep and same_mc,
           f"sweep identical={same_sweep}, Monte Carlo identical={same_mc} (jobs 1 vs 4)", dt)
