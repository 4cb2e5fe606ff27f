import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgamble.errors import InvalidArgumentError, InvalidStrategyError
from qgamble.protocol import (
    SHARD_ROUNDS,
    AliceStrategy,
    BobStrategy,
    GameRules,
    Verification,
    bob_rotation,
    expected_payoff,
    initial_state,
    play_round,
    shard_generator,
    simulate,
    verification_state,
)
from qgamble.qstate import is_unitary, new_basis_state

from oracles import propagate_by_hand

HONEST = AliceStrategy.honest()
INV_SQRT2 = 1 / math.sqrt(2)


class Draws:
    """Scripted uniform stream."""

    def __init__(self, *values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def random_alice(rng):
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    return AliceStrategy(*(v / np.linalg.norm(v)))


# -- strategies ------------------------------------------------------------

def test_alice_rejects_unnormalized():
    with pytest.raises(InvalidStrategyError):
        AliceStrategy(1, 1, 0, 0)


@pytest.mark.parametrize("theta", [-0.01, math.pi / 2 + 1e-9, math.nan])
def test_bob_rejects_out_of_range(theta):
    with pytest.raises(InvalidArgumentError):
        BobStrategy(theta)


def test_rules_need_positive_prize():
    with pytest.raises(InvalidArgumentError):
        GameRules(0.0)


def test_bob_from_s():
    assert BobStrategy.from_s(0.25).theta == pytest.approx(math.pi / 6)


# -- initial state ---------------------------------------------------------

def test_initial_state_honest():
    expected = np.zeros(8)
    expected[0b010] = expected[0b100] = INV_SQRT2
    np.testing.assert_allclose(initial_state(HONEST).amps, expected, atol=1e-15)


@pytest.mark.parametrize("amps, index", [((1, 0, 0, 0), 0b000), ((0, 0, 0, 1), 0b110)])
def test_initial_state_basis(amps, index):
    np.testing.assert_allclose(initial_state(AliceStrategy(*amps)).amps, new_basis_state(3, index).amps)


# -- rotation and verification target -------------------------------------

def test_rotation_identity_at_zero():
    np.testing.assert_array_equal(bob_rotation(0.0), np.eye(4))


def test_rotation_quarter_turn():
    u = bob_rotation(math.pi / 2)
    np.testing.assert_allclose(u @ new_basis_state(2, 0b10).amps, new_basis_state(2, 0b01).amps, atol=1e-15)
    np.testing.assert_allclose(u @ new_basis_state(2, 0b01).amps, -new_basis_state(2, 0b10).amps, atol=1e-15)


def test_rotation_entry_at_pi_over_6():
    assert bob_rotation(math.pi / 6)[1, 2] == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("theta", np.linspace(0, math.pi / 2, 11))
def test_rotation_is_unitary(theta):
    assert is_unitary(bob_rotation(theta), 1e-12)


def test_rotation_range_check():
    with pytest.raises(InvalidArgumentError):
        bob_rotation(2.0)


def test_verification_state_values():
    np.testing.assert_allclose(verification_state(0).amps, [0, 0, 1, 0])
    np.testing.assert_allclose(verification_state(math.pi / 2).amps, [0, INV_SQRT2, INV_SQRT2, 0], atol=1e-15)
    np.testing.assert_allclose(verification_state(math.pi / 6).amps, [0, math.sqrt(0.2), math.sqrt(0.8), 0],
                               atol=1e-15)


# -- expected payoff -------------------------------------------------------

@pytest.mark.parametrize("r", [0.5, 2.0, 100.0])
def test_payoff_honest_theta_zero(r):
    b = expected_payoff(HONEST, BobStrategy(0.0), GameRules(r))
    assert (b.p_b1, b.p_pass, b.p_fail) == pytest.approx((0.5, 0.5, 0.0), abs=1e-15)
    assert b.expected_gain == pytest.approx(0.0, abs=1e-15)


def test_payoff_honest_pi_over_6():
    # frozen from the ket-propagation oracle: (0.375, 0.625, 0)
    oracle = propagate_by_hand(0, INV_SQRT2, INV_SQRT2, 0, math.pi / 6)
    assert oracle == pytest.approx((0.375, 0.625, 0.0), abs=1e-14)
    b = expected_payoff(HONEST, BobStrategy(math.pi / 6), GameRules(7.0))
    assert (b.p_b1, b.p_pass, b.p_fail) == pytest.approx((0.375, 0.625, 0.0), abs=1e-14)
    assert b.expected_gain == pytest.approx(-0.25, abs=1e-14)


def test_payoff_alice_01_pi_over_6():
    # oracle: (1-s) + s(R-s)/(1+s) at s=1/4, R=2 -> 1.1
    p_b1, p_pass, p_fail = propagate_by_hand(0, 1, 0, 0, math.pi / 6)
    assert p_b1 - p_pass + 2 * p_fail == pytest.approx(1.1, abs=1e-14)
    b = expected_payoff(AliceStrategy(0, 1, 0, 0), BobStrategy(math.pi / 6), GameRules(2.0))
    assert b.expected_gain == pytest.approx(1.1, abs=1e-14)


def test_payoff_alice_10_theta_zero_always_loses():
    b = expected_payoff(AliceStrategy(0, 0, 1, 0), BobStrategy(0.0), GameRules(50.0))
    assert b.expected_gain == pytest.approx(-1.0, abs=1e-15)
    assert b.p_pass == pytest.approx(1.0)


def test_payoff_matches_hand_propagation_on_random_inputs():
    rng = np.random.default_rng(11)
    for _ in range(50):
        alice = random_alice(rng)
        theta = rng.uniform(0, math.pi / 2)
        b = expected_payoff(alice, BobStrategy(theta), GameRules(3.0))
        hand = propagate_by_hand(alice.alpha, alice.beta, alice.gamma, alice.delta, theta)
        assert (b.p_b1, b.p_pass, b.p_fail) == pytest.approx(hand, abs=1e-12)


def test_branch_exhaustiveness_on_grid():
    for eta in np.linspace(0, 1, 20):
        for theta in np.linspace(0, math.pi / 2, 20):
            rules = GameRules(5.0)
            b = expected_payoff(AliceStrategy.restricted(eta), BobStrategy(theta), rules)
            assert abs(b.p_b1 + b.p_pass + b.p_fail - 1) <= 1e-10
            assert abs(b.expected_gain - (b.p_b1 - b.p_pass + 5.0 * b.p_fail)) <= 1e-10


@pytest.mark.parametrize("theta", np.linspace(0, math.pi / 2, 13))
def test_honest_verification_law(theta):
    b = expected_payoff(HONEST, BobStrategy(theta), GameRules(10.0))
    assert b.p_fail <= 1e-12
    assert abs(b.expected_gain + math.sin(theta) ** 2) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), phase=st.floats(-math.pi, math.pi),
       theta=st.floats(0, math.pi / 2))
def test_global_phase_invariance(seed, phase, theta):
    alice = random_alice(np.random.default_rng(seed))
    z = cmath.exp(1j * phase)
    shifted = AliceStrategy(*(z * alice.as_array()))
    a = expected_payoff(alice, BobStrategy(theta), GameRules(4.0))
    b = expected_payoff(shifted, BobStrategy(theta), GameRules(4.0))
    for f in ("p_b1", "p_pass", "p_fail", "expected_gain"):
        assert abs(getattr(a, f) - getattr(b, f)) <= 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), theta=st.floats(0, math.pi / 2), r=st.floats(0.1, 1000))
def test_payoff_affine_in_prize(seed, theta, r):
    alice = random_alice(np.random.default_rng(seed))
    g1 = expected_payoff(alice, BobStrategy(theta), GameRules(r))
    g2 = expected_payoff(alice, BobStrategy(theta), GameRules(2 * r))
    assert g2.expected_gain - g1.expected_gain == pytest.approx(r * g1.p_fail, abs=1e-9)


def test_custom_stakes():
    b = expected_payoff(HONEST, BobStrategy(0.0), GameRules(3.0, win_stake=2.0, loss_stake=-0.5))
    assert b.expected_gain == pytest.approx(0.5 * 2.0 - 0.5 * 0.5)


# -- single rounds ---------------------------------------------------------

def test_round_b_reads_one():
    o = play_round(HONEST, BobStrategy(0.0), GameRules(10.0), Draws(0.9))
    assert (o.b_bit, o.verification, o.payoff) == (1, Verification.NOT_RUN, 1.0)


def test_round_verification_passes():
    o = play_round(HONEST, BobStrategy(0.0), GameRules(10.0), Draws(0.1, 0.5))
    assert (o.b_bit, o.verification, o.payoff) == (0, Verification.PASSED, -1.0)


def test_round_verification_fails():
    o = play_round(AliceStrategy(1, 0, 0, 0), BobStrategy(0.0), GameRules(5.0), Draws(0.0, 0.999))
    assert (o.b_bit, o.verification, o.payoff) == (0, Verification.FAILED, 5.0)


def test_round_consumes_second_draw_only_when_verifying():
    d = Draws(0.9, 0.1)
    play_round(HONEST, BobStrategy(0.0), GameRules(1.0), d)
    assert d.values == [0.1]


def test_honest_round_never_fails_even_at_draw_near_one():
    o = play_round(HONEST, BobStrategy(math.pi / 5), GameRules(10.0), Draws(0.0, 0.9999999999999999))
    assert o.verification is Verification.PASSED


# -- Monte Carlo -----------------------------------------------------------

def test_simulate_matches_play_round_stream():
    alice = AliceStrategy.restricted(0.3)
    bob, rules = BobStrategy(0.7), GameRules(4.0)
    n = 500
    summary = simulate(alice, bob, rules, n, seed=9)
    rng = shard_generator(9, 0)
    outcomes = [play_round(alice, bob, rules, rng) for _ in range(n)]
    assert summary.counts == {
        "b1": sum(o.b_bit for o in outcomes),
        "pass": sum(o.verification is Verification.PASSED for o in outcomes),
        "fail": sum(o.verification is Verification.FAILED for o in outcomes),
    }
    assert summary.mean_payoff == pytest.approx(np.mean([o.payoff for o in outcomes]), abs=1e-12)
    assert summary.std_error == pytest.approx(np.std([o.payoff for o in outcomes], ddof=1) / math.sqrt(n),
                                              rel=1e-9)


def test_simulate_deterministic_branch():
    s = simulate(AliceStrategy(0, 0, 1, 0), BobStrategy(0.0), GameRules(3.0), 100, seed=123)
    assert s.mean_payoff == -1.0
    assert s.counts == {"b1": 0, "pass": 100, "fail": 0}
    assert s.std_error == 0.0


def test_simulate_reproducible_and_seed_sensitive():
    args = (HONEST, BobStrategy(0.4), GameRules(10.0), 20_000)
    assert simulate(*args, seed=5) == simulate(*args, seed=5)
    assert simulate(*args, seed=5).counts != simulate(*args, seed=6).counts


def test_simulate_independent_of_jobs():
    args = (AliceStrategy.restricted(0.45), BobStrategy(0.3), GameRules(20.0), 3 * SHARD_ROUNDS + 17)
    assert simulate(*args, seed=3, jobs=1) == simulate(*args, seed=3, jobs=3)


def test_simulate_honest_theta_zero_mean_zero():
    s = simulate(HONEST, BobStrategy(0.0), GameRules(10.0), 10 ** 6, seed=42)
    assert abs(s.mean_payoff) <= 4 * s.std_error


def test_simulate_honest_pi_over_6():
    s = simulate(HONEST, BobStrategy(math.pi / 6), GameRules(10.0), 10 ** 6, seed=42)
    assert abs(s.mean_payoff + 0.25) <= 4 * s.std_error


def test_simulate_argument_checks():
    with pytest.raises(InvalidArgumentError):
        simulate(HONEST, BobStrategy(0.0), GameRules(1.0), 0, seed=1)
    with pytest.raises(InvalidArgumentError):
        simulate(HONEST, BobStrategy(0.0), GameRules(1.0), 10, seed=-1)
