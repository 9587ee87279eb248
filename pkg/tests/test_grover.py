import math

import numpy as np
import pytest

from qcomplex.core import StateVector
from qcomplex.errors import AllAmplitudesDroppedError, QComplexError
from qcomplex.grover import (
    CSV_COLUMNS,
    GroverConfig,
    SuccessRule,
    build_gsa_state,
    estimate_q,
    gsa_step,
    optimal_iterations,
    run_gsa,
    truncate_renormalize,
)


def _t0(n):
    return math.asin(2.0 ** (-n / 2.0))


# ==========================================
# STATES AND STEPS
# ==========================================
def test_initial_state_is_uniform():
    psi = build_gsa_state(3, 5, _t0(3))
    np.testing.assert_allclose(psi.amps, np.full(8, 2.0 ** -1.5), atol=1e-15)
    assert psi.is_normalized()


def test_quarter_turn_is_target():
    psi = build_gsa_state(2, 1, math.pi / 2)
    np.testing.assert_allclose(psi.amps, [0, 1, 0, 0], atol=1e-15)


def test_one_step_on_n2_hits_target():
    psi = gsa_step(build_gsa_state(2, 0, _t0(2)), 0)
    np.testing.assert_allclose(psi.amps, [1, 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("t", [0.1, 0.4, 1.0])
def test_step_advances_rotation_angle(t):
    n = 4
    stepped = gsa_step(build_gsa_state(n, 3, t), 3)
    expected = build_gsa_state(n, 3, t + 2 * _t0(n))
    np.testing.assert_allclose(stepped.amps, expected.amps, atol=1e-12)


def test_optimal_iterations():
    assert optimal_iterations(2) == 1
    assert optimal_iterations(3) == 2
    assert GroverConfig(10).iteration_count == 25


# ==========================================
# TRUNCATION
# ==========================================
def test_zero_cutoff_is_identity(gsa3):
    out, dropped = truncate_renormalize(gsa3, 0.0)
    assert out is gsa3 and dropped == 0


def test_cutoff_after_first_iteration_leaves_target(gsa3):
    out, dropped = truncate_renormalize(gsa3, 0.2)
    np.testing.assert_allclose(out.amps, np.eye(8)[0])
    assert dropped == 7


def test_all_dropped_is_reported():
    with pytest.raises(AllAmplitudesDroppedError):
        truncate_renormalize(build_gsa_state(2, 0, _t0(2)), 0.6)


def test_boundary_amplitudes_survive():
    psi = StateVector.from_amplitudes(np.full(4, 0.5))
    out, dropped = truncate_renormalize(psi, 0.5)
    assert dropped == 0
    assert len(out.support()) == 4


def test_truncation_never_grows_support():
    rng = np.random.default_rng(5)
    for _ in range(20):
        amps = rng.normal(size=16) + 1j * rng.normal(size=16)
        psi = StateVector.from_amplitudes(amps / np.linalg.norm(amps))
        out, _ = truncate_renormalize(psi, 0.2)
        assert len(out.support()) <= len(psi.support())
        assert out.is_normalized()


# ==========================================
# RUNS
# ==========================================
def test_n2_run_succeeds_at_first_iteration():
    run = run_gsa(GroverConfig(2))
    assert run.success_iteration == 1
    assert run.final_success_probability == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", range(2, 13))
def test_untruncated_run_matches_rotation(n):
    run = run_gsa(GroverConfig(n))
    t0 = _t0(n)
    for step in run.steps:
        assert abs(step.success_probability - math.sin((2 * step.iteration + 1) * t0) ** 2) <= 1e-9


def test_untruncated_state_keeps_two_amplitude_values():
    cfg = GroverConfig(5, target=9)
    psi = build_gsa_state(5, 9, cfg.t0)
    for _ in range(cfg.iteration_count):
        psi = gsa_step(psi, 9)
        off_target = np.delete(psi.amps, 9)
        assert np.ptp(off_target.real) <= 1e-12


def test_cutoff_gives_early_success_for_n3():
    truncated = run_gsa(GroverConfig(3, eps_min=0.2))
    baseline = run_gsa(GroverConfig(3))
    assert truncated.success_iteration == 1
    assert truncated.steps[1].success_probability == pytest.approx(1.0)
    assert truncated.steps[1].dropped == 7
    assert baseline.config.iteration_count == 2
    assert baseline.steps[1].success_probability == pytest.approx(math.sin(3 * _t0(3)) ** 2)


@pytest.mark.parametrize("n", range(3, 11))
def test_cutoff_just_above_first_off_target_amplitude(n):
    t0 = _t0(n)
    alpha = math.cos(3 * t0) / math.sqrt(2 ** n - 1)
    run = run_gsa(GroverConfig(n, eps_min=alpha * 1.01))
    assert run.success_iteration == 1


def test_collapse_is_recorded_not_raised():
    run = run_gsa(GroverConfig(3, eps_min=0.95))
    assert run.collapsed
    assert run.collapse_iteration == 1
    assert len(run.steps) == 1


def test_jump_rule():
    run = run_gsa(GroverConfig(6, success_rule="jump"))
    assert run.config.success_rule is SuccessRule.JUMP
    assert run.success_iteration == 1


def test_runs_are_deterministic_with_jitter():
    cfg = GroverConfig(6, jitter=0.01, seed=3)
    first, second = run_gsa(cfg).to_frame(), run_gsa(cfg).to_frame()
    assert first.equals(second)
    assert not first.equals(run_gsa(GroverConfig(6)).to_frame())


def test_frame_columns():
    frame = run_gsa(GroverConfig(3)).to_frame()
    assert list(frame.columns) == CSV_COLUMNS
    assert frame["iter"].tolist() == [0, 1, 2]


def test_bad_target_is_rejected():
    with pytest.raises(QComplexError):
        GroverConfig(2, target=4)


# ==========================================
# Q ESTIMATE
# ==========================================
def test_estimate_q_for_eps_two_to_minus_five():
    estimate = estimate_q(range(2, 15), 2.0 ** -5)
    assert estimate.predicted_q == 11
    assert abs(estimate.predicted_q - estimate.reference_q) <= 1
    assert estimate.observed_onset is not None
    assert len(estimate.rows) == 13


def test_estimate_q_control_has_no_breakdown():
    estimate = estimate_q(range(2, 10), 0.0)
    assert estimate.predicted_q is None
    assert estimate.observed_onset is None


def test_estimate_q_boundary_keeps_n2():
    estimate = estimate_q(range(2, 7), 0.5)
    assert not estimate.rows[0]["below_quantum"]
    assert estimate.predicted_q == 3


# ==========================================
# OBSERVED AMPLITUDES
# ==========================================
def test_alpha_matches_rotation_without_noise():
    run = run_gsa(GroverConfig(5))
    t0 = _t0(5)
    for step in run.steps:
        expected = abs(math.cos((2 * step.iteration + 1) * t0)) / math.sqrt(31)
        assert step.alpha_modulus == pytest.approx(expected, abs=1e-12)


def test_alpha_is_mean_of_jittered_off_target_moduli():
    cfg = GroverConfig(3, iterations=1, jitter=0.2, seed=4)
    psi = gsa_step(build_gsa_state(3, 0, cfg.t0), 0)
    noisy = psi.amps * (1.0 + 0.2 * np.random.default_rng(4).standard_normal(8))
    noisy /= np.linalg.norm(noisy)
    off_target = np.abs(noisy[1:])
    step = run_gsa(cfg).steps[1]
    assert step.alpha_modulus == pytest.approx(off_target.mean(), abs=1e-12)
    rms = math.sqrt((1.0 - step.success_probability) / 7)
    assert step.alpha_modulus < rms


def test_alpha_is_zero_once_off_target_amplitudes_are_dropped():
    run = run_gsa(GroverConfig(3, eps_min=0.2))
    assert run.steps[1].alpha_modulus == 0.0
