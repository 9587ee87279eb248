"""
Grover search with an optional minimum-amplitude cutoff.

After every full iteration (oracle + inversion about the mean) amplitudes with modulus
strictly below ``eps_min`` are dropped and the rest renormalized. Sweeping the register
size at a fixed cutoff locates the scale where the uniform amplitude 2^(-n/2) falls
under the cutoff, which estimates the constant Q.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import pandas as pd

from . import config
from .core import StateVector
from .errors import AllAmplitudesDroppedError, QComplexError

MAX_GROVER_QUBITS = 20
CSV_COLUMNS = ["iter", "beta_re", "beta_im", "alpha_modulus", "support_size", "success"]


class SuccessRule(str, Enum):
    HALF = "half"  # |beta|^2 >= 1/2
    JUMP = "jump"  # |beta| - |alpha| >= 1/sqrt(N)


# ==========================================
# CONFIG AND RECORDS
# ==========================================
@dataclass(frozen=True)
class GroverConfig:
    n: int
    target: int = 0
    iterations: object = "optimal"
    eps_min: float = 0.0
    success_rule: SuccessRule = SuccessRule.HALF
    jitter: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GROVER_QUBITS:
            raise QComplexError(f"Grover runs support 1 <= n <= {MAX_GROVER_QUBITS}, got {self.n}", n=self.n)
        if not 0 <= self.target < 2 ** self.n:
            raise QComplexError(f"Target {self.target} outside 0..{2 ** self.n - 1}", target=self.target)
        if self.eps_min < 0 or self.jitter < 0:
            raise QComplexError("eps_min and jitter must be non-negative", eps_min=self.eps_min, jitter=self.jitter)
        if self.iterations != "optimal" and int(self.iterations) < 0:
            raise QComplexError(f"Iteration count must be >= 0, got {self.iterations}")
        object.__setattr__(self, "success_rule", SuccessRule(self.success_rule))

    @property
    def N(self):
        return 2 ** self.n

    @property
    def t0(self):
        return math.asin(1.0 / math.sqrt(self.N))

    @property
    def iteration_count(self):
        if self.iterations == "optimal":
            return optimal_iterations(self.n)
        return int(self.iterations)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    beta: complex
    alpha_modulus: float
    support_size: int
    dropped: int
    renormalized: bool
    success_probability: float
    success: bool


@dataclass
class RunRecord:
    config: GroverConfig
    steps: list = field(default_factory=list)
    collapsed: bool = False
    collapse_iteration: int = None

    @property
    def final_success_probability(self):
        return self.steps[-1].success_probability if self.steps else 0.0

    @property
    def success_iteration(self):
        """First iteration whose state meets the success rule, or None."""
        for step in self.steps:
            if step.success:
                return step.iteration
        return None

    @property
    def renormalization_events(self):
        return sum(1 for step in self.steps if step.renormalized)

    def to_frame(self):
        rows = [
            {
                "iter": step.iteration,
                "beta_re": step.beta.real,
                "beta_im": step.beta.imag,
                "alpha_modulus": step.alpha_modulus,
                "support_size": step.support_size,
                "success": step.success,
            }
            for step in self.steps
        ]
        return pd.DataFrame(rows, columns=CSV_COLUMNS)


# ==========================================
# OPERATIONS
# ==========================================
def optimal_iterations(n):
    return int(math.floor(math.pi / (4.0 * math.asin(2.0 ** (-n / 2.0)))))


def build_gsa_state(n, target, t) -> StateVector:
    """cos(t)/sqrt(N-1) on every non-target basis state and sin(t) on the target."""
    N = 2 ** n
    amps = np.full(N, math.cos(t) / math.sqrt(N - 1), dtype=np.complex128)
    amps[target] = math.sin(t)
    return StateVector(amps, n)


def gsa_step(psi: StateVector, target) -> StateVector:
    """Oracle phase flip on the target, then inversion about the mean."""
    amps = np.array(psi.amps)
    amps[target] = -amps[target]
    return StateVector(2.0 * amps.mean() - amps, psi.n_qubits)


def truncate_renormalize(psi: StateVector, eps_min):
    """Drop amplitudes with |lambda| < eps_min and renormalize. Returns (state, dropped_count)."""
    if eps_min < 0:
        raise QComplexError(f"eps_min must be non-negative, got {eps_min}")
    if eps_min == 0:
        return psi, 0
    moduli = np.abs(psi.amps)
    drop = moduli < eps_min
    dropped = int(np.count_nonzero(drop & (moduli > 0)))
    kept = np.where(drop, 0.0, psi.amps)
    norm = np.linalg.norm(kept)
    if norm == 0.0:
        raise AllAmplitudesDroppedError(
            f"Every amplitude is below eps_min={eps_min}", eps_min=eps_min, dropped=dropped
        )
    return StateVector(kept / norm, psi.n_qubits), dropped


def _observe(psi, cfg, iteration, dropped, renormalized):
    beta = complex(psi.amps[cfg.target])
    probability = abs(beta) ** 2
    moduli = np.abs(psi.amps)
    moduli[cfg.target] = 0.0
    present = int(np.count_nonzero(moduli))
    # mean modulus of the off-target amplitudes still present
    alpha = float(moduli.sum()) / present if present else 0.0
    if cfg.success_rule is SuccessRule.HALF:
        success = probability >= 0.5
    else:
        success = abs(beta) - alpha >= 1.0 / math.sqrt(cfg.N)
    return IterationRecord(
        iteration=iteration,
        beta=beta,
        alpha_modulus=alpha,
        support_size=int(np.count_nonzero(psi.amps)),
        dropped=dropped,
        renormalized=renormalized,
        success_probability=probability,
        success=success,
    )


def run_gsa(cfg: GroverConfig) -> RunRecord:
    rng = np.random.default_rng(cfg.seed) if cfg.jitter > 0 else None
    psi = build_gsa_state(cfg.n, cfg.target, cfg.t0)
    record = RunRecord(cfg)
    record.steps.append(_observe(psi, cfg, 0, 0, False))

    for iteration in range(1, cfg.iteration_count + 1):
        psi = gsa_step(psi, cfg.target)
        if rng is not None:
            noisy = psi.amps * (1.0 + cfg.jitter * rng.standard_normal(cfg.N))
            psi = StateVector(noisy / np.linalg.norm(noisy), cfg.n)
        dropped = 0
        if cfg.eps_min > 0:
            try:
                psi, dropped = truncate_renormalize(psi, cfg.eps_min)
            except AllAmplitudesDroppedError as e:
                logging.info(f"GSA n={cfg.n} collapsed at iteration {iteration}: {e}")
                record.collapsed = True
                record.collapse_iteration = iteration
                break
        record.steps.append(_observe(psi, cfg, iteration, dropped, dropped > 0))

    logging.debug(
        f"GSA n={cfg.n} eps_min={cfg.eps_min}: success at {record.success_iteration}, "
        f"final p={record.final_success_probability:.6f}"
    )
    return record


# ==========================================
# Q ESTIMATION
# ==========================================
@dataclass
class QEstimate:
    eps_min: float
    rows: list
    predicted_q: int = None
    observed_onset: int = None

    @property
    def reference_q(self):
        """-2 log2(eps_min), the Q whose amplitude quantum equals eps_min."""
        return -2.0 * math.log2(self.eps_min) if self.eps_min > 0 else math.inf

    def to_frame(self):
        return pd.DataFrame(self.rows)


def _compare_runs(n, eps_min, target, success_rule):
    baseline = run_gsa(GroverConfig(n, target, "optimal", 0.0, success_rule))
    truncated = run_gsa(GroverConfig(n, target, "optimal", eps_min, success_rule))
    uniform = 2.0 ** (-n / 2.0)
    deviates = (
        truncated.collapsed
        or truncated.success_iteration != baseline.success_iteration
        or abs(truncated.final_success_probability - baseline.final_success_probability) > config.tolerance()
    )
    return {
        "n": n,
        "uniform_amplitude": uniform,
        "below_quantum": uniform < eps_min,
        "optimal_iterations": optimal_iterations(n),
        "baseline_success_iteration": baseline.success_iteration,
        "truncated_success_iteration": truncated.success_iteration,
        "baseline_final_probability": baseline.final_success_probability,
        "truncated_final_probability": truncated.final_success_probability,
        "collapsed": truncated.collapsed,
        "deviates": bool(deviates),
    }


def estimate_q(n_range, eps_min, success_rule=SuccessRule.HALF, target=0, workers=None) -> QEstimate:
    """
    Sweep n at a fixed cutoff. The estimate is the smallest n with 2^(-n/2) < eps_min;
    the first n where the truncated run departs from the standard one is reported next to it.
    """
    if eps_min < 0:
        raise QComplexError(f"eps_min must be non-negative, got {eps_min}")
    n_values = list(n_range)
    workers = config.worker_count() if workers is None else workers
    jobs = [(n, eps_min, target, success_rule) for n in n_values]
    with ThreadPoolExecutor(max_workers=max(1, min(workers, len(jobs)))) as pool:
        rows = list(pool.map(lambda job: _compare_runs(*job), jobs))

    estimate = QEstimate(eps_min, rows)
    estimate.predicted_q = next((row["n"] for row in rows if row["below_quantum"]), None)
    estimate.observed_onset = next((row["n"] for row in rows if row["deviates"]), None)
    logging.info(
        f"Q sweep eps_min={eps_min}: predicted Q={estimate.predicted_q}, observed onset={estimate.observed_onset}"
    )
    return estimate


if __name__ == "__main__":
    run = run_gsa(GroverConfig(n=3, eps_min=0.2))
    print(run.to_frame())
    sweep = estimate_q(range(2, 15), 2.0 ** -5)
    print(sweep.to_frame()[["n", "below_quantum", "deviates"]])
    print("Q estimate:", sweep.predicted_q)
