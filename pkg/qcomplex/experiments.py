"""
End-to-end reproduction of the worked examples and acceptance experiments.

Each stage writes one CSV or JSON table into the output directory with a
manifest sidecar. A stage that fails is logged and reported in the returned
status list; the remaining stages still run.
"""

import logging
import math
import os

import numpy as np
import pandas as pd

from . import config
from .ampquant import check_condition_q, consistency_error, convergence_constant, quantize
from .complexity import (
    SearchStrategy,
    accuracy_budget,
    epsilon_from_q,
    max_coherent_states,
    naive_complexity_state,
    quantum_complexity_h,
    quantum_complexity_state,
)
from .core import StateVector, cnot_indices, conjugate, evolution_operator, ghz_state, paper_h4, paper_hq
from .errors import QComplexError
from .grover import GroverConfig, build_gsa_state, estimate_q, run_gsa
from .symmetry import commutant, is_equilibrium, lemma_column_permutation_check
from .utils.fixtures import random_connected_fixture
from .utils.json_io import write_json
from .utils.manifest import RunManifest

LEMMA_TIMES = (0.3, 0.7, 1.5)
CONVERGENCE_EPSILONS = tuple(2.0 ** -k for k in range(2, 9))


def _write_table(frame: pd.DataFrame, path, manifest: RunManifest):
    frame.to_csv(path, index=False, float_format="%.17g")
    manifest.add_output(path)
    manifest.write_sidecar(path)
    return path


def _write_record(record, path, manifest: RunManifest):
    write_json(path, record)
    manifest.add_output(path)
    manifest.write_sidecar(path)
    return path


# ==========================================
# STAGES
# ==========================================
def canonical_transformation(workers=None):
    h4, hq = paper_h4(), paper_hq()
    report = quantum_complexity_h(h4, SearchStrategy.EXHAUSTIVE, workers=workers)
    return {
        "cnot_conjugation_exact": bool(np.array_equal(conjugate(hq, cnot_indices(2, 0, 1)).entries, h4.entries)),
        "report": report.to_dict(),
    }


def ghz_complexity(workers=None):
    rows = []
    for n in range(2, 7):
        strategy = SearchStrategy.EXHAUSTIVE if n <= 3 else SearchStrategy.HEURISTIC
        report = quantum_complexity_state(ghz_state(n), strategy, workers=workers)
        rows.append({"n": n, "strategy": strategy.value, "naive": report.naive, "quantum": report.quantum})
    return pd.DataFrame(rows)


def gsa_rigidity(n_values=(2, 3), workers=None):
    rows = []
    for n in n_values:
        # n=2 at 3*t0 = pi/2 is a basis state
        t = math.pi / 3.0 if n == 2 else 3.0 * math.asin(2.0 ** (-n / 2.0))
        report = quantum_complexity_state(build_gsa_state(n, 0, t), SearchStrategy.EXHAUSTIVE, workers=workers)
        rows.append({"n": n, "t": t, "naive": report.naive, "quantum": report.quantum,
                     "evaluated": report.candidates_evaluated})
    return pd.DataFrame(rows)


def lemma_sweep(count=50, seed=0):
    rng = np.random.default_rng(seed)
    families = ("full", "cyclic", "swap")
    rows = []
    for k in range(count):
        n = 2 + k % 3
        family = families[k % len(families)]
        H, psi = random_connected_fixture(n, rng, family)
        group = commutant(H, n)
        row = {"fixture": k, "n": n, "family": family, "group_order": group.order,
               "support": len(psi.support()),
               "lemma_h": lemma_column_permutation_check(psi, H, H, group=group).ok,
               "equilibrium_h": is_equilibrium(psi, H)}
        for t in LEMMA_TIMES:
            U = evolution_operator(H, t)
            row[f"lemma_u_{t}"] = lemma_column_permutation_check(psi, U, H, group=group).ok
            row[f"equilibrium_u_{t}"] = is_equilibrium(psi, U)
        rows.append(row)
    return pd.DataFrame(rows)


def quantization_convergence(count=10, seed=1, t=0.7):
    rng = np.random.default_rng(seed)
    rows = []
    for k in range(count):
        H, psi = random_connected_fixture(2, rng, "full")
        U = evolution_operator(H, t)
        for eps in CONVERGENCE_EPSILONS:
            try:
                theta = quantize(psi, U, eps)
                error = consistency_error(psi, U, eps)
                ok, _ = check_condition_q(theta)
                rows.append({"fixture": k, "epsilon": eps, "nu": theta.nu, "quanta": len(theta),
                             "error": error, "bound": 4.0 * eps * psi.dim, "condition_q": ok})
            except QComplexError as e:
                logging.warning(f"Fixture {k} at eps={eps}: {e.code}")
                rows.append({"fixture": k, "epsilon": eps, "nu": None, "quanta": 0,
                             "error": math.nan, "bound": 4.0 * eps * psi.dim, "condition_q": False})
    frame = pd.DataFrame(rows)
    frame["k_fit"] = convergence_constant(frame["epsilon"], frame["error"])
    logging.info(f"Consistency error <= K * eps with fitted K={frame['k_fit'].iloc[0]:.4f}")
    return frame


def grover_analytic(n_values=range(2, 13)):
    rows = []
    for n in n_values:
        run = run_gsa(GroverConfig(n))
        t0 = math.asin(2.0 ** (-n / 2.0))
        for step in run.steps:
            expected = math.sin((2 * step.iteration + 1) * t0) ** 2
            rows.append({"n": n, "iter": step.iteration, "probability": step.success_probability,
                         "analytic": expected, "deviation": abs(step.success_probability - expected)})
    return pd.DataFrame(rows)


def budget_table(q_values=range(1, 21)):
    rows = []
    for Q in q_values:
        eps = epsilon_from_q(Q)
        rows.append({"Q": Q, "epsilon": eps, "max_states": max_coherent_states(eps),
                     "accuracy_at_c1": accuracy_budget(1, Q), "accuracy_at_cq": accuracy_budget(Q, Q)})
    return pd.DataFrame(rows)


def evolution_profile(times=(0.0, 0.4, 0.8, 1.2)):
    """Naive complexity along exp(-i H_q t)|0> for the reduced two-qubit Hamiltonian."""
    hq = paper_hq()
    rows = []
    for t in times:
        state = evolution_operator(hq, t).entries[:, 0]
        rows.append({"t": t, "naive": naive_complexity_state(StateVector(state, 2))[0]})
    return pd.DataFrame(rows)


# ==========================================
# ORCHESTRATOR
# ==========================================
def reproduce(out_dir, quick=False, workers=None):
    """Run every stage, writing tables under ``out_dir``. Returns (written paths, status log)."""
    os.makedirs(out_dir, exist_ok=True)
    workers = config.worker_count() if workers is None else workers
    params = {"quick": quick}
    written, status_log = [], []

    stages = [
        ("canonical.json", lambda: canonical_transformation(workers)),
        ("ghz_complexity.csv", lambda: ghz_complexity(workers)),
        ("gsa_rigidity.csv", lambda: gsa_rigidity((2,) if quick else (2, 3), workers)),
        ("lemma.csv", lambda: lemma_sweep(10 if quick else 50)),
        ("convergence.csv", lambda: quantization_convergence(3 if quick else 10)),
        ("grover_analytic.csv", lambda: grover_analytic(range(2, 9) if quick else range(2, 13))),
        ("grover_n3_eps0.2.csv", lambda: run_gsa(GroverConfig(3, eps_min=0.2)).to_frame()),
        ("estimate_q.csv", lambda: estimate_q(range(2, 15), 2.0 ** -5, workers=workers).to_frame()),
        ("budget.csv", budget_table),
        ("evolution_profile.csv", evolution_profile),
    ]

    for index, (name, stage) in enumerate(stages, start=1):
        path = os.path.join(out_dir, name)
        logging.info(f"[{index}/{len(stages)}] {name}")
        manifest = RunManifest("reproduce", dict(params, stage=name))
        try:
            result = stage()
            if isinstance(result, pd.DataFrame):
                _write_table(result, path, manifest)
            else:
                _write_record(result, path, manifest)
            written.append(path)
            status_log.append(f"{name}: ok")
        except QComplexError as e:
            logging.error(f"Stage {name} failed: {e}")
            status_log.append(f"{name}: failed ({e.code})")

    return written, status_log


if __name__ == "__main__":
    paths, log = reproduce("outputs", quick=True)
    print("\n".join(log))
