"""Multi-seed reduction batches, the variability index, and report CSVs.

Reproduces the evaluation protocol of the order-reduction experiments:
repeated runs from random initializations, per-run divergence diagnostics
(table rows), the variability index R of the learned parameters across
runs, and a fixed-Step-1 comparison of the two Step-2 versions.  All
artifacts are emitted as CSV; plotting is out of scope.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import HmmReduceError, InputError, ShapeError
from .hankel import (
    block_diag_gamma,
    build_factors,
    marginalize_gamma,
    marginalize_pi,
    repackage_pi_tilde,
)
from .hmm import HmmModel
from .nmf import (
    Step1Config,
    Step2Config,
    divergence,
    random_stochastic,
    step1_factorize,
    step2_gamma,
    step2_pi,
)
from .pipeline import ReductionConfig, reduce_model


def variability_index(ms: list) -> float:
    """Sum over entries of the unbiased sample variance across the matrices."""
    if len(ms) < 2:
        raise InputError("variability index needs at least 2 matrices")
    arrays = [np.asarray(M, dtype=float) for M in ms]
    if any(M.shape != arrays[0].shape for M in arrays):
        raise ShapeError("matrices must share one shape")
    stack = np.stack(arrays)
    return float(np.var(stack, axis=0, ddof=1).sum())


@dataclass
class RunRecord:
    run: int
    seed: int
    div1b: float = float("nan")
    div1: float = float("nan")
    div2b: float = float("nan")
    div2: float = float("nan")
    div_final: float = float("nan")
    failed: bool = False
    error: str = ""


@dataclass
class ExperimentReport:
    rows: list  # RunRecord per run, in run order
    results: list  # ReductionResult or None for failed runs
    R: Optional[float]  # across-run variability of M*; None when < 2 successes
    mean_step1_trace: Optional[np.ndarray]
    mean_step2_trace: Optional[np.ndarray]
    best_run: Optional[int]  # index of the minimal div_final


def run_batch(model: HmmModel, cfg: ReductionConfig, runs: int,
              base_seed: int, workers: int = 1) -> ExperimentReport:
    """Execute `runs` independent reductions with seeds base_seed + t.

    Each run owns its RNG, so results are independent of scheduling; failed
    runs are recorded and the batch continues.
    """
    if runs < 1:
        raise InputError("need at least one run")

    def one(t: int):
        seed = base_seed + t
        try:
            return t, reduce_model(model, cfg.with_seed(seed)), None
        except HmmReduceError as exc:
            return t, None, exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(one, range(runs)))
    else:
        outcomes = [one(t) for t in range(runs)]
    outcomes.sort(key=lambda o: o[0])

    rows, results = [], []
    for t, res, exc in outcomes:
        rec = RunRecord(run=t, seed=base_seed + t)
        if exc is not None:
            rec.failed = True
            rec.error = f"{type(exc).__name__}: {exc}"
        else:
            rec.div1b, rec.div1 = res.div1b, res.div1
            rec.div2b, rec.div2 = res.div2b, res.div2
            rec.div_final = res.div_final
        rows.append(rec)
        results.append(res)

    ok = [res for res in results if res is not None]
    R = variability_index([res.m_concat for res in ok]) if len(ok) >= 2 else None
    mean1 = _mean_trace([res.step1_trace for res in ok])
    mean2 = _mean_trace([res.step2_trace for res in ok])
    finals = [(rec.div_final, rec.run) for rec in rows if not rec.failed]
    best_run = min(finals)[1] if finals else None
    return ExperimentReport(rows=rows, results=results, R=R,
                            mean_step1_trace=mean1, mean_step2_trace=mean2,
                            best_run=best_run)


def _mean_trace(traces: list) -> Optional[np.ndarray]:
    if not traces:
        return None
    length = min(len(t) for t in traces)
    return np.mean([t[:length] for t in traces], axis=0)


@dataclass
class Step2Comparison:
    """Both Step-2 versions run from one fixed Step-1 output."""

    m_gamma: list  # final M* of each gamma-version run
    m_pi: list
    r_gamma: float
    r_pi: float
    mean_trace_gamma: np.ndarray
    mean_trace_pi: np.ndarray
    mean_gap: float  # max-entry distance between the two across-run means
    checkpoints: list  # iteration counts at which R was sampled
    r_curve_gamma: list  # R at each checkpoint
    r_curve_pi: list
    div2b_gamma: list
    div2b_pi: list


def compare_step2_versions(model: HmmModel, cfg: ReductionConfig, runs: int,
                           base_seed: int,
                           snapshot_every: int = 100) -> Step2Comparison:
    """Fix one Step-1 output and run both Step-2 versions from shared M0 seeds."""
    if runs < 2:
        raise InputError("comparison needs at least 2 runs")
    system = build_factors(model, cfg.half_length)
    st1 = step1_factorize(
        system.H, cfg.target_size,
        Step1Config(max_iterations=cfg.step1.max_iterations, seed=base_seed,
                    tolerance=cfg.step1.tolerance))
    gamma_block = block_diag_gamma(marginalize_gamma(st1.right, model.m),
                                   model.m)
    pi_prev = marginalize_pi(st1.left, model.m)
    pi_tilde = repackage_pi_tilde(st1.left, model.m)

    iters = cfg.step2.max_iterations
    m_gamma, m_pi = [], []
    snaps_gamma, snaps_pi = [], []
    traces_gamma, traces_pi = [], []
    div2b_gamma, div2b_pi = [], []
    for t in range(runs):
        M0 = random_stochastic(cfg.target_size, model.m * cfg.target_size,
                               base_seed + 1 + t)
        sub = Step2Config(max_iterations=iters, seed=base_seed + 1 + t,
                          init=M0, snapshot_every=snapshot_every)
        div2b_gamma.append(divergence(st1.right, M0 @ gamma_block))
        sg = step2_gamma(st1.right, gamma_block, sub)
        m_gamma.append(sg.left)
        snaps_gamma.append(sg.snapshots)
        traces_gamma.append(sg.trace)

        sub = Step2Config(max_iterations=iters, seed=base_seed + 1 + t,
                          init=M0, snapshot_every=snapshot_every)
        div2b_pi.append(divergence(pi_tilde, pi_prev @ M0))
        sp = step2_pi(pi_tilde, pi_prev, sub)
        m_pi.append(sp.right)
        snaps_pi.append(sp.snapshots)
        traces_pi.append(sp.trace)

    n_checkpoints = len(snaps_gamma[0])
    checkpoints = [(k + 1) * snapshot_every for k in range(n_checkpoints)]
    r_curve_gamma = [variability_index([s[k] for s in snaps_gamma])
                     for k in range(n_checkpoints)]
    r_curve_pi = [variability_index([s[k] for s in snaps_pi])
                  for k in range(n_checkpoints)]
    mean_gap = float(np.max(np.abs(np.mean(m_gamma, axis=0)
                                   - np.mean(m_pi, axis=0))))
    return Step2Comparison(
        m_gamma=m_gamma, m_pi=m_pi,
        r_gamma=variability_index(m_gamma), r_pi=variability_index(m_pi),
        mean_trace_gamma=np.mean(traces_gamma, axis=0),
        mean_trace_pi=np.mean(traces_pi, axis=0),
        mean_gap=mean_gap,
        checkpoints=checkpoints,
        r_curve_gamma=r_curve_gamma, r_curve_pi=r_curve_pi,
        div2b_gamma=div2b_gamma, div2b_pi=div2b_pi,
    )


# ---------------------------------------------------------------------------
# CSV emission.  Floats are written with repr (shortest round-trip form) so
# identical runs produce byte-identical files.

def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_table_csv(path, report: ExperimentReport) -> None:
    """Per-run divergence table: RUN, DIV1b, DIV1, DIV2b, DIV2, DIV."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["RUN", "DIV1b", "DIV1", "DIV2b", "DIV2", "DIV"])
        for rec in report.rows:
            if rec.failed:
                w.writerow([rec.run + 1, "failed", rec.error, "", "", ""])
            else:
                w.writerow([rec.run + 1] + [_fmt(v) for v in
                                            (rec.div1b, rec.div1, rec.div2b,
                                             rec.div2, rec.div_final)])


def write_final_divergence_csv(path, report: ExperimentReport) -> None:
    """Final divergence per run; BEST marks the minimal-divergence run."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["RUN", "DIV", "BEST"])
        for rec in report.rows:
            if rec.failed:
                continue
            w.writerow([rec.run + 1, _fmt(rec.div_final),
                        1 if rec.run == report.best_run else 0])


def write_variability_csv(path, cmp: Step2Comparison) -> None:
    """Variability index R against Step-2 iteration count, both versions."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ITERATION", "R_GAMMA", "R_PI"])
        for k, it in enumerate(cmp.checkpoints):
            w.writerow([it, _fmt(cmp.r_curve_gamma[k]), _fmt(cmp.r_curve_pi[k])])


def write_divergence_decay_csv(path, cmp: Step2Comparison) -> None:
    """Across-run mean of the Step-2 divergence trace, both versions."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ITERATION", "DIV_GAMMA", "DIV_PI"])
        for k in range(len(cmp.mean_trace_gamma)):
            w.writerow([k + 1, _fmt(float(cmp.mean_trace_gamma[k])),
                        _fmt(float(cmp.mean_trace_pi[k]))])
