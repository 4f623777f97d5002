"""End-to-end order reduction: Hankel build, Step 1, Step 2, model assembly.

A run produces a reduced model of the assigned size together with five
divergence diagnostics: the Step-1 objective before and after iterating
(div1b, div1), the Step-2 objective before and after (div2b, div2), and the
final divergence between the original and reduced Hankel matrices
(div_final).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError, ReducibilityError
from .hankel import (
    block_diag_gamma,
    build_factors,
    marginalize_gamma,
    marginalize_pi,
    repackage_pi_tilde,
)
from .hmm import HmmModel, stationary_vector
from .nmf import (
    Step1Config,
    Step2Config,
    divergence,
    random_step1_init,
    random_stochastic,
    step1_factorize,
    step2_gamma,
    step2_pi,
)

STEP2_GAMMA = "gamma"
STEP2_PI = "pi"


@dataclass
class ReductionConfig:
    """Settings of one reduction run.

    target_size is the assigned size N of the reduced model and half_length
    the Hankel parameter n.  Identifiability of the reduced model from its
    Hankel matrix needs n > 2N; smaller n is allowed but warned about.
    """

    target_size: int
    half_length: int = 5
    step2_version: str = STEP2_GAMMA
    step1: Step1Config = field(default_factory=Step1Config)
    step2: Step2Config = field(default_factory=Step2Config)
    # Horizon for div_final; defaults to half_length.
    eval_half_length: Optional[int] = None

    def __post_init__(self):
        if self.target_size < 1:
            raise InputError("target_size must be >= 1")
        if self.half_length < 2:
            raise InputError("half_length must be >= 2 so that the "
                             "half-length n-1 factors exist")
        if self.step2_version not in (STEP2_GAMMA, STEP2_PI):
            raise InputError(f"unknown step2_version {self.step2_version!r}")
        if self.half_length <= 2 * self.target_size:
            warnings.warn(
                f"half_length {self.half_length} <= 2*target_size "
                f"{2 * self.target_size}: the reduced Hankel matrix may not "
                "determine the model uniquely",
                stacklevel=2,
            )

    def with_seed(self, seed: int) -> "ReductionConfig":
        """Copy with both step seeds replaced (explicit inits dropped)."""
        return ReductionConfig(
            target_size=self.target_size,
            half_length=self.half_length,
            step2_version=self.step2_version,
            step1=Step1Config(max_iterations=self.step1.max_iterations,
                              seed=seed, tolerance=self.step1.tolerance),
            step2=Step2Config(max_iterations=self.step2.max_iterations,
                              seed=seed, tolerance=self.step2.tolerance,
                              snapshot_every=self.step2.snapshot_every),
            eval_half_length=self.eval_half_length,
        )


@dataclass
class ReductionResult:
    model_star: HmmModel
    m_concat: np.ndarray  # N x mN, blocks M*(0), ..., M*(m-1)
    div1b: float
    div1: float
    div2b: float
    div2: float
    div_final: float
    step1_trace: list
    step2_trace: list
    config: ReductionConfig


def split_m_concat(m_concat: np.ndarray, m: int) -> list:
    """Split the concatenated [M(0), ..., M(m-1)] into the m square blocks."""
    return [np.array(block) for block in np.split(m_concat, m, axis=1)]


def assemble_model(m_concat: np.ndarray, m: int) -> HmmModel:
    """Validated HMM from a concatenated parameter matrix with unit row sums."""
    Ms = split_m_concat(m_concat, m)
    A = sum(Ms)
    try:
        pi = stationary_vector(A)
    except ReducibilityError as exc:
        exc.m_concat = m_concat
        raise
    return HmmModel(m=m, N=m_concat.shape[0], M=tuple(Ms), pi=pi)


def reduce_model(model: HmmModel, cfg: ReductionConfig) -> ReductionResult:
    """Run the full two-step reduction of `model` to size cfg.target_size."""
    n = cfg.half_length
    N = cfg.target_size
    system = build_factors(model, n)
    H = system.H
    side = H.shape[0]

    step1_cfg = cfg.step1
    if step1_cfg.init is None:
        init = random_step1_init(side, N, side, step1_cfg.seed)
        step1_cfg = Step1Config(max_iterations=step1_cfg.max_iterations,
                                seed=step1_cfg.seed, init=init,
                                tolerance=step1_cfg.tolerance)
    div1b = divergence(H, step1_cfg.init[0] @ step1_cfg.init[1])
    st1 = step1_factorize(H, N, step1_cfg)
    div1 = st1.trace[-1]

    step2_cfg = cfg.step2
    if step2_cfg.init is None:
        init_m = random_stochastic(N, model.m * N, step2_cfg.seed)
        step2_cfg = Step2Config(max_iterations=step2_cfg.max_iterations,
                                seed=step2_cfg.seed, init=init_m,
                                tolerance=step2_cfg.tolerance,
                                snapshot_every=step2_cfg.snapshot_every)

    if cfg.step2_version == STEP2_GAMMA:
        gamma_block = block_diag_gamma(marginalize_gamma(st1.right, model.m),
                                       model.m)
        div2b = divergence(st1.right, step2_cfg.init @ gamma_block)
        st2 = step2_gamma(st1.right, gamma_block, step2_cfg)
        m_concat = st2.left
    else:
        pi_prev = marginalize_pi(st1.left, model.m)
        pi_tilde = repackage_pi_tilde(st1.left, model.m)
        div2b = divergence(pi_tilde, pi_prev @ step2_cfg.init)
        st2 = step2_pi(pi_tilde, pi_prev, step2_cfg)
        m_concat = st2.right
    div2 = st2.trace[-1]

    model_star = assemble_model(m_concat, model.m)
    eval_n = cfg.eval_half_length if cfg.eval_half_length is not None else n
    div_final = final_divergence(model, model_star, eval_n)
    return ReductionResult(
        model_star=model_star,
        m_concat=m_concat,
        div1b=div1b,
        div1=div1,
        div2b=div2b,
        div2=div2,
        div_final=div_final,
        step1_trace=st1.trace,
        step2_trace=st2.trace,
        config=cfg,
    )


def final_divergence(original: HmmModel, reduced: HmmModel, n: int) -> float:
    """Divergence between the two Hankel matrices at half-length n.

    Each Hankel matrix lists every length-2n string probability exactly
    once, so this equals the divergence between the two length-2n string
    distributions.
    """
    if original.m != reduced.m:
        raise InputError(
            f"alphabet mismatch: {original.m} vs {reduced.m} symbols"
        )
    H_orig = build_factors(original, n).H
    H_red = build_factors(reduced, n).H
    return divergence(H_orig, H_red)
