# fcopt/core/methods.py
"""
The iterative methods as uniform, trace-producing runners.

Every runner has the signature `(problem, config, stats=None) -> RunTrace`
and records k = 0 (the starting point) followed by one row per iteration.
Runs are single threaded and deterministic.
"""

import math
from typing import Callable, Dict, Optional, Tuple

import numpy as np
import structlog

from fcopt.config.settings import MethodConfig
from fcopt.core import bounds
from fcopt.core.problem import CompositeProblem
from fcopt.core.proximal import run_contracting_prox
from fcopt.core.recording import (
    TraceRecorder, guarded_step, require_bounded, require_finite_constant, require_subhomogeneous
)
from fcopt.core.smooth import hat_beta
from fcopt.core.subproblems import contracted_lmo, cubic_step, full_step, grad_reg_step
from fcopt.exceptions import ConfigError, UndefinedConditionNumberError
from fcopt.statistics import StatisticsTracker
from fcopt.tracing import trace_run
from fcopt.types import MethodId, RunTrace

logger = structlog.get_logger(__name__)

Runner = Callable[..., RunTrace]

BETA_TOLERANCE = 1e-12


# --- Schedules ---


def cgm_gamma(k: int) -> float:
    return 2.0 / (k + 2.0)


def contracting_newton_gamma(k: int) -> float:
    return 3.0 / (k + 3.0)


def fgm_coefficients(A: float) -> Tuple[float, float]:
    """Positive root a of a² − a − A = 0 and the next A."""
    a = (1.0 + math.sqrt(1.0 + 4.0 * A)) / 2.0
    return a, A + a


def uniform_convexity_rate(problem: CompositeProblem, p: int) -> Optional[float]:
    """β̂_p(f) when positive, else None (the problem is only convex)."""
    try:
        value = hat_beta(problem.f, p)
    except UndefinedConditionNumberError:
        return None
    return value if value > 0.0 else None


# --- Basic methods ---


@trace_run(MethodId.RESTRICTED.value)
def run_restricted_basic(problem: CompositeProblem, config: MethodConfig,
                         stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """x_{k+1} = ỹ*_{p,β}(x_k) with β ∈ (0, β̂_p(f)]; linear bound (1 − β)^k gap0."""
    p = config.p
    beta_hat = uniform_convexity_rate(problem, p)
    if beta_hat is None:
        raise ConfigError(f"Restricted method needs uniformly convex components (β̂_{p} > 0).")
    beta = config.beta if config.beta is not None else beta_hat
    if beta > beta_hat * (1.0 + BETA_TOLERANCE):
        raise ConfigError(f"β = {beta:.6g} exceeds β̂_{p}(f) = {beta_hat:.6g}.")
    recorder = TraceRecorder(MethodId.RESTRICTED, problem, p, stats)
    x = problem.x0
    for k in range(1, config.iters + 1):
        result = guarded_step(lambda: full_step(problem, x, p, beta=beta, cfg=config.subproblem, stats=stats),
                              problem, stats, k)
        x_prev, x = x, result.y
        recorder.record(k, x, x_prev, result)
    return recorder.finish(x, bounds.linear_bound(beta, "restricted"), beta=beta, beta_hat=beta_hat)


@trace_run(MethodId.FULL.value)
def run_full_basic(problem: CompositeProblem, config: MethodConfig,
                   stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """
    x_{k+1} = y*_p(x_k). Linear bound with β̂_p in the uniformly convex
    regime, else the k^{-p} bound when D0 and F(L_p(f)) are finite.
    """
    p = config.p
    recorder = TraceRecorder(MethodId.FULL, problem, p, stats)
    x = problem.x0
    for k in range(1, config.iters + 1):
        result = guarded_step(lambda: full_step(problem, x, p, cfg=config.subproblem, stats=stats),
                              problem, stats, k)
        x_prev, x = x, result.y
        recorder.record(k, x, x_prev, result)
    beta_hat = uniform_convexity_rate(problem, p)
    if beta_hat is not None:
        column = bounds.linear_bound(beta_hat, "full-linear")
    else:
        column = bounds.full_convex_bound(problem, p)
    return recorder.finish(x, column, beta_hat=beta_hat)


# --- First-order composite methods ---


@trace_run(MethodId.GM.value)
def run_gm(problem: CompositeProblem, config: MethodConfig,
           stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """Repeated `grad_reg_step` with M = αF(L_1(f)); bound 4αF(L_1(f))D0²/k."""
    require_subhomogeneous(problem, MethodId.GM)
    M = config.alpha * require_finite_constant(problem, 1, MethodId.GM)
    recorder = TraceRecorder(MethodId.GM, problem, 1, stats)
    x = problem.x0
    for k in range(1, config.iters + 1):
        result = guarded_step(lambda: grad_reg_step(problem, x, M, cfg=config.subproblem, stats=stats),
                              problem, stats, k)
        x_prev, x = x, result.y
        recorder.record(k, x, x_prev, result)
    return recorder.finish(x, bounds.gm_bound(problem, config.alpha), M=M)


@trace_run(MethodId.CGM.value)
def run_cgm(problem: CompositeProblem, config: MethodConfig,
            stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """Contracted linear minimization with γ_k = 2/(k + 2); bound 4F(L_1(f))𝒟²/k."""
    require_bounded(problem, MethodId.CGM)
    require_subhomogeneous(problem, MethodId.CGM)
    require_finite_constant(problem, 1, MethodId.CGM)
    recorder = TraceRecorder(MethodId.CGM, problem, 1, stats)
    x = problem.x0
    for k in range(config.iters):
        gamma = cgm_gamma(k)
        result = guarded_step(lambda: contracted_lmo(problem, x, gamma, 1, cfg=config.subproblem, stats=stats),
                              problem, stats, k + 1)
        x_prev, x = x, result.y
        recorder.record(k + 1, x, x_prev, result, gamma=gamma)
    return recorder.finish(x, bounds.cgm_bound(problem))


@trace_run(MethodId.FGM.value)
def run_fgm(problem: CompositeProblem, config: MethodConfig,
            stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """
    The fast gradient method with estimating sequences:

        a_{k+1}² = A_k + a_{k+1},  y_k = (a_{k+1}v_k + A_k x_k)/A_{k+1},
        x_{k+1} = grad_reg_step(y_k, M),  v_{k+1} = x_{k+1} + (A_k/a_{k+1})(x_{k+1} − x_k).

    Records A_k and, when x* is known, ‖x* − v_k‖ for the estimating inequality.
    """
    require_subhomogeneous(problem, MethodId.FGM)
    M = config.alpha * require_finite_constant(problem, 1, MethodId.FGM)
    recorder = TraceRecorder(MethodId.FGM, problem, 1, stats)
    x_star = problem.known_opt_point
    x = problem.x0
    v = problem.x0.copy()
    A = 0.0
    recorder.trace.records[0].extras.update(_fgm_extras(problem, A, v, x_star))
    for k in range(config.iters):
        a, A_next = fgm_coefficients(A)
        y = (a * v + A * x) / A_next
        result = guarded_step(lambda: grad_reg_step(problem, y, M, cfg=config.subproblem, stats=stats),
                              problem, stats, k + 1)
        x_prev, x = x, result.y
        v = x + (A / a) * (x - x_prev)
        A = A_next
        recorder.record(k + 1, x, x_prev, result, **_fgm_extras(problem, A, v, x_star))
    return recorder.finish(x, bounds.fgm_bound(problem, M, config.radius), M=M)


def _fgm_extras(problem: CompositeProblem, A: float, v: np.ndarray, x_star: Optional[np.ndarray]) -> dict:
    extras = {"A": A}
    if x_star is not None:
        extras["dist_v"] = problem.norm.norm(x_star - v)
    return extras


# --- Second-order composite methods ---


@trace_run(MethodId.CUBIC.value)
def run_cubic_newton(problem: CompositeProblem, config: MethodConfig,
                     stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """Repeated `cubic_step` with M = αF(L_2(f)); bound 9(1 + α)F(L_2(f))D0³/(2k²)."""
    require_subhomogeneous(problem, MethodId.CUBIC)
    M = config.alpha * require_finite_constant(problem, 2, MethodId.CUBIC)
    recorder = TraceRecorder(MethodId.CUBIC, problem, 2, stats)
    x = problem.x0
    for k in range(1, config.iters + 1):
        result = guarded_step(lambda: cubic_step(problem, x, M, cfg=config.subproblem, stats=stats),
                              problem, stats, k)
        x_prev, x = x, result.y
        recorder.record(k, x, x_prev, result)
    return recorder.finish(x, bounds.cubic_bound(problem, config.alpha), M=M)


@trace_run(MethodId.CONTRACTING_NEWTON.value)
def run_contracting_newton(problem: CompositeProblem, config: MethodConfig,
                           stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """Contracted second-order model minimization with γ_k = 3/(k + 3); bound 9F(L_2(f))𝒟³/k²."""
    require_bounded(problem, MethodId.CONTRACTING_NEWTON)
    require_subhomogeneous(problem, MethodId.CONTRACTING_NEWTON)
    require_finite_constant(problem, 2, MethodId.CONTRACTING_NEWTON)
    recorder = TraceRecorder(MethodId.CONTRACTING_NEWTON, problem, 2, stats)
    x = problem.x0
    for k in range(config.iters):
        gamma = contracting_newton_gamma(k)
        result = guarded_step(lambda: contracted_lmo(problem, x, gamma, 2, cfg=config.subproblem, stats=stats),
                              problem, stats, k + 1)
        x_prev, x = x, result.y
        recorder.record(k + 1, x, x_prev, result, gamma=gamma)
    return recorder.finish(x, bounds.contracting_newton_bound(problem))


METHOD_REGISTRY: Dict[MethodId, Runner] = {
    MethodId.RESTRICTED: run_restricted_basic,
    MethodId.FULL: run_full_basic,
    MethodId.GM: run_gm,
    MethodId.CGM: run_cgm,
    MethodId.FGM: run_fgm,
    MethodId.CUBIC: run_cubic_newton,
    MethodId.CONTRACTING_NEWTON: run_contracting_newton,
    MethodId.CONTRACTING_PROX: run_contracting_prox,
}


def get_runner(method: MethodId) -> Runner:
    try:
        return METHOD_REGISTRY[MethodId(method)]
    except (KeyError, ValueError) as e:
        raise ConfigError(f"Unknown method '{method}'.") from e
