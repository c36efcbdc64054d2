# fcopt/core/subproblems.py
"""
The per-iteration auxiliary problems of every method.

Each operation builds a `ModelObjective` from the problem and an anchor,
hands it to `solve_model` and records metrics. Operations are stateless and
safe to call concurrently on shared problems.
"""

import math
from typing import Optional

import numpy as np
import structlog

from fcopt.config.settings import SubproblemSettings, settings as app_settings
from fcopt.core.outer import SimpleSet
from fcopt.core.problem import CompositeProblem, phi
from fcopt.core.smooth import TaylorModel
from fcopt.core.solvers import ModelObjective, SmoothTerm, solve_model
from fcopt.exceptions import ConfigError, SubproblemError
from fcopt.linalg import Point, as_point
from fcopt.statistics import StatisticsTracker, StatKey
from fcopt.types import SubproblemResult
from fcopt.utils import metrics

logger = structlog.get_logger(__name__)

DOMINANCE_SLACK = 1e-8


def build_objective(problem: CompositeProblem, anchor: Point, order: int, feasible: Optional[SimpleSet] = None,
                    quad: Optional[np.ndarray] = None, cubic: Optional[np.ndarray] = None, weight: float = 1.0,
                    reg_quad: float = 0.0, reg_cubic: float = 0.0, taylor: Optional[TaylorModel] = None,
                    linear: Optional[np.ndarray] = None, constant: float = 0.0, extra: Optional[SmoothTerm] = None,
                    cfg: Optional[SubproblemSettings] = None) -> ModelObjective:
    """
    Assembles a model objective around `anchor`.

    Unless given, the Taylor snapshot is taken from the problem's f, the
    feasible set is Q and the linear term is w·a from the outer function.
    """
    cfg = cfg or app_settings.subproblem
    m = problem.m
    if taylor is None:
        taylor = problem.f.taylor_model(anchor, order)
    if linear is None and problem.outer.linear is not None:
        linear = weight * problem.outer.linear
    return ModelObjective(
        outer=problem.outer, feasible=feasible or problem.Q, norm=problem.norm, taylor=taylor,
        quad=np.zeros(m) if quad is None else np.asarray(quad, dtype=np.float64),
        cubic=np.zeros(m) if cubic is None else np.asarray(cubic, dtype=np.float64),
        weight=weight, linear=linear, constant=constant, reg_quad=reg_quad, reg_cubic=reg_cubic, extra=extra,
        tol=cfg.feasibility_tolerance,
    )


def _finite_constants(problem: CompositeProblem, p: int, operation: str) -> np.ndarray:
    L = problem.f.lipschitz(p)
    if np.any(np.isinf(L)):
        raise ConfigError(f"{operation} needs finite L_{p} for every component; got {L.tolist()}.")
    return L


def _solve(operation: str, problem: CompositeProblem, obj: ModelObjective, cfg: SubproblemSettings,
           dual_tolerance: float, anchor: Point, descent: bool,
           stats: Optional[StatisticsTracker]) -> SubproblemResult:
    try:
        result = solve_model(obj, cfg, dual_tolerance)
    except SubproblemError as e:
        metrics.SUBPROBLEM_FAILURES_TOTAL.labels(operation=operation, error_type=type(e).__name__).inc()
        logger.debug("Subproblem failed.", operation=operation, error=str(e))
        raise
    metrics.SUBPROBLEMS_SOLVED_TOTAL.labels(operation=operation, solver=result.solver).inc()
    metrics.SUBPROBLEM_INNER_ITERATIONS.labels(solver=result.solver).observe(result.inner_iterations)
    if stats is not None:
        stats.add_stat(StatKey.SUBPROBLEMS_SOLVED)
        stats.add_stat(StatKey.INNER_ITERATIONS, result.inner_iterations)
        if result.solver == "dual-ascent":
            stats.add_stat(StatKey.DUAL_ASCENT_SOLVES)
    if cfg.check_dominance:
        _check_dominance(operation, problem, result, anchor, descent)
    logger.debug(
        "Subproblem solved.", operation=operation, solver=result.solver, kkt=result.kkt_residual,
        inner_iterations=result.inner_iterations,
    )
    return result


def _check_dominance(operation: str, problem: CompositeProblem, result: SubproblemResult, anchor: Point,
                     descent: bool) -> None:
    phi_y = phi(problem, result.y)
    if phi_y > result.model_value + DOMINANCE_SLACK * (1.0 + abs(result.model_value)):
        logger.warning("Model dominance violated.", operation=operation, phi_y=phi_y, model_value=result.model_value)
    if descent:
        phi_anchor = phi(problem, anchor)
        if phi_y > phi_anchor + DOMINANCE_SLACK * (1.0 + abs(phi_anchor)):
            logger.warning("Descent violated.", operation=operation, phi_y=phi_y, phi_anchor=phi_anchor)


def full_step_p1(problem: CompositeProblem, x_bar: Point, beta: float = 1.0, restricted: bool = False,
                 cfg: Optional[SubproblemSettings] = None,
                 stats: Optional[StatisticsTracker] = None) -> SubproblemResult:
    """
    Minimizes F(y, f(x̄) + Df(x̄)[y − x̄] + (L_1(f)/2)‖y − x̄‖²) over y.

    With `restricted`, y is confined to {x̄ + β(v − x̄) : v ∈ Q}.
    """
    cfg = cfg or app_settings.subproblem
    x_bar = as_point(x_bar, problem.n, name="x_bar")
    L = _finite_constants(problem, 1, "full_step_p1")
    if not np.any(L > 0.0) and not problem.Q.is_bounded:
        raise ConfigError("full_step_p1 needs a component with L_1 > 0 when Q is unbounded.")
    feasible = problem.Q
    if restricted:
        if not 0.0 < beta <= 1.0:
            raise ConfigError(f"Restricted step needs β in (0, 1], got {beta}.")
        feasible = problem.Q.scaled(beta, (1.0 - beta) * x_bar)
    obj = build_objective(problem, x_bar, order=1, feasible=feasible, quad=L, cfg=cfg)
    return _solve("full_step_p1", problem, obj, cfg, cfg.dual_tolerance, x_bar, True, stats)


def full_step_p2(problem: CompositeProblem, x_bar: Point, restricted_beta: Optional[float] = None,
                 cfg: Optional[SubproblemSettings] = None,
                 stats: Optional[StatisticsTracker] = None) -> SubproblemResult:
    """
    Minimizes F(y, Ω_2(f, x̄; y) + (2L_2(f)/3!)‖y − x̄‖³) over y, optionally
    restricted like `full_step_p1`.
    """
    cfg = cfg or app_settings.subproblem
    x_bar = as_point(x_bar, problem.n, name="x_bar")
    L = _finite_constants(problem, 2, "full_step_p2")
    if not np.any(L > 0.0):
        raise ConfigError("full_step_p2 needs a component with L_2 > 0.")
    feasible = problem.Q
    if restricted_beta is not None:
        if not 0.0 < restricted_beta <= 1.0:
            raise ConfigError(f"Restricted step needs β in (0, 1], got {restricted_beta}.")
        feasible = problem.Q.scaled(restricted_beta, (1.0 - restricted_beta) * x_bar)
    # (2L/3!)r³ = (s/3)r³ with s = L.
    obj = build_objective(problem, x_bar, order=2, feasible=feasible, cubic=L, cfg=cfg)
    return _solve("full_step_p2", problem, obj, cfg, cfg.dual2_tolerance, x_bar, True, stats)


def full_step(problem: CompositeProblem, x_bar: Point, p: int, beta: Optional[float] = None,
              cfg: Optional[SubproblemSettings] = None,
              stats: Optional[StatisticsTracker] = None) -> SubproblemResult:
    """Dispatches to the order-p full (β None) or restricted step."""
    if p == 1:
        return full_step_p1(problem, x_bar, beta=beta or 1.0, restricted=beta is not None, cfg=cfg, stats=stats)
    if p == 2:
        return full_step_p2(problem, x_bar, restricted_beta=beta, cfg=cfg, stats=stats)
    raise ConfigError(f"Order p must be 1 or 2, got {p}.")


def grad_reg_step(problem: CompositeProblem, anchor: Point, M: float,
                  cfg: Optional[SubproblemSettings] = None,
                  stats: Optional[StatisticsTracker] = None) -> SubproblemResult:
    """Minimizes F(y, f(x_k) + ⟨∇f(x_k), y − x_k⟩) + (M/2)‖y − x_k‖² over dom φ."""
    cfg = cfg or app_settings.subproblem
    anchor = as_point(anchor, problem.n, name="anchor")
    if not M > 0.0 or math.isinf(M):
        raise ConfigError(f"grad_reg_step needs a finite M > 0, got {M}.")
    obj = build_objective(problem, anchor, order=1, reg_quad=M, cfg=cfg)
    return _solve("grad_reg_step", problem, obj, cfg, cfg.dual_tolerance, anchor, True, stats)


def contracted_lmo(problem: CompositeProblem, x_k: Point, gamma: float, p: int,
                   cfg: Optional[SubproblemSettings] = None,
                   stats: Optional[StatisticsTracker] = None) -> SubproblemResult:
    """
    Minimizes F(y, Ω_p(f, x_k; y)) subject to x_k + (y − x_k)/γ ∈ Q.

    With γ = 1 this is the plain linear-minimization oracle over Q (p = 1)
    or the full model minimization over Q (p = 2).
    """
    cfg = cfg or app_settings.subproblem
    x_k = as_point(x_k, problem.n, name="x_k")
    if not problem.Q.is_bounded:
        raise ConfigError("contracted_lmo needs a bounded domain (Box or Ball Q).")
    if not 0.0 < gamma <= 1.0:
        raise ConfigError(f"Contraction γ must lie in (0, 1], got {gamma}.")
    if p not in (1, 2):
        raise ConfigError(f"Order p must be 1 or 2, got {p}.")
    feasible = problem.Q.scaled(gamma, (1.0 - gamma) * x_k)
    obj = build_objective(problem, x_k, order=p, feasible=feasible, cfg=cfg)
    result = _solve("contracted_lmo", problem, obj, cfg, cfg.dual_tolerance, x_k, False, stats)
    if result.dual_value is not None:
        gap = result.model_value - result.dual_value
        if abs(gap) > cfg.lmo_gap_tolerance * (1.0 + abs(result.model_value)):
            logger.warning("Contracted step duality gap above tolerance.", gap=gap, solver=result.solver)
    return result


def cubic_step(problem: CompositeProblem, anchor: Point, M: float,
               cfg: Optional[SubproblemSettings] = None,
               stats: Optional[StatisticsTracker] = None) -> SubproblemResult:
    """Minimizes F(y, Ω_2(f, x_k; y)) + (M/6)‖y − x_k‖³ over dom φ."""
    cfg = cfg or app_settings.subproblem
    anchor = as_point(anchor, problem.n, name="anchor")
    if not M > 0.0 or math.isinf(M):
        raise ConfigError(f"cubic_step needs a finite M > 0, got {M}.")
    # (M/6)r³ = (s/3)r³ with s = M/2.
    obj = build_objective(problem, anchor, order=2, reg_cubic=0.5 * M, cfg=cfg)
    return _solve("cubic_step", problem, obj, cfg, cfg.cubic_dual_tolerance, anchor, True, stats)


def solve_objective(operation: str, problem: CompositeProblem, obj: ModelObjective, anchor: Point,
                    cfg: Optional[SubproblemSettings] = None,
                    stats: Optional[StatisticsTracker] = None) -> SubproblemResult:
    """Solves a prebuilt objective with the shared metrics and checks (used by the proximal scheme)."""
    cfg = cfg or app_settings.subproblem
    return _solve(operation, problem, obj, cfg, cfg.cubic_dual_tolerance, anchor, False, stats)
