# fcopt/core/proximal.py
"""
The contracting proximal-point scheme with the cubic prox-function

    d(x) = (α/3)‖x − x0‖³,   α = F(L_2(f)),

and its Bregman divergence ρ_d(v; x) = d(x) − d(v) − ⟨∇d(v), x − v⟩.

Outer loop: A_{k+1} = ((k+1)/3)³, γ_k = (A_{k+1} − A_k)/A_{k+1},
h_{k+1}(x) = A_{k+1}φ(γ_k x + (1 − γ_k)x_k) + ρ_d(v_k; x), v_{k+1} ≈ argmin h_{k+1}
by cubic Newton steps on the contracted problem, x_{k+1} = γ_k v_{k+1} + (1 − γ_k)x_k.
"""

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import structlog

from fcopt.config.settings import MethodConfig
from fcopt.core import bounds
from fcopt.core.outer import F_of_constants
from fcopt.core.problem import CompositeProblem, phi
from fcopt.core.recording import TraceRecorder, guarded_step, require_finite_constant, require_subhomogeneous
from fcopt.core.smooth import TaylorModel
from fcopt.core.subproblems import build_objective, cubic_step, solve_objective
from fcopt.linalg import Matrix, NormOperator, Point
from fcopt.statistics import StatisticsTracker, StatKey
from fcopt.tracing import trace_run
from fcopt.types import MethodId, RunTrace

logger = structlog.get_logger(__name__)

INNER_CONTRACTION = 4.0 / 3.0


@dataclass(frozen=True, eq=False)
class CubicProxFunction:
    """d(x) = (α/3)‖x − x0‖³ in the B-norm."""
    alpha: float
    center: Point
    norm: NormOperator

    def value(self, x: Point) -> float:
        return self.alpha / 3.0 * self.norm.norm(x - self.center) ** 3

    def gradient(self, x: Point) -> np.ndarray:
        h = x - self.center
        return self.alpha * self.norm.norm(h) * self.norm.apply(h)

    def hessian(self, x: Point) -> Matrix:
        h = x - self.center
        r = self.norm.norm(h)
        if r == 0.0:
            return np.zeros((h.shape[0], h.shape[0]))
        Bh = self.norm.apply(h)
        return self.alpha * (r * self.norm.matrix + np.outer(Bh, Bh) / r)

    def bregman(self, v: Point, x: Point) -> float:
        """ρ_d(v; x)."""
        return self.value(x) - self.value(v) - float(self.gradient(v) @ (x - v))


@dataclass(frozen=True, eq=False)
class BregmanTerm:
    """x ↦ ρ_d(v; x) as an extra smooth term of a model objective."""
    prox: CubicProxFunction
    v: Point

    def value(self, y: Point) -> float:
        return self.prox.bregman(self.v, y)

    def gradient(self, y: Point) -> np.ndarray:
        return self.prox.gradient(y) - self.prox.gradient(self.v)

    def hessian(self, y: Point) -> Matrix:
        return self.prox.hessian(y)


def prox_schedule(k: int) -> tuple:
    """(A_k, A_{k+1}, γ_k) for outer iteration k ≥ 0."""
    A = (k / 3.0) ** 3
    A_next = ((k + 1) / 3.0) ** 3
    return A, A_next, (A_next - A) / A_next


def default_delta(epsilon: float, rho: float) -> float:
    """min{ε, ε²/ρ̂}."""
    return min(epsilon, epsilon ** 2 / rho) if rho > 0.0 else epsilon


def inner_budget(gap_estimate: float, delta: float) -> int:
    """N = ⌈log_{4/3}(gap/δ)⌉, at least one step."""
    if gap_estimate <= delta:
        return 1
    return max(1, math.ceil(math.log(gap_estimate / delta) / math.log(INNER_CONTRACTION)))


class ContractedSubproblem:
    """h_{k+1} together with the cubic Newton step of its contracted representation."""

    def __init__(self, problem: CompositeProblem, prox: CubicProxFunction, x_k: Point, v_k: Point,
                 A_next: float, gamma: float, alpha: float):
        self.problem = problem
        self.prox = prox
        self.x_k = x_k
        self.gamma = gamma
        self.A = A_next
        self.term = BregmanTerm(prox, v_k)
        # Exact sup-constant of the contracted outer part.
        self.M_bar = A_next * F_of_constants(problem.outer, gamma ** 3 * problem.f.lipschitz(2))
        if not self.M_bar > 0.0:
            self.M_bar = A_next * gamma ** 3 * alpha
        shift = (1.0 - gamma) * x_k
        self.feasible = problem.Q.scaled(1.0 / gamma, -shift / gamma)
        a = problem.outer.linear
        self.linear = None if a is None else A_next * gamma * a
        self.constant = 0.0 if a is None else A_next * float(a @ shift)

    def point(self, z: Point) -> Point:
        return self.gamma * z + (1.0 - self.gamma) * self.x_k

    def value(self, z: Point) -> float:
        return self.A * phi(self.problem, self.point(z)) + self.term.value(z)

    def step(self, z: Point, cfg, stats: Optional[StatisticsTracker]):
        w = self.point(z)
        f = self.problem.f
        g = self.gamma
        taylor = TaylorModel(order=2, anchor=z, values=f.values(w), gradients=g * f.jacobian(w),
                             hessians=g * g * f.hessians(w))
        obj = build_objective(
            self.problem, z, order=2, feasible=self.feasible, weight=self.A, reg_cubic=0.5 * self.M_bar,
            taylor=taylor, linear=self.linear, constant=self.constant, extra=self.term, cfg=cfg,
        )
        return solve_objective("prox_inner_step", self.problem, obj, z, cfg, stats)


def estimate_rho(problem: CompositeProblem, config: MethodConfig, alpha: float,
                 stats: Optional[StatisticsTracker] = None) -> float:
    """
    ρ̂ ≈ ρ_d(x0; x*) = (α/3)‖x* − x0‖³ from, in order: the config value, a
    known x*, the declared D0, or a short cubic Newton pre-run.
    """
    if config.rho_estimate is not None:
        return config.rho_estimate
    if problem.known_opt_point is not None:
        return alpha / 3.0 * problem.norm.norm(problem.known_opt_point - problem.x0) ** 3
    D0 = problem.level_set_radius()
    if D0 is not None:
        return alpha / 3.0 * D0 ** 3
    x = problem.x0
    for k in range(config.defaults.prox_prerun_iterations):
        x = guarded_step(lambda: cubic_step(problem, x, alpha, cfg=config.subproblem, stats=stats), problem, stats, k)
    rho = alpha / 3.0 * problem.norm.norm(x - problem.x0) ** 3
    logger.info("Estimated initial Bregman distance by pre-run.", rho=rho)
    return max(rho, config.epsilon)


@trace_run(MethodId.CONTRACTING_PROX.value)
def run_contracting_prox(problem: CompositeProblem, config: MethodConfig,
                         stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """
    Runs the contracting proximal-point scheme for `config.iters` outer
    iterations.

    The inner loop stops after N = ⌈log_{4/3}(gap/δ)⌉ cubic steps or once a
    step decreases h by less than δ/4. The gap estimate is 3ρ̂ + A_k·e_k with
    e_k = φ(x_k) − φ* when φ* is known and ε otherwise.
    """
    require_subhomogeneous(problem, MethodId.CONTRACTING_PROX)
    alpha = require_finite_constant(problem, 2, MethodId.CONTRACTING_PROX)
    rho = estimate_rho(problem, config, alpha, stats)
    delta = config.delta if config.delta is not None else default_delta(config.epsilon, rho)
    prox = CubicProxFunction(alpha=alpha, center=problem.x0, norm=problem.norm)
    recorder = TraceRecorder(MethodId.CONTRACTING_PROX, problem, 2, stats)
    cap = config.defaults.prox_max_inner
    x = problem.x0
    v = problem.x0.copy()
    for k in range(config.iters):
        A, A_next, gamma = prox_schedule(k)
        sub = ContractedSubproblem(problem, prox, x, v, A_next, gamma, alpha)
        excess = config.epsilon
        if problem.known_opt is not None:
            excess = max(phi(problem, x) - problem.known_opt, 0.0)
        N = inner_budget(3.0 * rho + A * excess, delta)
        if N > cap:
            logger.warning("Inner budget capped.", k=k, budget=N, cap=cap)
            if stats is not None:
                stats.add_stat(StatKey.PROX_INNER_BUDGET_EXHAUSTED)
            N = cap
        z = v
        h_values: List[float] = [sub.value(z)]
        best_z, best_h = z, h_values[0]
        kkt = 0.0
        for t in range(N):
            result = guarded_step(lambda: sub.step(z, config.subproblem, stats), problem, stats, k + 1)
            z = result.y
            kkt = max(kkt, result.kkt_residual)
            h_values.append(sub.value(z))
            if h_values[-1] < best_h:
                best_z, best_h = z, h_values[-1]
            if h_values[-2] - h_values[-1] < delta / 4.0:
                break
        v = best_z
        x_prev, x = x, sub.point(v)
        inner_steps = len(h_values) - 1
        recorder.record(
            k + 1, x, x_prev, inner_iters=inner_steps, kkt=kkt,
            A=A_next, gamma=gamma, inner_budget=N, inner_values=h_values,
        )
    rho_exact = rho
    if problem.known_opt_point is not None:
        rho_exact = prox.bregman(problem.x0, problem.known_opt_point)
    column = bounds.prox_bound(rho_exact, delta, config.iters)
    return recorder.finish(x, column, alpha=alpha, rho=rho, delta=delta)
