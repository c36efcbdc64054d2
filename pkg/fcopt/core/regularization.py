# fcopt/core/regularization.py
"""
Regularization of a convex (not uniformly convex) problem:

    d_i(x) = f_i(x) + c_i/(p+1)‖x − x0‖^{p+1},   φ_μ(x) = F(x, (1 − μ)f(x) + μd(x)).

φ_μ is uniformly convex of degree p + 1, agrees with φ at x0 and dominates
φ everywhere, so the linear-rate methods apply to it; μ trades the rate
against the distance between the two optimal values through the local
measure ξ_A.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import structlog
from numpy.typing import ArrayLike

from fcopt.config.settings import MethodConfig
from fcopt.core import methods
from fcopt.core.bounds import BoundColumn
from fcopt.core.problem import CompositeProblem, phi
from fcopt.core.recording import TraceRecorder, guarded_step
from fcopt.core.smooth import (
    ComponentConstants, PowerOfNormComponent, SmoothComponent, SumComponent, VectorFunction, hat_beta
)
from fcopt.core.subproblems import full_step
from fcopt.exceptions import ConfigError, DomainError
from fcopt.linalg import Point, as_point
from fcopt.statistics import StatisticsTracker
from fcopt.tracing import trace_run
from fcopt.types import MethodId, RunStatus, RunTrace

logger = structlog.get_logger(__name__)

XI_LOWER = 1e-12
XI_UPPER = 1e12
XI_ITERATIONS = 200


@dataclass(frozen=True, eq=False)
class Regularizer:
    """The components d_i = f_i + c_i/(p+1)‖x − x0‖^{p+1}."""
    f: VectorFunction
    center: Point
    c: np.ndarray
    p: int
    problem: CompositeProblem
    default_c: bool = True

    @property
    def degree(self) -> int:
        return self.p + 1

    def _penalty(self, index: int, weight: float) -> PowerOfNormComponent:
        return PowerOfNormComponent(
            self.center, degree=float(self.degree), coefficient=weight * self.c[index] / self.degree,
            norm=self.problem.norm,
        )

    def gaps(self, x: ArrayLike) -> np.ndarray:
        """d(x) − f(x) = c/(p+1)‖x − x0‖^{p+1}, component-wise."""
        x = as_point(x, self.f.n)
        r = self.problem.norm.norm(x - self.center)
        return self.c / self.degree * r ** self.degree

    def d_values(self, x: ArrayLike) -> np.ndarray:
        return self.f.values(x) + self.gaps(x)

    def blended(self, mu: float) -> VectorFunction:
        """(1 − μ)f + μd with σ_{p+1} = μc_i/2^{p−1} and L_p = L_p(f_i) + μc_i·p!."""
        if mu == 0.0:
            return self.f
        p = self.p
        parts: List[SmoothComponent] = []
        for i, component in enumerate(self.f.components):
            base = component.constants
            extra_L = mu * self.c[i] * math.factorial(p)
            sigma = mu * self.c[i] / 2 ** (p - 1)
            if p == 1:
                constants = ComponentConstants(L1=base.L1 + extra_L, L2=base.L2, sigma2=sigma, sigma3=base.sigma3)
            else:
                constants = ComponentConstants(L1=math.inf, L2=base.L2 + extra_L, sigma2=base.sigma2, sigma3=sigma)
            parts.append(SumComponent([component, self._penalty(i, mu)], constants))
        return VectorFunction(parts)


def build_regularizer(problem: CompositeProblem, p: int, c: Optional[ArrayLike] = None) -> Regularizer:
    """Default c_i = L_p(f_i); every c_i must be positive and finite."""
    if p not in (1, 2):
        raise ConfigError(f"Order p must be 1 or 2, got {p}.")
    L = problem.f.lipschitz(p)
    if c is None:
        if np.any(L <= 0.0) or np.any(np.isinf(L)):
            raise ConfigError(
                f"Default regularizer needs 0 < L_{p}(f_i) < +inf for every component; got {L.tolist()}. "
                "Supply c explicitly."
            )
        c_vec, default = L.astype(np.float64).copy(), True
    else:
        c_vec, default = as_point(c, problem.m, name="c"), False
        if np.any(c_vec <= 0.0):
            raise ConfigError("Regularizer coefficients must be positive.")
    return Regularizer(f=problem.f, center=problem.x0.copy(), c=c_vec, p=p, problem=problem, default_c=default)


@dataclass(frozen=True, eq=False)
class RegularizedProblem:
    original: CompositeProblem
    regularizer: Regularizer
    mu: float
    problem: CompositeProblem = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.mu <= 1.0:
            raise ConfigError(f"μ must lie in [0, 1], got {self.mu}.")
        f_mu = self.regularizer.blended(self.mu)
        object.__setattr__(self, "problem", self.original.with_function(
            f_mu, name=f"{self.original.name}[mu={self.mu:.3g}]", known_opt=None, known_opt_point=None,
        ))

    @property
    def p(self) -> int:
        return self.regularizer.p

    def phi_mu(self, x: ArrayLike) -> float:
        return phi(self.problem, x)


def regularized_condition_number(reg: RegularizedProblem, p: Optional[int] = None) -> float:
    """
    β = [1 + ((1 + p)2^{p−1}(1/(μp!) + 1))^{1/p}]^{−1} for c_i = L_p(f_i);
    with custom coefficients β̂_p of the blended function.
    """
    p = p or reg.p
    mu = reg.mu
    if mu == 0.0:
        return 0.0
    if not reg.regularizer.default_c:
        return hat_beta(reg.problem.f, p)
    inner = (1.0 + p) * 2 ** (p - 1) * (1.0 / (mu * math.factorial(p)) + 1.0)
    return 1.0 / (1.0 + inner ** (1.0 / p))


def xi_measure(problem: CompositeProblem, x: ArrayLike, g: ArrayLike, A: float) -> float:
    """
    ξ_A(x; g) = min{λ > 0 : F(x, f(x) + g/λ) ≤ A}, by bisection on
    [1e-12, 1e12]; +inf when even λ = 1e12 is infeasible.
    """
    x = as_point(x, problem.n)
    g = as_point(g, problem.m, name="g")
    if np.any(g < 0.0):
        raise ConfigError("The direction g of the local measure must be nonnegative.")
    if not phi(problem, x) < A:
        raise DomainError(f"Local measure needs φ(x) < A; φ(x) = {phi(problem, x)}, A = {A}.")
    fx = problem.f.values(x)

    def admissible(lam: float) -> bool:
        return problem.outer.evaluate(x, fx + g / lam, problem.norm, 0.0) <= A

    if admissible(XI_LOWER):
        return XI_LOWER
    if not admissible(XI_UPPER):
        return math.inf
    lo, hi = XI_LOWER, XI_UPPER
    for _ in range(XI_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def choose_mu(problem: CompositeProblem, target_delta: float, xi0_estimate: float) -> float:
    """
    μ = δ²/ξ0 clipped to (0, 1].

    Raises:
        ConfigError: If δ or the ξ0 estimate is not positive.
    """
    if not target_delta > 0.0:
        raise ConfigError(f"Target δ must be positive, got {target_delta}.")
    if not xi0_estimate > 0.0:
        raise ConfigError(f"ξ0 estimate must be positive, got {xi0_estimate}.")
    mu = min(target_delta ** 2 / xi0_estimate, 1.0)
    logger.debug("Regularization strength chosen.", problem=problem.name, delta=target_delta, xi0=xi0_estimate,
                 mu=mu)
    return mu


def optimal_alpha(beta: float) -> float:
    """The balancing coefficient β/(β + √(β + β²))."""
    return beta / (beta + math.sqrt(beta + beta * beta))


def regularization_bound(delta: float, gap0: float, mu: float, xi0: float, A: float, phi_star: float) -> float:
    """δ·gap0 + 2√(μξ0)(A − φ*)."""
    return delta * gap0 + 2.0 * math.sqrt(mu * xi0) * (A - phi_star)


@trace_run(MethodId.REGULARIZED.value)
def solve_via_regularization(problem: CompositeProblem, p: int, epsilon: float,
                             config: Optional[MethodConfig] = None,
                             stats: Optional[StatisticsTracker] = None) -> RunTrace:
    """
    Pre-runs the full basic method, estimates ξ0 at the pre-run point,
    picks δ and μ, and runs the full basic method on φ_μ until the linear
    certificate (1 − β)^k ≤ δ holds or the budget ends.

    The trace reports φ (the original objective); φ_μ is kept in the extras.
    """
    config = config or MethodConfig(method=MethodId.FULL, p=p, epsilon=epsilon)
    defaults = config.defaults
    prerun_config = config.model_copy(update={"method": MethodId.FULL, "p": p, "iters": defaults.regularization_prerun})
    prerun = methods.run_full_basic(problem, prerun_config, stats)
    A = phi(problem, problem.x0)
    x_tilde = prerun.final_point
    phi_tilde = phi(problem, x_tilde)
    metadata = {"A": A, "prerun_phi": phi_tilde, "epsilon": epsilon}

    if not phi_tilde < A:
        logger.warning("Pre-run made no progress; running the unregularized method.")
        plain = config.model_copy(update={"method": MethodId.FULL, "p": p, "iters": defaults.regularization_budget})
        trace = methods.run_full_basic(problem, plain, stats)
        trace.metadata.update(metadata, mu=0.0)
        return trace

    reg = build_regularizer(problem, p)
    xi0 = xi_measure(problem, x_tilde, reg.gaps(x_tilde), A)
    delta = epsilon / (3.0 * (A - phi_tilde))
    if not math.isfinite(xi0) or xi0 <= XI_LOWER:
        logger.warning("Local measure estimate degenerate; using μ = 1.", xi0=xi0)
        mu = 1.0
    else:
        mu = choose_mu(problem, delta, xi0)
    reg_problem = RegularizedProblem(problem, reg, mu)
    beta = regularized_condition_number(reg_problem, p)
    needed = math.ceil(math.log(delta) / math.log(1.0 - beta)) if 0.0 < delta < 1.0 and beta > 0.0 else 1
    iters = max(1, min(needed, defaults.regularization_budget))
    logger.info("Regularized run configured.", mu=mu, xi0=xi0, delta=delta, beta=beta, iterations=iters)

    recorder = TraceRecorder(MethodId.REGULARIZED, problem, p, stats)
    recorder.trace.records[0].extras["phi_mu"] = reg_problem.phi_mu(problem.x0)
    x = problem.x0
    for k in range(1, iters + 1):
        result = guarded_step(lambda: full_step(reg_problem.problem, x, p, cfg=config.subproblem, stats=stats),
                              reg_problem.problem, stats, k)
        x_prev, x = x, result.y
        recorder.record(k, x, x_prev, result, phi_mu=reg_problem.phi_mu(x))

    column = None
    if problem.known_opt is not None:
        phi_star = problem.known_opt
        offset = 2.0 * math.sqrt(mu * xi0) * (A - phi_star) if math.isfinite(xi0) else math.inf
        column = BoundColumn(
            label="regularized", custom=lambda k: (1.0 - beta) ** k * (A - phi_star) + offset, constant=offset,
            power=0.0,
        )
        metadata["decomposition"] = regularization_bound(delta, A - phi_star, mu, xi0, A, phi_star)
    return recorder.finish(
        x, column, RunStatus.COMPLETED, mu=mu, xi0=xi0, delta=delta, beta=beta,
        certificate_reached=needed <= defaults.regularization_budget, **metadata,
    )
