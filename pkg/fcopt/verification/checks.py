# fcopt/verification/checks.py
"""
Executable forms of the growth inequalities, subhomogeneity equivalences and
rate guarantees.

Every check is deterministic given its seed and returns a `CheckReport`
whose witness holds the worst sampled inputs. `run_checks` runs the
applicable checks of a problem; it backs the `verify` command.
"""

import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
import structlog

from fcopt.config.settings import VerificationSettings, settings as app_settings
from fcopt.core.outer import OuterFunction, sample_u
from fcopt.core.problem import CompositeProblem
from fcopt.core.proximal import CubicProxFunction
from fcopt.core.regularization import Regularizer, build_regularizer
from fcopt.core.smooth import SmoothComponent, VectorFunction, beta, condition_number, hat_beta
from fcopt.exceptions import ConfigError, InconsistentConstantsError, UndefinedConditionNumberError
from fcopt.linalg import NormOperator, Point, operator_norm
from fcopt.statistics import StatisticsTracker, StatKey
from fcopt.types import CheckReport, CheckStatus, RunTrace
from fcopt.utils import metrics

logger = structlog.get_logger(__name__)

BREGMAN_SLACK = 1e-10


class _Worst:
    """Tracks the largest violation seen and the inputs that produced it."""

    def __init__(self):
        self.value = -math.inf
        self.witness: Dict = {}

    def update(self, violation: float, **witness) -> None:
        if violation > self.value:
            self.value = float(violation)
            self.witness = witness


def _report(check_id: str, samples: int, worst: _Worst, slack: float, seed: Optional[int],
            details: Optional[dict] = None, status: Optional[CheckStatus] = None) -> CheckReport:
    if status is None:
        status = CheckStatus.PASS if worst.value <= 0.0 else CheckStatus.FAIL
    if status is CheckStatus.FAIL:
        logger.info("Check failed.", check=check_id, violation=worst.value)
    return CheckReport(
        check_id=check_id, samples=samples, max_violation=worst.value if math.isfinite(worst.value) else 0.0,
        status=status, slack=slack, seed=seed, witness=worst.witness, details=details or {},
    )


def _inconclusive(check_id: str, reason: str, seed: Optional[int] = None) -> CheckReport:
    return CheckReport(check_id=check_id, samples=0, max_violation=0.0, status=CheckStatus.INCONCLUSIVE,
                       slack=0.0, seed=seed, details={"reason": reason})


def _pair(rng: np.random.Generator, center: Point, scale: float):
    n = center.shape[0]
    return center + rng.normal(0.0, scale, n), center + rng.normal(0.0, scale, n)


def _norm(component: SmoothComponent, norm: Optional[NormOperator]) -> NormOperator:
    return norm or NormOperator.identity(component.n)


def _taylor_terms(component: SmoothComponent, x: Point, h: Point, p: int, beta_value: float) -> float:
    """⟨∇f(x), h⟩ + Σ_{k=2}^p β^{k−1}/k! D^k f(x)[h]^k."""
    out = float(component.gradient(x) @ h)
    if p == 2:
        out += 0.5 * beta_value * float(h @ component.hessian(x) @ h)
    return out


def _growth_rhs(component: SmoothComponent, x: Point, y: Point, p: int, coefficient: float,
                beta_value: float, norm: NormOperator) -> float:
    h = y - x
    r = norm.norm(h)
    return component.value(x) + _taylor_terms(component, x, h, p, beta_value) + coefficient * r ** (p + 1)


# --- Growth inequalities of one component ---


def check_theorem_main(component: SmoothComponent, p: int, alpha: float, samples: int = 1000, seed: int = 0,
                       norm: Optional[NormOperator] = None, scale: float = 1.0,
                       center: Optional[Point] = None) -> CheckReport:
    """
    Samples (x, y, β) with β ∈ [0, β_p(f, α)] (every other sample at the
    endpoint) and tests

        ⟨∇f(y) − ∇f(x), h⟩ ≥ Σ_{k=2}^p β^{k−1}/(k−1)! D^k f(x)[h]^k + αL_pβ^p/p! ‖h‖^{p+1},
        f(y) ≥ f(x) + ⟨∇f(x), h⟩ + Σ_{k=2}^p β^{k−1}/k! D^k f(x)[h]^k + αL_pβ^p/(p+1)! ‖h‖^{p+1},

    with slack 1e-8·(1 + ‖h‖^{p+1}).
    """
    B = _norm(component, norm)
    L = component.lipschitz(p)
    if component.uniform_convexity(p) <= 0.0 or math.isinf(L):
        raise ConfigError("check_theorem_main needs σ_{p+1} > 0 and a finite L_p.")
    beta_max = beta(component, p, alpha)
    slack = app_settings.verification.inequality_slack
    rng = np.random.default_rng(seed)
    center = np.zeros(component.n) if center is None else center
    worst = _Worst()
    for s in range(samples):
        x, y = _pair(rng, center, scale)
        b = beta_max if s % 2 == 0 else float(rng.uniform(0.0, beta_max))
        h = y - x
        r = B.norm(h)
        tol = slack * (1.0 + r ** (p + 1))
        lhs_g = float((component.gradient(y) - component.gradient(x)) @ h)
        rhs_g = alpha * L * b ** p / math.factorial(p) * r ** (p + 1)
        if p == 2:
            rhs_g += b * float(h @ component.hessian(x) @ h)
        worst.update(rhs_g - lhs_g - tol, inequality="gradient", x=x, y=y, beta=b, lhs=lhs_g, rhs=rhs_g)
        rhs_f = _growth_rhs(component, x, y, p, alpha * L * b ** p / math.factorial(p + 1), b, B)
        lhs_f = component.value(y)
        worst.update(rhs_f - lhs_f - tol, inequality="function", x=x, y=y, beta=b, lhs=lhs_f, rhs=rhs_f)
    return _report("theorem_main", samples, worst, slack, seed,
                   {"p": p, "alpha": alpha, "beta_max": beta_max, "component": component.kind.value})


def check_remark_convexity(component: SmoothComponent, p: int, alpha: float, samples: int = 1000, seed: int = 0,
                           norm: Optional[NormOperator] = None, scale: float = 1.0,
                           center: Optional[Point] = None) -> CheckReport:
    """Midpoint convexity in y of the function-growth right-hand side for α ≥ p."""
    if alpha < p:
        raise ConfigError(f"check_remark_convexity needs α >= p, got α = {alpha}.")
    B = _norm(component, norm)
    L = component.lipschitz(p)
    if math.isinf(L):
        raise ConfigError("check_remark_convexity needs a finite L_p.")
    try:
        beta_max = beta(component, p, alpha)
    except UndefinedConditionNumberError:
        beta_max = 0.0
    slack = app_settings.verification.convexity_slack
    rng = np.random.default_rng(seed)
    center = np.zeros(component.n) if center is None else center
    worst = _Worst()
    for _ in range(samples):
        x, y1 = _pair(rng, center, scale)
        y2 = center + rng.normal(0.0, scale, component.n)
        b = float(rng.uniform(0.0, beta_max)) if beta_max > 0.0 else 0.0
        coefficient = alpha * L * b ** p / math.factorial(p + 1)
        r1 = _growth_rhs(component, x, y1, p, coefficient, b, B)
        r2 = _growth_rhs(component, x, y2, p, coefficient, b, B)
        rm = _growth_rhs(component, x, 0.5 * (y1 + y2), p, coefficient, b, B)
        violation = rm - 0.5 * (r1 + r2) - slack * (1.0 + abs(r1) + abs(r2))
        worst.update(violation, x=x, y1=y1, y2=y2, beta=b)
    return _report("remark_convexity", samples, worst, slack, seed,
                   {"p": p, "alpha": alpha, "component": component.kind.value})


def check_vector_growth(f: VectorFunction, p: int, beta_value: float, samples: int = 1000, seed: int = 0,
                        norm: Optional[NormOperator] = None, scale: float = 1.0,
                        center: Optional[Point] = None) -> CheckReport:
    """
    Component-wise test of
    f(y) ≥ f(x) + Σ_{k=1}^p β^{k−1}/k! D^k f(x)[h]^k + pL_p(f)β^p/(p+1)! ‖h‖^{p+1}.
    """
    B = norm or NormOperator.identity(f.n)
    slack = app_settings.verification.inequality_slack
    rng = np.random.default_rng(seed)
    center = np.zeros(f.n) if center is None else center
    worst = _Worst()
    for _ in range(samples):
        x, y = _pair(rng, center, scale)
        r = B.norm(y - x)
        for i, component in enumerate(f.components):
            L = component.lipschitz(p)
            if beta_value == 0.0:
                coefficient = 0.0
            elif math.isinf(L):
                worst.update(math.inf, component=i, x=x, y=y, reason="L_p = +inf with β > 0")
                continue
            else:
                coefficient = p * L * beta_value ** p / math.factorial(p + 1)
            rhs = _growth_rhs(component, x, y, p, coefficient, beta_value, B)
            lhs = component.value(y)
            tol = slack * (1.0 + abs(lhs) + r ** (p + 1))
            worst.update(rhs - lhs - tol, component=i, x=x, y=y, lhs=lhs, rhs=rhs)
    return _report("vector_growth", samples, worst, slack, seed, {"p": p, "beta": beta_value})


# --- Outer function ---


def check_subhomo_equivalence(F: OuterFunction, samples: int = 1000, seed: int = 0,
                              scale: float = 2.0) -> CheckReport:
    """
    Tests on common samples the definition G(γu) ≤ γG(u) (γ ≥ 1) and the
    three equivalent conditions ⟨g_u, u⟩ ≤ G(u), ⟨g_v, u⟩ ≤ G(u) and
    G(u + tv) ≤ G(u) + tG(v), t ≥ 0. Details carry each condition's
    worst violation and whether all four agree.
    """
    slack = app_settings.verification.convexity_slack
    rng = np.random.default_rng(seed)
    conditions = {name: _Worst() for name in ("definition", "gradient", "cross_gradient", "sum")}
    for _ in range(samples):
        u = sample_u(F, rng, scale)
        v = sample_u(F, rng, scale)
        t = float(rng.exponential(1.0))
        gamma = 1.0 + float(rng.exponential(1.0))
        Gu, Gv = F.u_value(u), F.u_value(v)
        if not (math.isfinite(Gu) and math.isfinite(Gv)):
            continue
        tol = slack * (1.0 + abs(Gu) + abs(Gv))
        G_scaled = F.u_value(gamma * u)
        if math.isfinite(G_scaled):
            conditions["definition"].update(G_scaled - gamma * Gu - tol, u=u, gamma=gamma)
        G_sum = F.u_value(u + t * v)
        if math.isfinite(G_sum):
            conditions["sum"].update(G_sum - Gu - t * Gv - tol, u=u, v=v, t=t)
        try:
            gu, gv = F.u_gradient(u), F.u_gradient(v)
        except NotImplementedError:
            continue
        conditions["gradient"].update(float(gu @ u) - Gu - tol, u=u)
        conditions["cross_gradient"].update(float(gv @ u) - Gu - tol, u=u, v=v)
    verdicts = {name: w.value <= 0.0 for name, w in conditions.items() if math.isfinite(w.value)}
    name, worst = max(conditions.items(), key=lambda item: item[1].value)
    details = {
        "outer": F.kind.value,
        "violations": {k: (w.value if math.isfinite(w.value) else None) for k, w in conditions.items()},
        "agreement": len(set(verdicts.values())) <= 1,
    }
    worst.witness = dict(worst.witness, condition=name)
    return _report("subhomo_equivalence", samples, worst, slack, seed, details)


def check_outer_monotone(F: OuterFunction, samples: int = 1000, seed: int = 0, scale: float = 2.0) -> CheckReport:
    """G(u + d) ≥ G(u) for d ≥ 0 and midpoint convexity of G on its domain."""
    slack = app_settings.verification.convexity_slack
    rng = np.random.default_rng(seed)
    worst = _Worst()
    for _ in range(samples):
        u = sample_u(F, rng, scale)
        w = sample_u(F, rng, scale)
        d = np.abs(rng.normal(0.0, scale, F.m))
        Gu, Gw = F.u_value(u), F.u_value(w)
        Gd = F.u_value(u + d)
        tol = slack * (1.0 + abs(Gu))
        if math.isfinite(Gu) and math.isfinite(Gd):
            worst.update(Gu - Gd - tol, condition="monotone", u=u, d=d)
        if math.isfinite(Gu) and math.isfinite(Gw):
            Gm = F.u_value(0.5 * (u + w))
            worst.update(Gm - 0.5 * (Gu + Gw) - tol, condition="convex", u=u, w=w)
    return _report("outer_monotone", samples, worst, slack, seed, {"outer": F.kind.value})


# --- Declared constants and derivatives ---


def check_derivatives(component: SmoothComponent, samples: int = 100, seed: int = 0, scale: float = 1.0,
                      center: Optional[Point] = None) -> CheckReport:
    """Central finite differences of the gradient and the Hessian."""
    tol = app_settings.verification.fd_tolerance
    rng = np.random.default_rng(seed)
    center = np.zeros(component.n) if center is None else center
    n = component.n
    worst = _Worst()
    for _ in range(samples):
        x = center + rng.normal(0.0, scale, n)
        step = 1e-5 * max(1.0, float(np.abs(x).max()))
        eye = np.eye(n)
        g = component.gradient(x)
        g_fd = np.array([(component.value(x + step * e) - component.value(x - step * e)) / (2 * step) for e in eye])
        H = component.hessian(x)
        H_fd = np.array([(component.gradient(x + step * e) - component.gradient(x - step * e)) / (2 * step)
                         for e in eye])
        worst.update(float(np.abs(g_fd - g).max()) - tol * (1.0 + float(np.abs(g).max())), derivative="gradient", x=x)
        worst.update(float(np.abs(H_fd - H).max()) - tol * (1.0 + float(np.abs(H).max())), derivative="hessian", x=x)
    return _report("derivatives", samples, worst, tol, seed, {"component": component.kind.value})


def check_taylor_residual(component: SmoothComponent, p: int, samples: int = 1000, seed: int = 0,
                          norm: Optional[NormOperator] = None, scale: float = 1.0,
                          center: Optional[Point] = None) -> CheckReport:
    """|f(y) − Ω_p(f, x; y)| ≤ L_p‖y − x‖^{p+1}/(p+1)!."""
    B = _norm(component, norm)
    L = component.lipschitz(p)
    if math.isinf(L):
        return _inconclusive("taylor_residual", f"L_{p} = +inf", seed)
    slack = app_settings.verification.inequality_slack
    rng = np.random.default_rng(seed)
    center = np.zeros(component.n) if center is None else center
    worst = _Worst()
    for _ in range(samples):
        x, y = _pair(rng, center, scale)
        h = y - x
        r = B.norm(h)
        model = component.value(x) + _taylor_terms(component, x, h, p, 1.0)
        lhs = abs(component.value(y) - model)
        rhs = L * r ** (p + 1) / math.factorial(p + 1)
        worst.update(lhs - rhs - slack * (1.0 + abs(component.value(y)) + r ** (p + 1)), x=x, y=y, lhs=lhs, rhs=rhs)
    return _report("taylor_residual", samples, worst, slack, seed, {"p": p, "component": component.kind.value})


def check_declared_constants(component: SmoothComponent, samples: int = 1000, seed: int = 0,
                             norm: Optional[NormOperator] = None, scale: float = 1.0,
                             center: Optional[Point] = None) -> CheckReport:
    """
    Samples pairs against the declared L_1, L_2 (Lipschitz bounds of the
    first two derivatives) and σ_2, σ_3 (gradient monotonicity).
    """
    B = _norm(component, norm)
    c = component.constants
    slack = app_settings.verification.inequality_slack
    rng = np.random.default_rng(seed)
    center = np.zeros(component.n) if center is None else center
    worst = _Worst()
    for _ in range(samples):
        x, y = _pair(rng, center, scale)
        h = y - x
        r = B.norm(h)
        gx, gy = component.gradient(x), component.gradient(y)
        tol = slack * (1.0 + B.dual_norm(gx) + r ** 3)
        if math.isfinite(c.L1):
            worst.update(B.dual_norm(gy - gx) - c.L1 * r - tol, constant="L1", x=x, y=y)
        if math.isfinite(c.L2):
            dH = operator_norm(component.hessian(y) - component.hessian(x), B)
            worst.update(dH - c.L2 * r - tol, constant="L2", x=x, y=y)
        inner = float((gy - gx) @ h)
        worst.update(c.sigma2 * r ** 2 - inner - tol, constant="sigma2", x=x, y=y)
        worst.update(c.sigma3 * r ** 3 - inner - tol, constant="sigma3", x=x, y=y)
    for p in (1, 2):
        try:
            condition_number(component, p)
        except UndefinedConditionNumberError:
            continue
        except InconsistentConstantsError as e:
            worst.update(math.inf, constant=f"gamma{p}", reason=str(e))
    return _report("declared_constants", samples, worst, slack, seed, {"component": component.kind.value})


# --- Prox-function and regularizer ---


def check_bregman(prox: CubicProxFunction, samples: int = 1000, seed: int = 0, scale: float = 1.0) -> CheckReport:
    """
    The three-point identity ρ_d(v̄; x) = ρ_d(v; x) + ρ_d(v̄; v) + ⟨∇d(v) − ∇d(v̄), x − v⟩
    and uniform convexity ρ_d(x; y) ≥ (α/6)‖y − x‖³.
    """
    rng = np.random.default_rng(seed)
    n = prox.center.shape[0]
    worst = _Worst()
    for _ in range(samples):
        v_bar, v, x = (prox.center + rng.normal(0.0, scale, n) for _ in range(3))
        lhs = prox.bregman(v_bar, x)
        rhs = prox.bregman(v, x) + prox.bregman(v_bar, v) + float((prox.gradient(v) - prox.gradient(v_bar)) @ (x - v))
        worst.update(abs(lhs - rhs) - BREGMAN_SLACK * (1.0 + abs(lhs)), condition="identity", v_bar=v_bar, v=v, x=x)
        r = prox.norm.norm(x - v)
        worst.update(prox.alpha / 6.0 * r ** 3 - prox.bregman(v, x) - BREGMAN_SLACK * (1.0 + r ** 3),
                     condition="uniform_convexity", v=v, x=x)
    return _report("bregman", samples, worst, BREGMAN_SLACK, seed, {"alpha": prox.alpha})


def check_regularizer(reg: Regularizer, samples: int = 1000, seed: int = 0, scale: float = 1.0) -> CheckReport:
    """d(x0) = f(x0) exactly and d(x) ≥ f(x) on samples."""
    rng = np.random.default_rng(seed)
    worst = _Worst()
    x0 = reg.center
    worst.update(float(np.abs(reg.d_values(x0) - reg.f.values(x0)).max()), condition="anchor", x=x0)
    for _ in range(samples):
        x = x0 + rng.normal(0.0, scale, x0.shape[0])
        worst.update(float((reg.f.values(x) - reg.d_values(x)).max()), condition="dominance", x=x)
    return _report("regularizer", samples, worst, 0.0, seed, {"p": reg.p})


# --- Traces ---


def check_rate(trace: RunTrace, slack: Optional[float] = None, reference: Optional[float] = None) -> CheckReport:
    """
    φ_k − φ* ≤ bound_k + 1e-6·(1 + |φ*|) for every row with a bound.

    `reference` stands in for φ* when the problem has no known optimum.
    """
    rel = app_settings.verification.rate_slack if slack is None else slack
    phi_star = trace.known_opt if reference is None else reference
    if phi_star is None:
        return _inconclusive("rate", "known_opt is not set")
    rows = [r for r in trace.records if r.bound is not None]
    if not rows:
        return _inconclusive("rate", "trace has no bound column")
    tol = rel * (1.0 + abs(phi_star))
    worst = _Worst()
    for record in rows:
        worst.update(record.phi - phi_star - record.bound - tol, k=record.k, phi=record.phi, bound=record.bound)
    return _report("rate", len(rows), worst, tol, None, {"method": trace.method.value, "problem": trace.problem_name})


# --- Problem-level runner ---


CHECK_NAMES = (
    "theorem_main", "remark_convexity", "vector_growth", "subhomo_equivalence", "outer_monotone",
    "derivatives", "taylor_residual", "declared_constants", "bregman", "regularizer",
)


def _sampling_scale(problem: CompositeProblem) -> float:
    D = problem.domain_diameter()
    if D is not None and math.isfinite(D):
        return max(D, 1e-3)
    return max(1.0, problem.norm.norm(problem.x0))


def _problem_checks(problem: CompositeProblem, samples: int, seed: int) -> Dict[str, Callable[[], List[CheckReport]]]:
    B = problem.norm
    scale = _sampling_scale(problem)
    center = problem.x0

    def per_component(fn: Callable[[SmoothComponent, int], CheckReport]) -> List[CheckReport]:
        return [fn(c, i) for i, c in enumerate(problem.f.components)]

    def theorem_main() -> List[CheckReport]:
        out = []
        for p in (1, 2):
            for c in problem.f.components:
                if c.uniform_convexity(p) > 0.0 and math.isfinite(c.lipschitz(p)) and c.lipschitz(p) > 0.0:
                    out.append(check_theorem_main(c, p, float(p), samples, seed, B, scale, center))
        return out

    def remark_convexity() -> List[CheckReport]:
        return [check_remark_convexity(c, p, float(p), samples, seed, B, scale, center)
                for p in (1, 2) for c in problem.f.components if math.isfinite(c.lipschitz(p))]

    def vector_growth() -> List[CheckReport]:
        out = []
        for p in (1, 2):
            try:
                b = hat_beta(problem.f, p)
            except UndefinedConditionNumberError:
                continue
            out.append(check_vector_growth(problem.f, p, b, samples, seed, B, scale, center))
        return out

    def bregman_check() -> List[CheckReport]:
        alpha = problem.F_of_constants(2)
        if not (math.isfinite(alpha) and alpha > 0.0):
            return []
        return [check_bregman(CubicProxFunction(alpha, problem.x0, B), samples, seed, scale)]

    def regularizer_check() -> List[CheckReport]:
        try:
            reg = build_regularizer(problem, 1)
        except ConfigError:
            return []
        return [check_regularizer(reg, samples, seed, scale)]

    return {
        "theorem_main": theorem_main,
        "remark_convexity": remark_convexity,
        "vector_growth": vector_growth,
        "subhomo_equivalence": lambda: [check_subhomo_equivalence(problem.outer, samples, seed)],
        "outer_monotone": lambda: [check_outer_monotone(problem.outer, samples, seed)],
        "derivatives": lambda: per_component(lambda c, i: check_derivatives(c, max(1, samples // 10), seed, scale, center)),
        "taylor_residual": lambda: [check_taylor_residual(c, p, samples, seed, B, scale, center)
                                    for p in (1, 2) for c in problem.f.components],
        "declared_constants": lambda: per_component(
            lambda c, i: check_declared_constants(c, samples, seed, B, scale, center)),
        "bregman": bregman_check,
        "regularizer": regularizer_check,
    }


def run_checks(problem: CompositeProblem, names: Optional[Sequence[str]] = None, samples: Optional[int] = None,
               seed: Optional[int] = None, verification: Optional[VerificationSettings] = None,
               stats: Optional[StatisticsTracker] = None) -> List[CheckReport]:
    """
    Runs the named checks (all when `names` is None) on every component and
    on the outer function of `problem`.

    Checks that do not apply to the problem produce no report when running
    all of them and an inconclusive report when named explicitly.

    Raises:
        ConfigError: If `names` is empty or contains an unknown check.
    """
    verification = verification or app_settings.verification
    samples = samples or verification.samples
    seed = verification.seed if seed is None else seed
    explicit = names is not None
    names = list(CHECK_NAMES) if names is None else list(names)
    if not names:
        raise ConfigError("The check list is empty.")
    unknown = [n for n in names if n not in CHECK_NAMES]
    if unknown:
        raise ConfigError(f"Unknown checks: {', '.join(unknown)}. Known: {', '.join(CHECK_NAMES)}.")
    registry = _problem_checks(problem, samples, seed)
    reports: List[CheckReport] = []
    for name in names:
        try:
            produced = registry[name]()
        except InconsistentConstantsError as e:
            produced = [CheckReport(check_id=name, samples=0, max_violation=math.inf, status=CheckStatus.FAIL,
                                    slack=0.0, seed=seed, details={"reason": str(e)})]
        except ConfigError as e:
            produced = [_inconclusive(name, str(e), seed)] if explicit else []
        if not produced and explicit:
            produced = [_inconclusive(name, "not applicable to this problem", seed)]
        for report in produced:
            metrics.CHECKS_RUN_TOTAL.labels(check=report.check_id, status=report.status.value).inc()
            if stats is not None:
                stats.add_stat(StatKey.CHECKS_RUN)
                if report.status is CheckStatus.FAIL:
                    stats.add_stat(StatKey.CHECKS_FAILED)
        reports.extend(produced)
    logger.info("Checks finished.", problem=problem.name, reports=len(reports),
                failed=sum(r.status is CheckStatus.FAIL for r in reports))
    return reports
