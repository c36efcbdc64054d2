# fcopt/core/solvers.py
"""
Numerical engines behind every per-iteration model problem.

All subproblems are expressed as one `ModelObjective`:

    w·G(u(y)) + ⟨c, y⟩ + c0 + (M/2)‖h‖² + (s/3)‖h‖³ + e(y),    y ∈ Y,

where h = y − x̄, G is the u-part of the outer function and each piece is

    u_i(y) = Ω_p(f_i, x̄; y) + (q_i/2)‖h‖² + (s_i/3)‖h‖³.

`solve_model` picks the engine from the structure of the objective:

1. closed form: one identity piece on the whole space (SPD solve, or the
   secular equation when a cubic term is present);
2. damped Newton: smooth outer or an extra term on the whole space;
3. accelerated projected gradient: smooth outer on a bounded set;
4. dual ascent on λ: max-type outer with several pieces on the whole space;
5. epigraph reformulation: max-type outer with several pieces on a bounded
   set (HiGHS linear program or SLSQP).
"""

import math
from dataclasses import dataclass, replace
from typing import Optional, Protocol, Tuple

import numpy as np
import scipy.optimize
import structlog

from fcopt.config.settings import SubproblemSettings
from fcopt.core.outer import AdditiveComposite, OuterFunction, SimpleSet
from fcopt.core.smooth import TaylorModel
from fcopt.exceptions import (
    ModelInfeasibleError, NumericalError, SingularityError, SubproblemConvergenceError, SubproblemError
)
from fcopt.linalg import Matrix, NormOperator, Point, operator_norm, spd_solve
from fcopt.types import DualPoint, OuterKind, SetKind, SubproblemResult

logger = structlog.get_logger(__name__)

ARMIJO = 1e-4
DUAL_DIVERGENCE = 1e10
LEVENBERG_SHIFT = 1e-12


class SmoothTerm(Protocol):
    """An extra smooth convex term added to a model objective."""

    def value(self, y: Point) -> float:
        ...

    def gradient(self, y: Point) -> np.ndarray:
        ...

    def hessian(self, y: Point) -> Matrix:
        ...


@dataclass(frozen=True, eq=False)
class ModelObjective:
    """One model problem: pieces built on a Taylor snapshot plus side terms."""
    outer: OuterFunction
    feasible: SimpleSet
    norm: NormOperator
    taylor: TaylorModel
    quad: np.ndarray
    cubic: np.ndarray
    weight: float = 1.0
    linear: Optional[np.ndarray] = None
    constant: float = 0.0
    reg_quad: float = 0.0
    reg_cubic: float = 0.0
    extra: Optional[SmoothTerm] = None
    tol: float = 1e-9

    @property
    def anchor(self) -> Point:
        return self.taylor.anchor

    @property
    def n(self) -> int:
        return self.taylor.n

    @property
    def m(self) -> int:
        return self.taylor.m

    @property
    def has_curvature(self) -> bool:
        hess = self.taylor.hessians
        return (hess is not None and bool(np.any(hess != 0.0))) or bool(np.any(self.quad != 0.0)) \
            or bool(np.any(self.cubic != 0.0))

    @property
    def pieces_linear(self) -> bool:
        return not self.has_curvature

    @property
    def is_linear(self) -> bool:
        return self.pieces_linear and self.reg_quad == 0.0 and self.reg_cubic == 0.0 and self.extra is None

    # --- pieces ---

    def _r(self, y: Point) -> Tuple[np.ndarray, float]:
        h = y - self.anchor
        return h, self.norm.norm(h)

    def pieces(self, y: Point) -> np.ndarray:
        _, r = self._r(y)
        return self.taylor.evaluate(y) + 0.5 * self.quad * r ** 2 + self.cubic * r ** 3 / 3.0

    def piece_jacobian(self, y: Point) -> np.ndarray:
        h, r = self._r(y)
        J = self.taylor.gradients.copy()
        if self.taylor.hessians is not None:
            J += self.taylor.hessians @ h
        J += np.outer(self.quad + self.cubic * r, self.norm.apply(h))
        return J

    def piece_hessians(self, y: Point) -> np.ndarray:
        h, r = self._r(y)
        B = self.norm.matrix
        out = np.zeros((self.m, self.n, self.n)) if self.taylor.hessians is None else self.taylor.hessians.copy()
        out += (self.quad + self.cubic * r)[:, None, None] * B
        if r > 0.0:
            Bh = self.norm.apply(h)
            out += (self.cubic / r)[:, None, None] * np.outer(Bh, Bh)
        return out

    # --- side terms ---

    def side_value(self, y: Point) -> float:
        _, r = self._r(y)
        out = self.constant + 0.5 * self.reg_quad * r ** 2 + self.reg_cubic * r ** 3 / 3.0
        if self.linear is not None:
            out += float(self.linear @ y)
        if self.extra is not None:
            out += self.extra.value(y)
        return out

    def side_gradient(self, y: Point) -> np.ndarray:
        h, r = self._r(y)
        out = (self.reg_quad + self.reg_cubic * r) * self.norm.apply(h)
        if self.linear is not None:
            out = out + self.linear
        if self.extra is not None:
            out = out + self.extra.gradient(y)
        return out

    def side_hessian(self, y: Point) -> Matrix:
        h, r = self._r(y)
        out = (self.reg_quad + self.reg_cubic * r) * self.norm.matrix
        if r > 0.0 and self.reg_cubic > 0.0:
            Bh = self.norm.apply(h)
            out = out + (self.reg_cubic / r) * np.outer(Bh, Bh)
        if self.extra is not None:
            out = out + self.extra.hessian(y)
        return out

    # --- full objective ---

    def value(self, y: Point, tol: Optional[float] = None) -> float:
        """The model objective; +inf outside the feasible set or the u-domain."""
        tol = self.tol if tol is None else tol
        if not self.feasible.contains(y, self.norm, tol):
            return math.inf
        g = self.outer.u_value(self.pieces(y), tol)
        if math.isinf(g):
            return math.inf
        return self.weight * g + self.side_value(y)

    def smooth_value(self, y: Point) -> float:
        return self.weight * self.outer.u_value(self.pieces(y), math.inf) + self.side_value(y)

    def smooth_gradient(self, y: Point) -> np.ndarray:
        u = self.pieces(y)
        return self.weight * (self.piece_jacobian(y).T @ self.outer.u_gradient(u)) + self.side_gradient(y)

    def smooth_hessian(self, y: Point) -> Matrix:
        u = self.pieces(y)
        J = self.piece_jacobian(y)
        dG = self.outer.u_gradient(u)
        H = J.T @ self.outer.u_hessian(u) @ J + np.einsum("i,ijk->jk", dG, self.piece_hessians(y))
        return self.weight * H + self.side_hessian(y)

    def aggregate(self, lam: np.ndarray) -> "ModelObjective":
        """The single-piece objective Σ λ_i u_i(y) with the same side terms."""
        hess = None
        if self.taylor.hessians is not None:
            hess = np.einsum("i,ijk->jk", lam, self.taylor.hessians)[None]
        taylor = TaylorModel(
            order=self.taylor.order, anchor=self.anchor, values=np.array([lam @ self.taylor.values]),
            gradients=(lam @ self.taylor.gradients)[None], hessians=hess,
        )
        return replace(
            self, outer=AdditiveComposite(), taylor=taylor,
            quad=np.array([lam @ self.quad]), cubic=np.array([lam @ self.cubic]),
        )


# --- helpers ---


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the unit simplex by the sort-based rule."""
    n = v.shape[0]
    if abs(v.sum() - 1.0) <= 1e-15 and np.all(v >= 0.0):
        return v.copy()
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, n + 1) > (cssv - 1.0))[0][-1]
    theta = (cssv[rho] - 1.0) / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def _result(obj: ModelObjective, y: Point, kkt: float, iterations: int, solver: str,
            dual: Optional[DualPoint] = None, dual_value: Optional[float] = None,
            value_tol: Optional[float] = None) -> SubproblemResult:
    if not np.all(np.isfinite(y)):
        raise NumericalError(f"{solver} produced a non-finite point.")
    return SubproblemResult(
        y=y, model_value=obj.value(y, value_tol), kkt_residual=float(kkt), inner_iterations=int(iterations),
        solver=solver, dual=dual, dual_value=dual_value,
    )


def _total_cubic(obj: ModelObjective) -> float:
    return float(obj.weight * obj.cubic.sum() + obj.reg_cubic) if obj.m == 1 else float(obj.reg_cubic)


# --- 1. closed form ---


def solve_closed_form(obj: ModelObjective, cfg: SubproblemSettings) -> SubproblemResult:
    """
    Single identity piece on the whole space:

        min_h ⟨G, h⟩ + ½⟨Hc h, h⟩ + (S/3)‖h‖³,

    solved by one SPD solve (S = 0) or by the secular equation
    r = ‖(Hc + S r B)^{-1} G‖ (S > 0).
    """
    B = obj.norm
    w = obj.weight
    g = obj.taylor.gradients[0]
    H = obj.taylor.hessians[0] if obj.taylor.hessians is not None else np.zeros((obj.n, obj.n))
    G = w * g + (obj.linear if obj.linear is not None else 0.0)
    if obj.extra is not None:
        raise SubproblemError("Closed form does not support extra terms.")
    Hc = w * (H + obj.quad[0] * B.matrix) + obj.reg_quad * B.matrix
    S = w * obj.cubic[0] + obj.reg_cubic
    g_norm = B.dual_norm(G)
    if g_norm == 0.0:
        return _result(obj, obj.anchor.copy(), 0.0, 0, "closed-form", DualPoint(np.ones(1), 0.0 if S > 0 else None))

    if S == 0.0:
        h = -spd_solve(Hc, G)
        kkt = B.dual_norm(Hc @ h + G) / max(1.0, g_norm)
        return _result(obj, obj.anchor + h, kkt, 1, "closed-form", DualPoint(np.ones(1)))

    def step(r: float) -> np.ndarray:
        return -spd_solve(Hc + S * r * B.matrix, G)

    def psi(r: float) -> float:
        return B.norm(step(r)) - r

    r_hi = math.sqrt(g_norm / S)
    r_lo = cfg.tau_floor / S
    for _ in range(60):
        try:
            psi_lo = psi(r_lo)
            break
        except SingularityError:
            r_lo *= 10.0
    else:
        raise NumericalError("Secular equation: model Hessian is singular across the bracket.")

    if psi_lo <= 0.0:
        r = r_lo
        iterations = 1
    else:
        psi_hi = psi(r_hi)
        expansions = 0
        while psi_hi > 0.0 and expansions < 60:
            r_hi *= 2.0
            psi_hi = psi(r_hi)
            expansions += 1
        if psi_hi > 0.0:
            raise NumericalError(
                f"Secular equation bracket failure: psi({r_lo:.3e}) = {psi_lo:.3e}, psi({r_hi:.3e}) = {psi_hi:.3e}."
            )
        r, info = scipy.optimize.brentq(
            psi, r_lo, r_hi, xtol=cfg.secular_tolerance * r_hi, rtol=max(cfg.secular_tolerance, 4.0 * np.finfo(float).eps),
            full_output=True,
        )
        iterations = info.iterations
    h = step(r)
    rn = B.norm(h)
    kkt = B.dual_norm(Hc @ h + S * rn * B.apply(h) + G) / max(1.0, g_norm)
    return _result(obj, obj.anchor + h, kkt, iterations, "secular", DualPoint(np.ones(1), S * rn))


# --- 2. damped Newton ---


def solve_newton(obj: ModelObjective, cfg: SubproblemSettings, y0: Optional[Point] = None) -> SubproblemResult:
    """Damped Newton with Armijo backtracking on the smooth objective over the whole space."""
    B = obj.norm
    y = obj.anchor.copy() if y0 is None else np.array(y0, dtype=np.float64)
    fy = obj.smooth_value(y)
    g = obj.smooth_gradient(y)
    g_norm0 = B.dual_norm(g)
    scale = max(1.0, g_norm0)
    g_norm = g_norm0
    for it in range(cfg.max_newton_iterations):
        if g_norm <= cfg.newton_tolerance * scale:
            return _result(obj, y, g_norm, it, "newton")
        H = obj.smooth_hessian(y)
        shift = LEVENBERG_SHIFT * max(1.0, float(np.abs(H).max()))
        d = None
        for _ in range(12):
            try:
                d = -spd_solve(H + shift * B.matrix, g)
                break
            except SingularityError:
                shift *= 100.0
        if d is None:
            raise NumericalError("Newton system stayed singular after regularization.")
        slope = float(g @ d)
        t = 1.0
        for _ in range(cfg.max_backtracks):
            y_new = y + t * d
            f_new = obj.smooth_value(y_new)
            if math.isfinite(f_new) and f_new <= fy + ARMIJO * t * slope:
                break
            t *= 0.5
        else:
            if g_norm <= math.sqrt(cfg.newton_tolerance) * scale:
                return _result(obj, y, g_norm, it, "newton")
            raise SubproblemConvergenceError(
                f"Newton line search failed with gradient norm {g_norm:.3e}.",
                best=_result(obj, y, g_norm, it, "newton"),
            )
        y, fy = y_new, f_new
        g = obj.smooth_gradient(y)
        g_norm = B.dual_norm(g)
    if g_norm <= math.sqrt(cfg.newton_tolerance) * scale:
        return _result(obj, y, g_norm, cfg.max_newton_iterations, "newton")
    raise SubproblemConvergenceError(
        f"Newton budget exhausted with gradient norm {g_norm:.3e}.",
        best=_result(obj, y, g_norm, cfg.max_newton_iterations, "newton"),
    )


# --- 3. accelerated projected gradient ---


def solve_projected_gradient(obj: ModelObjective, cfg: SubproblemSettings) -> SubproblemResult:
    """
    Accelerated projected gradient in the B-metric with backtracking on the
    local Lipschitz estimate and function-value restarts.

    The residual is the dual norm of the gradient mapping, L‖y⁺ − z‖.
    """
    B = obj.norm

    def project(z: Point) -> Point:
        return obj.feasible.project(z, B)

    x = project(obj.anchor)
    fx = obj.smooth_value(x)
    L = max(operator_norm(obj.smooth_hessian(x), B), 1e-8)
    z, t = x.copy(), 1.0
    residual0: Optional[float] = None
    residual = math.inf
    for it in range(1, cfg.max_gradient_iterations + 1):
        fz = obj.smooth_value(z)
        gz = obj.smooth_gradient(z)
        step_dir = B.solve(gz)
        for _ in range(cfg.max_backtracks):
            x_new = project(z - step_dir / L)
            d = x_new - z
            f_new = obj.smooth_value(x_new)
            if f_new <= fz + float(gz @ d) + 0.5 * L * B.norm(d) ** 2 + 1e-15 * abs(fz):
                break
            L *= 2.0
        residual = L * B.norm(x_new - z)
        if residual0 is None:
            residual0 = max(residual, 1.0)
        if residual <= cfg.projected_gradient_tolerance * residual0:
            return _result(obj, x_new, residual, it, "projected-gradient")
        if f_new > fx:
            z, t = x_new.copy(), 1.0
        else:
            t_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
            z = x_new + ((t - 1.0) / t_new) * (x_new - x)
            t = t_new
        x, fx = x_new, f_new
        L *= 0.9
    raise SubproblemConvergenceError(
        f"Projected gradient budget exhausted with residual {residual:.3e}.",
        best=_result(obj, x, residual, cfg.max_gradient_iterations, "projected-gradient"),
    )


# --- linear objective over a bounded set ---


def solve_linear(obj: ModelObjective) -> SubproblemResult:
    """
    Linear minimization over a box or a ball. Ties at a zero gradient
    coordinate pick the lower bound.
    """
    Y = obj.feasible
    c = obj.weight * obj.taylor.gradients[0] + (obj.linear if obj.linear is not None else 0.0)
    if Y.kind is SetKind.ALL:
        if np.any(c != 0.0):
            raise SubproblemError("Linear model is unbounded below on the whole space.")
        return _result(obj, obj.anchor.copy(), 0.0, 0, "lmo")
    if Y.kind is SetKind.BOX:
        y = np.where(c < 0.0, Y.upper, Y.lower)
    else:
        c_norm = obj.norm.dual_norm(c)
        y = Y.center.copy() if c_norm == 0.0 else Y.center - Y.radius * obj.norm.solve(c) / c_norm
    return _result(obj, y, 0.0, 1, "lmo")


# --- 4. dual ascent ---


class _DualOracle:
    """Evaluates d(λ) = min_y Σ λ_i w·u_i(y) + side(y) and its gradient w·u(y(λ))."""

    def __init__(self, obj: ModelObjective, cfg: SubproblemSettings):
        self.obj = obj
        self.cfg = cfg
        self.y_warm: Optional[Point] = None
        self.inner_iterations = 0

    def __call__(self, lam: np.ndarray) -> Tuple[float, Optional[np.ndarray], Optional[SubproblemResult]]:
        agg = self.obj.aggregate(lam)
        try:
            if agg.extra is None:
                inner = solve_closed_form(agg, self.cfg)
            else:
                inner = solve_newton(agg, self.cfg, self.y_warm)
        except (SingularityError, SubproblemConvergenceError, NumericalError):
            return -math.inf, None, None
        self.inner_iterations += inner.inner_iterations
        self.y_warm = inner.y
        u = self.obj.pieces(inner.y)
        d = self.obj.weight * float(lam @ u) + self.obj.side_value(inner.y)
        if not math.isfinite(d):
            return -math.inf, None, None
        return d, u, inner


def solve_dual_ascent(obj: ModelObjective, cfg: SubproblemSettings, tolerance: float) -> SubproblemResult:
    """
    Projected-gradient ascent with Barzilai–Borwein steps and Armijo
    backtracking on the concave dual of a max-type model.

    λ lives on the unit simplex (MaxForm) or on {λ ≥ 0, λ^(1) = 1}
    (ConstraintForm). Stops when the natural residual ‖P(λ + u) − λ‖_∞ is
    below `tolerance`.
    """
    simplex = obj.outer.kind is OuterKind.MAX
    m = obj.m

    def project(lam: np.ndarray) -> np.ndarray:
        if simplex:
            return project_simplex(lam)
        out = np.maximum(lam, 0.0)
        out[0] = 1.0
        return out

    oracle = _DualOracle(obj, cfg)
    lam = np.full(m, 1.0 / m) if simplex else np.ones(m)
    d, u, inner = oracle(lam)
    if u is None:
        raise ModelInfeasibleError("Dual function is unbounded below at the initial multipliers.")
    w = max(obj.weight, 1e-300)
    eta = 1.0 / w
    residual = math.inf
    for it in range(cfg.max_dual_iterations):
        residual = float(np.max(np.abs(project(lam + u) - lam)))
        if residual <= tolerance:
            break
        grad = w * u
        for _ in range(cfg.max_backtracks):
            lam_new = project(lam + eta * grad)
            d_new, u_new, inner_new = oracle(lam_new)
            if u_new is not None and d_new >= d + ARMIJO * float(grad @ (lam_new - lam)):
                break
            eta *= 0.5
        else:
            if residual <= math.sqrt(tolerance):
                break
            raise SubproblemConvergenceError(
                f"Dual line search failed with residual {residual:.3e}.",
                best=_dual_result(obj, lam, d, inner, residual, it, oracle),
            )
        s = lam_new - lam
        dy = w * (u_new - u)
        sy = float(s @ dy)
        eta = float(s @ s) / -sy if sy < 0.0 else eta * 2.0
        eta = min(max(eta, 1e-12 / w), 1e12 / w)
        lam, d, u, inner = lam_new, d_new, u_new, inner_new
        if np.max(lam) > DUAL_DIVERGENCE:
            raise ModelInfeasibleError(f"Dual multipliers diverge (max λ = {np.max(lam):.3e}); model is infeasible.")
    else:
        if residual > math.sqrt(tolerance):
            raise SubproblemConvergenceError(
                f"Dual ascent budget exhausted with residual {residual:.3e}.",
                best=_dual_result(obj, lam, d, inner, residual, cfg.max_dual_iterations, oracle),
            )
    return _dual_result(obj, lam, d, inner, residual, oracle.inner_iterations, oracle)


def _dual_result(obj: ModelObjective, lam: np.ndarray, d: float, inner: SubproblemResult, residual: float,
                 iterations: int, oracle: _DualOracle) -> SubproblemResult:
    y = inner.y
    tau = None
    S = float(obj.weight * (lam @ obj.cubic) + obj.reg_cubic)
    if S > 0.0:
        tau = S * obj.norm.norm(y - obj.anchor)
    value_tol = max(obj.tol, 10.0 * residual)
    return _result(obj, y, residual, max(iterations, oracle.inner_iterations), "dual-ascent",
                   DualPoint(lam.copy(), tau), d, value_tol=value_tol)


# --- 5. epigraph reformulation ---


def solve_epigraph(obj: ModelObjective, cfg: SubproblemSettings) -> SubproblemResult:
    """Max-type model with several pieces over a bounded set."""
    if obj.feasible.kind is SetKind.BOX and obj.is_linear:
        return _solve_linprog(obj)
    return _solve_slsqp(obj, cfg)


def _solve_linprog(obj: ModelObjective) -> SubproblemResult:
    n, m, w = obj.n, obj.m, obj.weight
    Gm = obj.taylor.gradients
    rhs = Gm @ obj.anchor - obj.taylor.values
    c_lin = obj.linear if obj.linear is not None else np.zeros(n)
    bounds = list(zip(obj.feasible.lower, obj.feasible.upper))
    is_max = obj.outer.kind is OuterKind.MAX
    if is_max:
        c = np.concatenate([c_lin, [w]])
        A_ub = np.hstack([Gm, -np.ones((m, 1))])
        b_ub = rhs
        bounds = bounds + [(None, None)]
    else:
        c = w * Gm[0] + c_lin
        A_ub, b_ub = Gm[1:], rhs[1:]
    res = scipy.optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if res.status == 2:
        raise ModelInfeasibleError("Linearized model constraints are infeasible on the feasible set.")
    if res.status == 1:
        raise SubproblemConvergenceError("Linear program hit its iteration limit.")
    if res.status != 0:
        raise NumericalError(f"Linear program failed: {res.message}")
    y = np.clip(res.x[:n], obj.feasible.lower, obj.feasible.upper)
    marg = -np.asarray(res.ineqlin.marginals) / w
    lam = np.maximum(marg, 0.0) if is_max else np.concatenate([[1.0], np.maximum(marg, 0.0)])
    u = obj.pieces(y)
    violation = max(float(np.max(u[1:])) if (not is_max and m > 1) else 0.0, 0.0)
    offset = obj.constant if is_max else obj.constant + w * float(obj.taylor.values[0] - Gm[0] @ obj.anchor)
    return _result(obj, y, violation, int(getattr(res, "nit", 0)), "linprog", DualPoint(lam), float(res.fun) + offset,
                   value_tol=max(obj.tol, 10.0 * violation))


def _solve_slsqp(obj: ModelObjective, cfg: SubproblemSettings) -> SubproblemResult:
    n, m, w = obj.n, obj.m, obj.weight
    Y, B = obj.feasible, obj.norm
    is_max = obj.outer.kind is OuterKind.MAX
    y0 = Y.project(obj.anchor, B)

    def split(z: np.ndarray) -> Tuple[np.ndarray, float]:
        return (z[:n], float(z[n])) if is_max else (z, 0.0)

    def fun(z):
        y, t = split(z)
        base = w * t if is_max else w * float(obj.pieces(y)[0])
        return base + obj.side_value(y)

    def jac(z):
        y, _ = split(z)
        if is_max:
            return np.concatenate([obj.side_gradient(y), [w]])
        return w * obj.piece_jacobian(y)[0] + obj.side_gradient(y)

    constraints = []
    if is_max:
        constraints.append({
            "type": "ineq",
            "fun": lambda z: split(z)[1] - obj.pieces(split(z)[0]),
            "jac": lambda z: np.hstack([-obj.piece_jacobian(split(z)[0]), np.ones((m, 1))]),
        })
    else:
        constraints.append({
            "type": "ineq",
            "fun": lambda z: -obj.pieces(z)[1:],
            "jac": lambda z: -obj.piece_jacobian(z)[1:],
        })
    bounds = None
    if Y.kind is SetKind.BOX:
        bounds = list(zip(Y.lower, Y.upper)) + ([(None, None)] if is_max else [])
    elif Y.kind is SetKind.BALL:
        def ball_fun(z):
            y, _ = split(z)
            return np.array([Y.radius ** 2 - B.norm(y - Y.center) ** 2])

        def ball_jac(z):
            y, _ = split(z)
            gy = -2.0 * B.apply(y - Y.center)
            return np.concatenate([gy, [0.0]])[None] if is_max else gy[None]

        constraints.append({"type": "ineq", "fun": ball_fun, "jac": ball_jac})
    z0 = np.concatenate([y0, [float(np.max(obj.pieces(y0)))]]) if is_max else y0
    res = scipy.optimize.minimize(
        fun, z0, jac=jac, method="SLSQP", bounds=bounds, constraints=constraints,
        options={"maxiter": cfg.max_epigraph_iterations, "ftol": 1e-14},
    )
    y = Y.project(split(res.x)[0], B)
    u = obj.pieces(y)
    violation = max(float(np.max(u[1:])), 0.0) if not is_max else 0.0
    tolerable = violation <= 1e-7
    if not (res.success or (res.status == 8 and tolerable)) or not tolerable:
        best = _result(obj, y, violation, int(res.nit), "slsqp", value_tol=max(obj.tol, 10.0 * violation))
        raise SubproblemConvergenceError(f"SLSQP did not converge: {res.message}", best=best)
    return _result(obj, y, violation, int(res.nit), "slsqp", value_tol=max(obj.tol, 10.0 * violation))


# --- dispatch ---


def select_engine(obj: ModelObjective) -> str:
    outer = obj.outer
    bounded = obj.feasible.kind is not SetKind.ALL
    if outer.is_piecewise:
        return "epigraph" if bounded else "dual-ascent"
    if outer.is_identity and obj.is_linear:
        return "lmo"
    if outer.is_identity and not bounded and obj.extra is None:
        return "closed-form"
    return "projected-gradient" if bounded else "newton"


def solve_model(obj: ModelObjective, cfg: SubproblemSettings, dual_tolerance: Optional[float] = None) -> SubproblemResult:
    """Solves a model objective with the engine matching its structure."""
    engine = select_engine(obj)
    logger.debug("Solving model problem.", engine=engine, m=obj.m, feasible=obj.feasible.kind.value)
    if engine == "lmo":
        return solve_linear(obj)
    if engine == "closed-form":
        return solve_closed_form(obj, cfg)
    if engine == "newton":
        return solve_newton(obj, cfg)
    if engine == "projected-gradient":
        return solve_projected_gradient(obj, cfg)
    if engine == "dual-ascent":
        return solve_dual_ascent(obj, cfg, dual_tolerance or cfg.dual_tolerance)
    return solve_epigraph(obj, cfg)
