# fcopt/config/settings.py
"""
Configuration settings for fcopt, powered by Pydantic.

This module centralizes every tolerance, iteration budget and default used by
the subproblem solvers, the method runners and the verifier. Values can be
overridden from the environment with the prefix `FCOPT_`; nested models use a
double underscore, e.g. `FCOPT_SUBPROBLEM__TAU_FLOOR=1e-10`.
"""
from typing import Optional

from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from fcopt.types import MethodId

# --- Nested Models for Configuration Schemas ---


class SubproblemSettings(BaseModel):
    """
    Tolerances and budgets of the per-iteration auxiliary problems.

    Defaults sit two orders of magnitude below the outer acceptance
    tolerances so that subproblem error never dominates a trace.
    """
    dual_tolerance: float = Field(1e-10, gt=0, description="Natural-residual tolerance of the dual ascent for first-order models.")
    dual2_tolerance: float = Field(1e-9, gt=0, description="Dual tolerance for second-order full-step models.")
    cubic_dual_tolerance: float = Field(1e-8, gt=0, description="Dual tolerance for cubic-regularized models with several pieces.")
    newton_tolerance: float = Field(1e-10, gt=0, description="Gradient dual-norm tolerance of the damped Newton solver.")
    projected_gradient_tolerance: float = Field(1e-8, gt=0, description="Gradient-mapping tolerance of the accelerated projected gradient solver.")
    lmo_gap_tolerance: float = Field(1e-6, gt=0, description="Relative duality gap accepted for contracted linear-minimization steps.")
    secular_tolerance: float = Field(1e-12, gt=0, description="Relative tolerance of the secular-equation root search.")
    tau_floor: float = Field(1e-12, gt=0, description="Lower floor on the cubic multiplier to keep the model Hessian nonsingular.")
    feasibility_tolerance: float = Field(1e-9, ge=0, description="Absolute tolerance used by indicator tests of the outer function.")
    max_dual_iterations: int = Field(5000, ge=1, description="Iteration cap of the dual ascent.")
    max_newton_iterations: int = Field(200, ge=1, description="Iteration cap of the damped Newton solver.")
    max_gradient_iterations: int = Field(20000, ge=1, description="Iteration cap of the accelerated projected gradient solver.")
    max_epigraph_iterations: int = Field(1000, ge=1, description="Iteration cap handed to SLSQP for epigraph reformulations.")
    max_backtracks: int = Field(60, ge=1, description="Maximum halvings in any backtracking line search.")
    check_dominance: bool = Field(False, description="Log a warning whenever model dominance or descent is violated beyond slack.")


class MethodDefaults(BaseModel):
    """Defaults applied when a run does not specify a value."""
    alpha: float = Field(1.0, ge=1.0, description="Multiplier of F(L_p(f)) for the regularized-step methods.")
    iterations: int = Field(100, ge=1, description="Default outer iteration budget.")
    prox_epsilon: float = Field(1e-4, gt=0, description="Target accuracy of the contracting proximal-point scheme.")
    prox_max_inner: int = Field(200, ge=1, description="Hard cap on inner cubic steps per proximal iteration.")
    prox_prerun_iterations: int = Field(20, ge=1, description="Cubic Newton pre-run length used to estimate the initial Bregman distance.")
    regularization_prerun: int = Field(100, ge=1, description="Full-step pre-run length used to estimate the local measure.")
    regularization_budget: int = Field(2000, ge=1, description="Iteration cap of the regularized run.")


class VerificationSettings(BaseModel):
    """Defaults of the property verifier."""
    samples: int = Field(1000, ge=1, description="Default number of samples per check.")
    seed: int = Field(0, description="Default random seed.")
    inequality_slack: float = Field(1e-8, ge=0, description="Relative slack of the growth inequalities.")
    convexity_slack: float = Field(1e-9, ge=0, description="Slack of sampled convexity and subhomogeneity tests.")
    rate_slack: float = Field(1e-6, ge=0, description="Relative slack of trace-versus-bound checks.")
    fd_tolerance: float = Field(1e-6, gt=0, description="Relative tolerance of finite-difference derivative checks.")


class MethodConfig(BaseModel):
    """
    Encapsulates the configuration of a single method run.

    Typically constructed by `RunConfigFactory` from command-line arguments
    and the main settings.
    """
    method: MethodId
    p: int = Field(1, ge=1, le=2, description="Order of the Taylor model.")
    iters: int = Field(100, ge=1, description="Outer iteration budget K.")
    alpha: float = Field(1.0, ge=1.0, description="M = alpha * F(L_p(f)) for gm, fgm and cubic.")
    beta: Optional[float] = Field(None, gt=0.0, le=1.0, description="Step coefficient of the restricted method; defaults to hat-beta.")
    delta: Optional[float] = Field(None, gt=0.0, description="Inner accuracy of the proximal scheme.")
    epsilon: float = Field(1e-4, gt=0.0, description="Target accuracy of the proximal scheme and of regularize-solve.")
    seed: int = 0
    radius: Optional[float] = Field(None, gt=0.0, description="Distance estimate R for the FGM bound when x* is unknown.")
    rho_estimate: Optional[float] = Field(None, gt=0.0, description="Estimate of the initial Bregman distance for the proximal scheme.")
    subproblem: SubproblemSettings = Field(default_factory=SubproblemSettings)
    defaults: MethodDefaults = Field(default_factory=MethodDefaults)

    @model_validator(mode="after")
    def validate_method_order(self) -> "MethodConfig":
        """Rejects method/order combinations that have no meaning."""
        first_order = {MethodId.GM, MethodId.CGM, MethodId.FGM}
        second_order = {MethodId.CUBIC, MethodId.CONTRACTING_NEWTON, MethodId.CONTRACTING_PROX}
        if self.method in first_order and self.p != 1:
            raise ValueError(f"Method '{self.method.value}' is first order; p must be 1.")
        if self.method in second_order and self.p != 2:
            raise ValueError(f"Method '{self.method.value}' is second order; p must be 2.")
        return self


# --- Main Application Settings Class ---


class Settings(BaseSettings):
    """
    Main configuration class.

    Loads from environment variables with the prefix 'FCOPT_'. `FCOPT_LOG`
    selects the stderr verbosity (error, info or debug).
    """
    model_config = SettingsConfigDict(env_prefix="FCOPT_", env_nested_delimiter="__")

    log: str = Field("error", description="Log level for stderr output: error, info or debug.")
    log_json: bool = Field(False, description="Render stderr logs as JSON lines.")
    compare_concurrency: int = Field(4, ge=1, description="Maximum number of methods run concurrently by `compare`.")
    subproblem: SubproblemSettings = Field(default_factory=SubproblemSettings)
    methods: MethodDefaults = Field(default_factory=MethodDefaults)
    verification: VerificationSettings = Field(default_factory=VerificationSettings)

    @model_validator(mode="after")
    def validate_log_level(self) -> "Settings":
        if self.log.lower() not in ("error", "info", "debug"):
            raise ValueError(f"FCOPT_LOG must be one of error|info|debug, got '{self.log}'.")
        self.log = self.log.lower()
        return self


# A singleton instance of the settings, accessible throughout the package.
settings = Settings()
