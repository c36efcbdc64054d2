# fcopt/orchestration/run_config_factory.py
"""
A factory for creating MethodConfig objects from various sources.
"""
from argparse import Namespace
from typing import Any, Dict, Optional

from pydantic import ValidationError

from fcopt.config.settings import MethodConfig, Settings, settings as default_settings
from fcopt.exceptions import ConfigError
from fcopt.types import MethodId

_OPTIONAL_FIELDS = ("beta", "delta", "radius", "rho_estimate")


class RunConfigFactory:
    """A factory class to centralize the creation of MethodConfig objects."""

    def __init__(self, app_settings: Optional[Settings] = None):
        self._settings = app_settings or default_settings

    def create(self, method: str, p: Optional[int] = None, **overrides: Any) -> MethodConfig:
        """
        Assembles a MethodConfig from the settings defaults and explicit values.

        When `p` is omitted it follows the method: 2 for the second-order
        methods, 1 otherwise.

        Raises:
            ConfigError: If the method id is unknown or a value is out of range.
        """
        try:
            method_id = MethodId(method)
        except ValueError as e:
            known = ", ".join(m.value for m in MethodId if m is not MethodId.REGULARIZED)
            raise ConfigError(f"Unknown method '{method}'. Known: {known}.") from e
        if p is None:
            second_order = {MethodId.CUBIC, MethodId.CONTRACTING_NEWTON, MethodId.CONTRACTING_PROX}
            p = 2 if method_id in second_order else 1
        defaults = self._settings.methods
        values: Dict[str, Any] = {
            "method": method_id,
            "p": p,
            "iters": defaults.iterations,
            "alpha": defaults.alpha,
            "epsilon": defaults.prox_epsilon,
            "subproblem": self._settings.subproblem,
            "defaults": defaults,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        try:
            return MethodConfig(**values)
        except ValidationError as e:
            raise ConfigError(f"Invalid run configuration: {e}") from e

    def create_from_args(self, args: Namespace, method: Optional[str] = None) -> MethodConfig:
        """Creates a MethodConfig from parsed command-line arguments."""
        overrides = {
            name: getattr(args, name, None)
            for name in ("iters", "alpha", "epsilon", "seed", *_OPTIONAL_FIELDS)
        }
        return self.create(method or args.method, getattr(args, "p", None), **overrides)
