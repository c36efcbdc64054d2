# fcopt/containers.py
"""
Defines the Dependency Injection (DI) container for the CLI.

This module uses the `punq` library to wire the repository, the writers and
the services of one invocation. The statistics tracker and the trace writer
are singletons per container, so every service of a command reports into
the same tracker.
"""

import punq

from fcopt.config.settings import Settings
from fcopt.orchestration.comparison_pool import ComparisonPool
from fcopt.orchestration.method_runner import MethodRunner, RegularizationService
from fcopt.orchestration.problem_repository import ProblemRepository
from fcopt.orchestration.run_config_factory import RunConfigFactory
from fcopt.orchestration.verification_service import VerificationService
from fcopt.output.trace_writer import TraceWriter
from fcopt.statistics import StatisticsTracker


def get_container(app_settings: Settings) -> punq.Container:
    """Initializes and returns a DI container configured from `app_settings`."""
    container = punq.Container()

    # Instances created outside the container's control.
    container.register(Settings, instance=app_settings)

    container.register(StatisticsTracker, scope=punq.Scope.singleton)
    container.register(TraceWriter, scope=punq.Scope.singleton)
    container.register(ProblemRepository)
    container.register(RunConfigFactory, factory=lambda: RunConfigFactory(app_settings))

    # MethodRunner and RegularizationService depend on TraceWriter and StatisticsTracker.
    container.register(MethodRunner)
    container.register(RegularizationService)
    container.register(
        VerificationService,
        factory=lambda: VerificationService(
            container.resolve(TraceWriter), container.resolve(StatisticsTracker), app_settings
        ),
    )
    container.register(
        ComparisonPool,
        factory=lambda: ComparisonPool(
            container.resolve(MethodRunner), container.resolve(TraceWriter), app_settings.compare_concurrency
        ),
    )
    return container
