import logging

from celery import group, shared_task

from .exceptions import ConfigurationError, NumericalFailure
from .loaders import make_run, run_overrides
from .settings import app_settings
from .studies import FAILED, sweep_point

logger = logging.getLogger(__name__)


def _failed_row(epsilon):
    return {"epsilon": epsilon, "status_direct": FAILED, "status_bs": FAILED}


@shared_task
def compute_sweep_point(run_data: dict, epsilon: float):
    try:
        run = make_run(run_data)
        with app_settings.override(**run_overrides(run)):
            return sweep_point(run, epsilon)
    except (ConfigurationError, NumericalFailure) as exc:
        logger.exception(f"Sweep point epsilon={epsilon} failed: {exc}")
        return _failed_row(epsilon)


def dispatch_sweep(run, epsilons, jobs: int = 1) -> list[dict]:
    """Sweep points in input order; with jobs > 1 they run as a celery group."""
    run_data = run.to_dict()
    if jobs > 1 and len(epsilons) > 1:
        logger.debug(f"Dispatching {len(epsilons)} sweep points as a celery group")
        result = group(compute_sweep_point.s(run_data, epsilon) for epsilon in epsilons)()
        return result.get()
    return [compute_sweep_point(run_data, epsilon) for epsilon in epsilons]
