"""
Worker pool for grid sweeps.
Every evaluator is a pure function, so grid points can run on any number of threads.
"""

import logging
from concurrent.futures import Executor, ThreadPoolExecutor

from humbert_series.errors import ConfigError

logger = logging.getLogger(__name__)


def create_executor(workers: int = 1) -> Executor:
    """Create a thread pool for evaluating grid points.

    Results are collected with ``Executor.map``, which yields them in
    submission order, so reports do not depend on ``workers``.
    """
    if not isinstance(workers, int) or workers < 1:
        raise ConfigError(f"workers must be an integer >= 1, got {workers!r}")
    executor = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="grid")
    logger.debug(f"Grid executor created with {workers} worker(s)")
    return executor
