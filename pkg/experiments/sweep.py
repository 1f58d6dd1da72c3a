"""Thread pool for the independent runs of a parameter study."""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Hashable, Optional, TypeVar

from config.loader import settings
from utils.logger import setup_logger

logger = setup_logger(__name__)

T = TypeVar('T')


class SweepManager:
    """Runs per-parameter simulations in parallel, results keyed like the tasks."""

    def __init__(self, max_workers: Optional[int] = None):
        """Initialize sweep manager.

        Args:
            max_workers: Pool width (settings.max_workers when None; 1 runs serially)
        """
        self.max_workers = max(1, max_workers if max_workers is not None else settings.max_workers)

    def run(self, tasks: Dict[Hashable, Callable[[], T]]) -> Dict[Hashable, T]:
        """Execute tasks and return their results in the tasks' order.

        Raises:
            Exception: The first task failure, re-raised after the pool drains
        """
        logger.info(f"Sweep of {len(tasks)} runs on {self.max_workers} workers")
        if self.max_workers == 1 or len(tasks) <= 1:
            return {key: task() for key, task in tasks.items()}
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            futures = {key: pool.submit(task) for key, task in tasks.items()}
            return {key: future.result() for key, future in futures.items()}
