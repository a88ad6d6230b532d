"""Experiment manager running seeded runs on a worker pool and aggregating them."""

import asyncio
import logging
import time
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from typing import Awaitable, Callable, Optional

from agent.runner import run_learning, run_reference
from agent.schemas import ReferencePolicy
from envs.registry import make_env
from errors import BenchmarkError, ExperimentError
from harness.metrics import reference_returns, summarize
from harness.schemas import RunResult, RunSpec, Summary
from settings import settings

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], Awaitable[None]]


def execute_run(spec: RunSpec, seed: int) -> RunResult:
    """
    Execute one seeded run of ``spec``.

    Module-level so that it can be shipped to worker processes.

    Args:
        spec: Variant, environment and seeds to run
        seed: Root seed of this run

    Returns:
        RunResult of the run
    """
    env = make_env(spec.env)
    model = env.to_model() if spec.track_regret or spec.is_reference else None
    if spec.is_reference:
        return run_reference(
            env,
            ReferencePolicy(spec.variant),
            spec.episodes,
            seed,
            model=model,
            track_regret=spec.track_regret,
        )
    result, _ = run_learning(
        env,
        spec.agent_config(),
        spec.episodes,
        seed,
        model=model,
        track_regret=spec.track_regret,
        variant_name=spec.variant,
    )
    return result


class ExperimentManager:
    """Manager for executing all seeds of a RunSpec and summarizing them."""

    def __init__(self, max_workers: Optional[int] = None) -> None:
        """
        Initialize experiment manager.

        Args:
            max_workers: Worker cap; defaults to REVERSEDQ_THREADS
        """
        self.max_workers = max_workers or settings.threads

    def _make_executor(self, num_runs: int) -> Executor:
        workers = min(self.max_workers, num_runs)
        if workers <= 1:
            return ThreadPoolExecutor(max_workers=1)
        return ProcessPoolExecutor(max_workers=workers)

    async def run_seeds(
        self,
        spec: RunSpec,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> list[RunResult]:
        """
        Run every seed of ``spec``.

        Args:
            spec: Variant, environment and seeds to run
            progress_callback: Optional callback(completed, total) after each finished seed

        Returns:
            RunResults sorted by seed

        Raises:
            ExperimentError: If any seed fails; the first failure is raised
        """
        loop = asyncio.get_running_loop()
        total = len(spec.seeds)
        completed = 0

        with self._make_executor(total) as executor:

            async def run_one(seed: int) -> RunResult:
                nonlocal completed
                try:
                    result = await loop.run_in_executor(executor, execute_run, spec, seed)
                except BenchmarkError as e:
                    logger.error(f"Seed {seed} of {spec.variant} failed: {e}")
                    raise ExperimentError(f"Seed {seed} failed: {e}", seed=seed) from e
                except Exception as e:
                    logger.error(f"Unexpected error in seed {seed} of {spec.variant}: {str(e)}")
                    raise ExperimentError(f"Unexpected error in seed {seed}: {e}", seed=seed) from e
                completed += 1
                logger.debug(f"{spec.variant}: seed {seed} done ({completed}/{total})")
                if progress_callback:
                    await progress_callback(completed, total)
                return result

            results = await asyncio.gather(*(run_one(seed) for seed in spec.seeds))

        return sorted(results, key=lambda result: result.seed)

    async def run(
        self,
        spec: RunSpec,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> tuple[Summary, list[RunResult]]:
        """
        Run all seeds of ``spec`` and aggregate them.

        Args:
            spec: Variant, environment and seeds to run
            progress_callback: Optional callback(completed, total) after each finished seed

        Returns:
            Tuple of (Summary, RunResults sorted by seed)

        Raises:
            ExperimentError: If any seed fails
            DegenerateScaleError: If the environment's references cannot scale the metric
        """
        logger.info(
            f"Running {spec.variant} on {spec.env.name}: {len(spec.seeds)} seeds x "
            f"{spec.episodes} episodes (workers={min(self.max_workers, len(spec.seeds))})"
        )
        started = time.perf_counter()

        results = await self.run_seeds(spec, progress_callback)

        model = make_env(spec.env).to_model()
        oracle_episode, random_episode = reference_returns(model, 1)
        summary = summarize(spec.variant, spec.env.name, results, oracle_episode, random_episode)

        ci = "n/a" if summary.n_seeds < 2 else f"{summary.ci_half_width:.2f}"
        logger.info(
            f"Finished {spec.variant} on {spec.env.name} in {time.perf_counter() - started:.1f}s: "
            f"scaled mean {summary.scaled_mean:.2f} +/- {ci}"
        )
        return summary, results


def run_experiment(spec: RunSpec, max_workers: Optional[int] = None) -> Summary:
    """Synchronous wrapper returning only the Summary of ``spec``."""
    summary, _ = asyncio.run(ExperimentManager(max_workers).run(spec))
    return summary
