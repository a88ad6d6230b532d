"""Results directory: per-episode, summary and regret CSV files plus the run manifest."""

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal, Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from errors import ResultsError
from harness.schemas import RunResult, Summary

logger = logging.getLogger(__name__)

RUNS_FILE = "runs.csv"
SUMMARY_FILE = "summary.csv"
REGRET_FILE = "regret.csv"
MANIFEST_FILE = "manifest.json"

RUNS_COLUMNS = ["variant", "env", "seed", "episode", "episode_return", "cumulative_return"]
SUMMARY_COLUMNS = [
    "variant",
    "env",
    "n_seeds",
    "scaled_mean_pct",
    "ci_half_width_pct",
    "oracle_return",
    "random_return",
]
REGRET_COLUMNS = ["variant", "env", "seed", "episode", "policy_value", "cumulative_regret"]

# Full double precision round-trips every float
_FLOAT_FORMAT = "%.17g"

PathLike = Union[str, Path]


class RunManifest(BaseModel):
    """Resolved parameters of a `run` invocation."""

    model_config = ConfigDict(extra="forbid")

    status: Literal["complete", "partial"] = "complete"
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    env: dict[str, Any]
    variants: list[str]
    agent_configs: dict[str, dict[str, Any]] = Field(default_factory=dict)
    seeds: list[int]
    episodes: int
    track_regret: bool = False
    workers: int = 1
    failed: dict[str, str] = Field(
        default_factory=dict, description="Failed variant -> error message"
    )


def _write_frame(frame: pd.DataFrame, path: Path) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=_FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise ResultsError(f"Failed to write {path}: {e}") from e
    logger.info(f"Wrote {len(frame)} rows to {path}")


def _read_frame(path: Path, columns: Sequence[str]) -> pd.DataFrame:
    if not path.exists():
        raise ResultsError(f"No results: {path} does not exist")
    try:
        frame = pd.read_csv(path)
    except (OSError, ValueError) as e:
        raise ResultsError(f"Corrupt results file {path}: {e}") from e
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise ResultsError(f"Results file {path} lacks columns {missing}")
    if frame.empty:
        raise ResultsError(f"No results: {path} holds no rows")
    return frame


def runs_frame(results: Sequence[RunResult]) -> pd.DataFrame:
    """One row per (variant, seed, episode); episodes are numbered from 1."""
    frames = [
        pd.DataFrame(
            {
                "variant": result.variant,
                "env": result.env,
                "seed": result.seed,
                "episode": np.arange(1, result.episodes + 1),
                "episode_return": result.returns,
                "cumulative_return": result.cumulative,
            }
        )
        for result in results
    ]
    if not frames:
        return pd.DataFrame(columns=RUNS_COLUMNS)
    return pd.concat(frames, ignore_index=True)[RUNS_COLUMNS]


def summary_frame(summaries: Sequence[Summary]) -> pd.DataFrame:
    rows = [
        {
            "variant": summary.variant,
            "env": summary.env,
            "n_seeds": summary.n_seeds,
            "scaled_mean_pct": summary.scaled_mean,
            "ci_half_width_pct": summary.ci_half_width,
            "oracle_return": summary.oracle_return,
            "random_return": summary.random_return,
        }
        for summary in summaries
    ]
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def regret_frame(results: Sequence[RunResult], optimal_values: dict[str, float]) -> pd.DataFrame:
    """
    Per-episode policy values and cumulative regret of runs that tracked them.

    Args:
        results: Runs; those without policy values are skipped
        optimal_values: Optimal per-episode value keyed by environment name
    """
    frames = []
    for result in results:
        if result.policy_values is None:
            continue
        values = np.asarray(result.policy_values)
        frames.append(
            pd.DataFrame(
                {
                    "variant": result.variant,
                    "env": result.env,
                    "seed": result.seed,
                    "episode": np.arange(1, result.episodes + 1),
                    "policy_value": values,
                    "cumulative_regret": np.cumsum(optimal_values[result.env] - values),
                }
            )
        )
    if not frames:
        return pd.DataFrame(columns=REGRET_COLUMNS)
    return pd.concat(frames, ignore_index=True)[REGRET_COLUMNS]


def write_runs(results: Sequence[RunResult], directory: PathLike) -> Path:
    path = Path(directory) / RUNS_FILE
    _write_frame(runs_frame(results), path)
    return path


def write_summaries(summaries: Sequence[Summary], directory: PathLike) -> Path:
    path = Path(directory) / SUMMARY_FILE
    _write_frame(summary_frame(summaries), path)
    return path


def write_regret(
    results: Sequence[RunResult], optimal_values: dict[str, float], directory: PathLike
) -> Path:
    path = Path(directory) / REGRET_FILE
    _write_frame(regret_frame(results, optimal_values), path)
    return path


def read_runs(directory: PathLike) -> pd.DataFrame:
    """
    Load the per-episode results.

    Raises:
        ResultsError: If the file is missing, empty or lacks columns
    """
    return _read_frame(Path(directory) / RUNS_FILE, RUNS_COLUMNS)


def read_summaries(directory: PathLike) -> pd.DataFrame:
    """
    Load the summary rows.

    Raises:
        ResultsError: If the file is missing, empty or lacks columns
    """
    return _read_frame(Path(directory) / SUMMARY_FILE, SUMMARY_COLUMNS)


def cumulative_matrix(runs: pd.DataFrame, variant: str, env: str) -> np.ndarray:
    """
    Cumulative returns of one variant as an (n_seeds, K) matrix, rows ordered by seed.

    Raises:
        ResultsError: If the variant has no rows or seeds differ in episode count
    """
    rows = runs[(runs["variant"] == variant) & (runs["env"] == env)]
    if rows.empty:
        raise ResultsError(f"No per-episode rows for {variant} on {env}")
    table = rows.pivot(index="seed", columns="episode", values="cumulative_return").sort_index()
    if table.isna().to_numpy().any():
        raise ResultsError(f"Seeds of {variant} on {env} have different episode counts")
    return table.to_numpy(dtype=np.float64)


def write_manifest(manifest: RunManifest, directory: PathLike) -> Path:
    path = Path(directory) / MANIFEST_FILE
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(manifest.model_dump(mode="json"), f, indent=2, ensure_ascii=False)
    except OSError as e:
        raise ResultsError(f"Failed to write {path}: {e}") from e
    logger.info(f"Wrote manifest to {path}")
    return path


def read_manifest(directory: PathLike) -> Optional[RunManifest]:
    """Load the manifest, or None when the directory has none."""
    path = Path(directory) / MANIFEST_FILE
    if not path.exists():
        return None
    try:
        with open(path, "r", encoding="utf-8") as f:
            return RunManifest.model_validate(json.load(f))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ResultsError(f"Corrupt manifest {path}: {e}") from e
