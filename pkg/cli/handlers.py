"""Command handlers for `run`, `report` and `plot`."""

import argparse
import asyncio
import logging
import math
import sys
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import ValidationError

from agent.schemas import ALL_VARIANTS, DISPLAY_NAMES, ReferencePolicy, is_reference
from cli.config_file import ExperimentConfigFile, build_env_config, load_config
from cli.plotting import CurveSeries, write_learning_curve
from cli.results_store import (
    RunManifest,
    cumulative_matrix,
    read_runs,
    read_summaries,
    summary_frame,
    write_manifest,
    write_regret,
    write_runs,
    write_summaries,
)
from envs.registry import make_env
from envs.schemas import BdclConfig, ChainConfig
from errors import BenchmarkError, ConfigError, ResultsError
from harness.experiment_manager import ExperimentManager
from harness.metrics import reference_returns, scaled_curve
from harness.schemas import RunResult, RunSpec, Summary
from settings import settings

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

# Published scaled means and CI half-widths at the default settings
PUBLISHED_RESULTS: dict[str, dict[str, tuple[float, float]]] = {
    "bdcl": {
        "randomizedq": (9.53, 11.04),
        "randomizedq-backward": (21.55, 15.97),
        "randomizedq-init": (47.36, 16.60),
        "randomizedq-update": (57.44, 1.32),
        "reversedq": (78.78, 0.75),
    },
    "chain": {
        "randomizedq": (21.76, 1.11),
        "randomizedq-backward": (43.93, 1.94),
        "randomizedq-init": (46.95, 3.41),
        "randomizedq-update": (20.67, 1.13),
        "reversedq": (61.81, 2.23),
    },
}

# CLI flag -> AgentConfig field
_AGENT_FLAGS = {
    "kappa": "inflation",
    "ensembles": "ensemble_size",
    "eta": "mixing_rate",
    "n0": "prior_transitions",
}
# CLI flag -> (environment, config field); None applies to both environments
_ENV_FLAGS: dict[str, tuple[Optional[str], str]] = {
    "p_fail": ("bdcl", "fail_probability"),
    "structure_seed": ("bdcl", "structure_seed"),
    "chain_states": ("chain", "num_states"),
    "horizon": (None, "horizon"),
}


def _display_name(variant: str) -> str:
    return DISPLAY_NAMES.get(variant, variant)


def _expand_algorithms(algo: str, references: bool) -> list[str]:
    if algo == "all":
        variants = [variant.value for variant in ALL_VARIANTS]
    else:
        variants = [algo]
    if references:
        variants += [policy.value for policy in ReferencePolicy if policy.value not in variants]
    return variants


def _env_config(
    file_config: ExperimentConfigFile, args: argparse.Namespace
) -> Union[BdclConfig, ChainConfig]:
    name = args.env or file_config.env.name
    parameters: dict[str, Any] = {}
    if name == file_config.env.name:
        parameters.update(file_config.env.parameters)
    for flag, (env_name, field) in _ENV_FLAGS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if env_name is not None and env_name != name:
            raise ConfigError(f"--{flag.replace('_', '-')} does not apply to environment {name!r}")
        parameters[field] = value
    return build_env_config(name, parameters)


def build_run_specs(args: argparse.Namespace) -> tuple[list[RunSpec], Path]:
    """
    Resolve the config file and flags into one RunSpec per variant.

    Flags override file values; anything left unset falls back to the defaults of
    the chosen environment.

    Args:
        args: Parsed `run` arguments

    Returns:
        Tuple of (RunSpecs, output directory)

    Raises:
        ConfigError: If the configuration is invalid
    """
    file_config = load_config(args.config)
    try:
        env = _env_config(file_config, args)
    except ValidationError as e:
        raise ConfigError(f"Invalid environment configuration: {e}") from e

    if args.env and args.env != file_config.env.name:
        file_config = file_config.model_copy(
            update={"env": file_config.env.model_copy(update={"name": args.env})}
        )
    episodes = args.episodes or file_config.episodes
    if args.seeds is not None:
        seed_base = args.seed_base if args.seed_base is not None else file_config.run.seed_base
        seeds = list(range(seed_base, seed_base + args.seeds))
    elif args.seed_base is not None and not isinstance(file_config.run.seeds, list):
        count = len(file_config.seeds)
        seeds = list(range(args.seed_base, args.seed_base + count))
    else:
        seeds = file_config.seeds

    overrides = dict(file_config.agent.overrides)
    for flag, field in _AGENT_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value

    variants = _expand_algorithms(args.algo or file_config.agent.preset, args.references)
    track_regret = args.track_regret or file_config.run.track_regret
    specs = []
    try:
        for variant in variants:
            specs.append(
                RunSpec(
                    env=env,
                    variant=variant,
                    overrides={} if is_reference(variant) else overrides,
                    seeds=seeds,
                    episodes=episodes,
                    track_regret=track_regret,
                )
            )
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration: {e}") from e
    except BenchmarkError as e:
        raise ConfigError(str(e)) from e

    output_dir = Path(args.out or file_config.run.output_dir or settings.output_dir)
    return specs, output_dir


async def _run_specs(
    specs: list[RunSpec], manager: ExperimentManager
) -> tuple[list[Summary], list[RunResult], dict[str, str]]:
    summaries: list[Summary] = []
    results: list[RunResult] = []
    failed: dict[str, str] = {}

    for spec in specs:

        async def progress(completed: int, total: int, variant: str = spec.variant) -> None:
            logger.debug(f"{variant}: {completed}/{total} seeds complete")

        try:
            summary, spec_results = await manager.run(spec, progress_callback=progress)
        except BenchmarkError as e:
            logger.error(f"Variant {spec.variant} failed: {e}")
            failed[spec.variant] = str(e)
            continue
        summaries.append(summary)
        results.extend(spec_results)
    return summaries, results, failed


def cmd_run(args: argparse.Namespace) -> int:
    """
    Handle `run`: execute the experiments and write the results directory.

    Writes runs.csv, summary.csv, regret.csv (with --track-regret) and manifest.json.

    Returns:
        Exit status
    """
    try:
        specs, output_dir = build_run_specs(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG

    manager = ExperimentManager()
    env_config = specs[0].env
    logger.info(
        f"Experiment on {env_config.name}: variants={[spec.variant for spec in specs]}, "
        f"seeds={specs[0].seeds}, episodes={specs[0].episodes}, output={output_dir}"
    )
    summaries, results, failed = asyncio.run(_run_specs(specs, manager))

    manifest = RunManifest(
        status="partial" if failed else "complete",
        env=env_config.model_dump(mode="json"),
        variants=[spec.variant for spec in specs],
        agent_configs={
            spec.variant: spec.agent_config().model_dump(mode="json")
            for spec in specs
            if not spec.is_reference
        },
        seeds=specs[0].seeds,
        episodes=specs[0].episodes,
        track_regret=specs[0].track_regret,
        workers=manager.max_workers,
        failed=failed,
    )
    try:
        write_runs(results, output_dir)
        write_summaries(summaries, output_dir)
        if specs[0].track_regret:
            optimal, _ = reference_returns(make_env(env_config).to_model(), 1)
            write_regret(results, {env_config.name: optimal}, output_dir)
        write_manifest(manifest, output_dir)
    except ResultsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE

    if summaries:
        print(format_report(summary_frame(summaries).to_dict(orient="records")))
    if failed:
        print(
            f"error: {len(failed)} variant(s) failed: {', '.join(failed)}; "
            f"results in {output_dir} are partial",
            file=sys.stderr,
        )
        return EXIT_FAILURE
    return EXIT_OK


def _format_cell(mean: float, half_width: float) -> str:
    if half_width is None or math.isnan(half_width):
        return f"{mean:.2f} ± n/a"
    return f"{mean:.2f} ± {half_width:.2f}"


def format_report(rows: list[dict[str, Any]], compare_published: bool = False) -> str:
    """
    Format summary rows as one table per environment.

    Rows are sorted ascending by scaled mean and the best row is printed in bold.

    Args:
        rows: Dicts with variant, env, n_seeds, scaled mean and CI half-width
        compare_published: Add the published numbers for the default settings

    Returns:
        Report text
    """
    lines: list[str] = []
    for env in sorted({row["env"] for row in rows}):
        env_rows = sorted(
            (row for row in rows if row["env"] == env),
            key=lambda row: float(row["scaled_mean_pct"]),
        )
        n_seeds = max(int(row["n_seeds"]) for row in env_rows)
        lines.append(f"Scaled mean cumulative reward (%) with 95% CI: {env} ({n_seeds} seeds)")
        header = f"| {'Policy':<24} | {'Measured':<18} |"
        if compare_published:
            header += f" {'Published':<16} |"
        lines.append(header)
        widths = [24, 18, 16] if compare_published else [24, 18]
        lines.append("|" + "|".join("-" * (width + 2) for width in widths) + "|")
        for index, row in enumerate(env_rows):
            mean = row["scaled_mean_pct"]
            half_width = row["ci_half_width_pct"]
            name = _display_name(row["variant"])
            cell = _format_cell(float(mean), float(half_width))
            if index == len(env_rows) - 1:
                name, cell = f"**{name}**", f"**{cell}**"
            line = f"| {name:<24} | {cell:<18} |"
            if compare_published:
                published = PUBLISHED_RESULTS.get(env, {}).get(row["variant"])
                text = _format_cell(*published) if published else "-"
                line += f" {text:<16} |"
            lines.append(line)
        lines.append("")
    return "\n".join(lines).rstrip("\n")


def cmd_report(args: argparse.Namespace) -> int:
    """
    Handle `report`: print the summary table of a results directory.

    Returns:
        Exit status
    """
    try:
        frame = read_summaries(args.results_dir)
    except ResultsError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    print(format_report(frame.to_dict(orient="records"), compare_published=args.compare_paper))
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    """
    Handle `plot`: render learning curves of a results directory as SVG.

    One file is written per environment; curves are recomputed from runs.csv with
    the references stored in summary.csv.

    Returns:
        Exit status
    """
    results_dir = Path(args.results_dir)
    try:
        runs = read_runs(results_dir)
        summaries = read_summaries(results_dir)
        envs = sorted(runs["env"].unique())
        if args.env:
            if args.env not in envs:
                raise ResultsError(f"No results for environment {args.env!r} in {results_dir}")
            envs = [args.env]

        for env in envs:
            env_summaries = summaries[summaries["env"] == env]
            variants = [v for v in env_summaries["variant"] if not is_reference(v)]
            if not variants:
                variants = list(env_summaries["variant"])
            if not variants:
                raise ResultsError(f"No summary rows for environment {env!r}")

            series = []
            for variant in variants:
                row = env_summaries[env_summaries["variant"] == variant].iloc[0]
                cumulative = cumulative_matrix(runs, variant, env)
                episodes = cumulative.shape[1]
                mean, half_width = scaled_curve(
                    cumulative,
                    float(row["oracle_return"]) / episodes,
                    float(row["random_return"]) / episodes,
                )
                series.append(CurveSeries(_display_name(variant), mean, half_width))

            if args.output and len(envs) == 1:
                output = Path(args.output)
            elif args.output:
                output = Path(args.output).with_name(f"{Path(args.output).stem}_{env}.svg")
            else:
                output = results_dir / f"learning_curves_{env}.svg"
            write_learning_curve(output, series, title=f"Scaled mean cumulative reward: {env}")
            print(f"Wrote {output}")
    except BenchmarkError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK
