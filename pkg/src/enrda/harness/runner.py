"""Replicated twin-experiment execution and artifact writing.

Within a replicate every assimilator consumes the identical truth and
observation realizations (paired design), while method-internal randomness
(model noise, observation atoms, resampling) comes from per-method streams.
Stream seeds derive from sha256(base_seed : replicate : scope : role), so a
rerun with the same base seed is byte-identical; bit-level reproducibility
across platforms or NumPy generations is not promised.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time as _time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..assimilation import observation_digest, run_assimilation_cycle
from ..assimilation.field_transport import couple_fields, field_transport_analysis
from ..dynamics import (
    Advection1DSpec,
    Advection2DSpec,
    DynamicsSpec,
    Lorenz63Spec,
    evolved_sources_field,
    heteroscedastic_covariance,
    make_truth_trajectory,
    propagate_members,
    synthesize_observations,
)
from ..assimilation.cycle import floored_diagonal
from ..ensembles import Ensemble
from .config import ExperimentConfig, to_dict
from .metrics import MetricSeries, compute_metrics

ARTIFACT_SCHEMA_VERSION = 1

STATE_COLUMNS = ("time", "dim", "truth", "obs", "method", "analysis_mean", "spread")
MEMBER_COLUMNS = ("time", "method", "member", "dim", "value")
DIAGNOSTIC_COLUMNS = (
    "time",
    "method",
    "transport_cost",
    "sinkhorn_iterations",
    "marginal_residual",
    "eta",
    "gamma",
    "effective_sample_size",
    "gain_norm",
    "background_weight",
    "observation_digest",
)
METRIC_COLUMNS = ("method", "scope", "time", "dim", "bias", "ubrmse")


def derive_seed(base_seed: int, replicate: int, scope: str, role: str) -> int:
    digest = hashlib.sha256(
        f"{base_seed}:{replicate}:{scope}:{role}".encode()
    ).digest()
    return int.from_bytes(digest[:8], "big")


def stream(base_seed: int, replicate: int, scope: str, role: str) -> np.random.Generator:
    return np.random.default_rng(derive_seed(base_seed, replicate, scope, role))


@dataclass
class MethodSeries:
    """One assimilator's outputs over the analysis cycles of a replicate."""

    name: str
    analysis_mean: np.ndarray  # (T, m)
    spread: np.ndarray  # (T, m)
    diagnostics: list[dict]
    members: np.ndarray | None  # (T, M, m) when member dumps are enabled
    metrics: MetricSeries


@dataclass
class ReplicateResult:
    replicate: int
    times: np.ndarray  # analysis times (T,)
    truth: np.ndarray  # (T, m)
    observations: np.ndarray  # (T, m)
    methods: list[MethodSeries]
    error: str | None = None


def _observation_kind(spec: DynamicsSpec):
    if isinstance(spec, Lorenz63Spec):
        return "correlated-gaussian", spec.observation_covariance()
    if isinstance(spec, Advection1DSpec):
        return "heteroscedastic", spec.observation_noise_fraction
    return "representativeness-2d", spec


def _observation_covariance(spec: DynamicsSpec, observation: np.ndarray) -> np.ndarray:
    """Covariance the assimilators use: exact for the correlated-Gaussian
    setup, a floored state-proportional diagonal for the advection runs."""
    if isinstance(spec, Lorenz63Spec):
        return spec.observation_covariance()
    return floored_diagonal(
        heteroscedastic_covariance(observation, spec.observation_noise_fraction)
    )


def _initial_members(
    spec: DynamicsSpec, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Shared initial ensemble: all methods start from the same members."""
    if isinstance(spec, Lorenz63Spec):
        center = np.asarray(spec.initial_state, dtype=float)
        spread = np.sqrt(spec.initial_spread_variance)
        return center[None, :] + spread * rng.standard_normal((size, 3))
    if isinstance(spec, Advection1DSpec):
        initial = evolved_sources_field(spec.truth, spec.sources).values
        # members start identical; per-step model noise diversifies them
        return np.tile(initial, (size, 1))
    raise ValueError("single-snapshot dynamics build their ensembles in place")


def run_replicate(cfg: ExperimentConfig, replicate: int) -> ReplicateResult:
    """Run every configured assimilator against one truth/observation
    realization; pure function of (cfg, replicate)."""
    spec = cfg.dynamics
    if isinstance(spec, Advection2DSpec):
        return _run_single_shot_replicate(cfg, replicate)

    interval = cfg.assimilation_interval
    obs_kind, obs_params = _observation_kind(spec)
    _, truth_states = make_truth_trajectory(spec, cfg.horizon)
    n_steps = truth_states.shape[0] - 1
    cycle_steps = list(range(interval, n_steps + 1, interval))
    times = spec.dt * np.asarray(cycle_steps, dtype=float)
    truth_at_cycles = truth_states[cycle_steps]

    obs_rng = stream(cfg.base_seed, replicate, "shared", "observation-noise")
    observations = np.stack(
        [
            synthesize_observations(truth_states[step], obs_kind, obs_params, obs_rng)
            for step in cycle_steps
        ]
    )

    init_rng = stream(cfg.base_seed, replicate, "shared", "initial-ensemble")
    max_size = max(a.ensemble_size for a in cfg.assimilators)
    initial_members = _initial_members(spec, max_size, init_rng)

    # temporal statistics sample the whole trajectory (forecast at every
    # model step, analysis at assimilation instants), which is what the
    # published error tables measure; snapshot statistics stay at analysis
    # instants
    trajectory_times = spec.dt * np.arange(1, n_steps + 1)
    truth_trajectory = truth_states[1:]

    methods = []
    for assim in cfg.assimilators:
        model_rng = stream(cfg.base_seed, replicate, assim.name, "model-noise")
        analysis_rng = stream(cfg.base_seed, replicate, assim.name, "analysis")
        if assim.method == "three_d_var":
            state = initial_members[0].copy()
        else:
            state = Ensemble(initial_members[: assim.ensemble_size].copy(), time=0.0)
        means = np.empty_like(truth_at_cycles)
        spreads = np.empty_like(truth_at_cycles)
        trajectory_means = np.empty_like(truth_trajectory)
        member_dump = (
            np.empty((len(cycle_steps), assim.ensemble_size, truth_states.shape[1]))
            if cfg.dump_members and assim.method != "three_d_var"
            else None
        )
        diagnostics = []
        step_cursor = 0
        for k, observation in enumerate(observations):
            for _ in range(interval):
                if assim.method == "three_d_var":
                    state = propagate_members(
                        state[None, :], spec, 1, rng=model_rng
                    )[0]
                    trajectory_means[step_cursor] = state
                else:
                    state = Ensemble(
                        propagate_members(state.members, spec, 1, rng=model_rng),
                        time=state.time + spec.dt,
                    )
                    trajectory_means[step_cursor] = state.mean()
                step_cursor += 1
            obs_cov = _observation_covariance(spec, observation)
            state, result = run_assimilation_cycle(
                state,
                observation,
                obs_cov,
                assim,
                spec,
                0,
                model_rng,
                analysis_rng,
            )
            means[k] = result.mean()
            spreads[k] = result.spread()
            trajectory_means[step_cursor - 1] = result.mean()
            record = result.diagnostics.as_dict()
            record["time"] = times[k]
            diagnostics.append(record)
            if member_dump is not None:
                member_dump[k] = result.ensemble.members
        temporal = compute_metrics(
            trajectory_times, trajectory_means, truth_trajectory, cfg.bias_mode
        )
        snapshots = compute_metrics(times, means, truth_at_cycles, cfg.bias_mode)
        metric = MetricSeries(
            times=times,
            bias_per_dim=temporal.bias_per_dim,
            ubrmse_per_dim=temporal.ubrmse_per_dim,
            bias_overall=temporal.bias_overall,
            ubrmse_overall=temporal.ubrmse_overall,
            cycle_bias=snapshots.cycle_bias,
            cycle_ubrmse=snapshots.cycle_ubrmse,
            bias_mode=cfg.bias_mode,
        )
        methods.append(
            MethodSeries(
                name=assim.name,
                analysis_mean=means,
                spread=spreads,
                diagnostics=diagnostics,
                members=member_dump,
                metrics=metric,
            )
        )
    return ReplicateResult(
        replicate=replicate,
        times=times,
        truth=truth_at_cycles,
        observations=observations,
        methods=methods,
    )


def _run_single_shot_replicate(cfg: ExperimentConfig, replicate: int) -> ReplicateResult:
    """The 2-D setup: truth, biased background, and representativeness-error
    observations are closed-form fields; one analysis, no cycling."""
    spec = cfg.dynamics
    truth = evolved_sources_field(spec.truth, spec.sources).values.ravel()
    background = evolved_sources_field(spec.biased, spec.sources).values.ravel()

    obs_rng = stream(cfg.base_seed, replicate, "shared", "observation-noise")
    observation = synthesize_observations(
        truth, "representativeness-2d", spec, obs_rng
    ).ravel()
    obs_cov = _observation_covariance(spec, observation)

    init_rng = stream(cfg.base_seed, replicate, "shared", "initial-ensemble")
    max_size = max(a.ensemble_size for a in cfg.assimilators)
    # ensemble spread around the biased background via the model-noise law
    noise = np.sqrt(spec.model_noise.level) * np.abs(background)
    initial_members = background[None, :] + noise[None, :] * init_rng.standard_normal(
        (max_size, background.size)
    )

    times = np.zeros(1)
    axes = spec.truth.axes()
    couplings: dict[tuple, object] = {}
    methods = []
    for assim in cfg.assimilators:
        analysis_rng = stream(cfg.base_seed, replicate, assim.name, "analysis")
        if assim.method == "enrda" and assim.transport_space == "field":
            # the coupling is eta-independent: share it across the sweep
            key = (assim.gamma.value, assim.sinkhorn.tolerance, assim.sinkhorn.max_iterations)
            if key not in couplings:
                couplings[key] = couple_fields(
                    background.reshape(spec.truth.shape),
                    observation.reshape(spec.truth.shape),
                    axes,
                    assim.gamma.value,
                    assim.sinkhorn,
                )
            analysis_field, info = field_transport_analysis(
                background.reshape(spec.truth.shape),
                observation.reshape(spec.truth.shape),
                axes,
                eta=assim.eta.value,
                gamma=assim.gamma.value,
                settings=assim.sinkhorn,
                coupling=couplings[key],
            )
            means = analysis_field.reshape(1, -1)
            spreads = np.zeros_like(means)
            record = {column: None for column in DIAGNOSTIC_COLUMNS}
            record.update(info)
            record["method"] = assim.name
            record["time"] = 0.0
            record["observation_digest"] = observation_digest(observation)
            metric = compute_metrics(times, means, truth[None, :], cfg.bias_mode)
            methods.append(
                MethodSeries(
                    name=assim.name,
                    analysis_mean=means,
                    spread=spreads,
                    diagnostics=[record],
                    members=None,
                    metrics=metric,
                )
            )
            continue
        if assim.method == "three_d_var":
            state = background.copy()
        else:
            state = Ensemble(initial_members[: assim.ensemble_size].copy(), time=0.0)
        state, result = run_assimilation_cycle(
            state,
            observation,
            obs_cov,
            assim,
            spec,
            0,
            None,
            analysis_rng,
            noise_fraction=spec.model_noise.level,
        )
        means = result.mean()[None, :]
        spreads = result.spread()[None, :]
        record = result.diagnostics.as_dict()
        record["time"] = 0.0
        metric = compute_metrics(times, means, truth[None, :], cfg.bias_mode)
        methods.append(
            MethodSeries(
                name=assim.name,
                analysis_mean=means,
                spread=spreads,
                diagnostics=[record],
                members=None,
                metrics=metric,
            )
        )
    return ReplicateResult(
        replicate=replicate,
        times=times,
        truth=truth[None, :],
        observations=observation[None, :],
        methods=methods,
    )


def _format(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        # full precision, and plain Python repr for NumPy scalars too
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, columns: tuple[str, ...], rows) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format(v) for v in row])


def _state_rows(result: ReplicateResult):
    for k, t in enumerate(result.times):
        for series in result.methods:
            for dim in range(result.truth.shape[1]):
                yield (
                    t,
                    dim,
                    result.truth[k, dim],
                    result.observations[k, dim],
                    series.name,
                    series.analysis_mean[k, dim],
                    series.spread[k, dim],
                )


def _member_rows(result: ReplicateResult):
    for series in result.methods:
        if series.members is None:
            continue
        for k, t in enumerate(result.times):
            for member in range(series.members.shape[1]):
                for dim in range(series.members.shape[2]):
                    yield (t, series.name, member, dim, series.members[k, member, dim])


def _diagnostic_rows(result: ReplicateResult):
    for series in result.methods:
        for record in series.diagnostics:
            yield tuple(record.get(column) for column in DIAGNOSTIC_COLUMNS)


def _metric_rows(result: ReplicateResult, max_dim_rows: int = 16):
    for series in result.methods:
        metric = series.metrics
        yield (series.name, "overall", "", "", metric.bias_overall, metric.ubrmse_overall)
        for k, t in enumerate(metric.times):
            yield (series.name, "cycle", t, "", metric.cycle_bias[k], metric.cycle_ubrmse[k])
        if metric.bias_per_dim.size <= max_dim_rows and metric.times.size > 1:
            for dim in range(metric.bias_per_dim.size):
                yield (
                    series.name,
                    "dim",
                    "",
                    dim,
                    metric.bias_per_dim[dim],
                    metric.ubrmse_per_dim[dim],
                )


def write_replicate_artifacts(
    result: ReplicateResult, out_dir: Path, dump_members: bool
) -> None:
    tag = f"r{result.replicate:04d}"
    _write_csv(out_dir / f"states_{tag}.csv", STATE_COLUMNS, _state_rows(result))
    _write_csv(
        out_dir / f"diagnostics_{tag}.csv", DIAGNOSTIC_COLUMNS, _diagnostic_rows(result)
    )
    _write_csv(out_dir / f"metrics_{tag}.csv", METRIC_COLUMNS, _metric_rows(result))
    if dump_members and any(series.members is not None for series in result.methods):
        _write_csv(out_dir / f"members_{tag}.csv", MEMBER_COLUMNS, _member_rows(result))


def aggregate_summary(cfg: ExperimentConfig, results: list[ReplicateResult], elapsed: float) -> dict:
    """Replicate-mean metrics per method (the summary-table analogue) plus
    the config echo."""
    methods = {}
    completed = [r for r in results if r.error is None]
    for assim in cfg.assimilators:
        per_replicate = []
        for result in completed:
            series = next(s for s in result.methods if s.name == assim.name)
            per_replicate.append(series.metrics)
        if not per_replicate:
            continue
        dims = per_replicate[0].bias_per_dim.size
        entry = {
            "bias_overall": float(np.mean([m.bias_overall for m in per_replicate])),
            "ubrmse_overall": float(np.mean([m.ubrmse_overall for m in per_replicate])),
            "cycle_times": [float(t) for t in per_replicate[0].times],
            "cycle_bias": [
                float(v) for v in np.mean([m.cycle_bias for m in per_replicate], axis=0)
            ],
            "cycle_ubrmse": [
                float(v)
                for v in np.mean([m.cycle_ubrmse for m in per_replicate], axis=0)
            ],
        }
        if dims <= 16 and per_replicate[0].times.size > 1:
            entry["bias_per_dim"] = [
                float(v) for v in np.mean([m.bias_per_dim for m in per_replicate], axis=0)
            ]
            entry["ubrmse_per_dim"] = [
                float(v)
                for v in np.mean([m.ubrmse_per_dim for m in per_replicate], axis=0)
            ]
        methods[assim.name] = entry
    return {
        "schema_version": ARTIFACT_SCHEMA_VERSION,
        "config": to_dict(cfg),
        "replicates_completed": len(completed),
        "replicates_failed": [
            {"replicate": r.replicate, "error": r.error} for r in results if r.error
        ],
        "bias_mode": cfg.bias_mode,
        "metric_definitions": {
            "bias": "absolute value of the time-mean analysis-minus-truth error"
            if cfg.bias_mode == "absolute_mean"
            else "time mean of the absolute analysis-minus-truth error",
            "ubrmse": "root mean squared error after removing both series' means",
        },
        "elapsed_seconds": elapsed,
        "methods": methods,
    }


def _replicate_task(args: tuple) -> ReplicateResult:
    cfg, replicate = args
    try:
        return run_replicate(cfg, replicate)
    except Exception as err:  # noqa: BLE001 - a replicate failure must not kill the run
        return ReplicateResult(
            replicate=replicate,
            times=np.zeros(0),
            truth=np.zeros((0, 1)),
            observations=np.zeros((0, 1)),
            methods=[],
            error=f"{type(err).__name__}: {err}",
        )


def run_experiment(
    cfg: ExperimentConfig,
    output_dir: str | Path | None = None,
    workers: int | None = None,
) -> dict:
    """Run all replicates, write per-replicate CSVs plus the aggregate JSON
    summary, and return the summary dict.

    Failed replicates are recorded in the summary and skipped by the
    aggregation; the caller decides the exit status.
    """
    out = cfg.resolved_output_dir(
        str(output_dir) if output_dir is not None else None
    )
    out.mkdir(parents=True, exist_ok=True)
    workers = workers or cfg.workers or 1
    started = _time.perf_counter()
    tasks = [(cfg, r) for r in range(cfg.replicates)]
    if workers > 1 and cfg.replicates > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_replicate_task, tasks))
    else:
        results = [_replicate_task(t) for t in tasks]
    results.sort(key=lambda r: r.replicate)
    for result in results:
        if result.error is None:
            write_replicate_artifacts(result, out, cfg.dump_members)
    summary = aggregate_summary(cfg, results, _time.perf_counter() - started)
    with open(out / "summary.json", "w") as handle:
        json.dump(summary, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return summary
