"""Experiment runner: multi-seed comparisons with file-based config.

Loads one JSON document describing the space, the synthetic system
under test, the fitness threshold and a list of algorithm variants,
runs every variant over the same derived per-run seeds (so warm-up
phases are paired across variants), and writes deterministic,
plot-ready outputs:

* tests.csv      -- one row per executed test across all runs
* summary.json   -- per-variant statistics plus oracle facts and a
                    config echo
* histogram.csv  -- fitness histogram per variant (last bin holds the
                    fitness-1 tests)
* sma.csv        -- moving average over the cross-run mean fitness per
                    test index

Everything downstream of the master seed is deterministic, so repeated
invocations produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .gan import GanHyperparams
from .generators import (
    AlgorithmConfig,
    TestSuite,
    run_dn,
    run_ogan,
    run_random,
)
from .rng import derive_run_seed
from .space import Dimension, InputSpace, cardinality
from .sut import FitnessSpec, SyntheticSut, calibrate_gain

log = logging.getLogger(__name__)

ALGORITHM_KINDS = ("random", "dn", "ogan")

TESTS_CSV_HEADER = [
    "run_id", "algorithm", "seed", "test_index",
    "big_cpus", "big_freq", "big_util",
    "little_cpus", "little_freq", "little_util",
    "power_w", "fitness", "inner_iterations", "candidate_trials",
]


class ConfigError(Exception):
    """Invalid experiment configuration; the message names the field."""


@dataclass(frozen=True)
class AlgorithmVariant:
    label: str
    kind: str
    config: AlgorithmConfig


@dataclass
class ExperimentConfig:
    space: InputSpace
    sut: SyntheticSut
    fitness: FitnessSpec
    algorithms: list[AlgorithmVariant]
    runs: int = 10
    master_seed: int = 0
    sma_window: int = 10
    histogram_bins: int = 10
    output_dir: Path | None = None
    target_density: float | None = None


@dataclass(frozen=True)
class RunResult:
    algorithm: str
    seed: int
    suite: TestSuite
    duration_s: float


@dataclass
class AlgorithmSummary:
    label: str
    kind: str
    positive_counts: list[int]
    mean_positive_count: float
    stddev_positive_count: float
    mean_fitness: float
    mean_inner_iterations: float | None
    mean_candidate_trials: float | None
    histogram: list[int]
    sma: list[float]


@dataclass
class Summary:
    oracle_cardinality: int
    oracle_positive_count: int
    oracle_density: float
    gain: float
    algorithms: list[AlgorithmSummary]


def sma(series: list[float], window: int) -> list[float]:
    """Simple moving average; element j covers series[j : j+window]."""
    if window < 1:
        raise ValueError("window must be >= 1")
    if window > len(series):
        raise ValueError(f"window {window} exceeds series length {len(series)}")
    arr = np.asarray(series, dtype=np.float64)
    kernel = np.ones(window) / window
    return [float(v) for v in np.convolve(arr, kernel, mode="valid")]


def histogram(values: list[float], bins: int) -> list[int]:
    """Equal-width counts over [0, 1]; a value of exactly 1 lands in the
    last bin, so with fitness data that bin counts the positive tests."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts = [0] * bins
    for v in values:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"value {v} outside [0, 1]")
        counts[min(int(v * bins), bins - 1)] += 1
    return counts


# ---------------------------------------------------------------------------
# config loading


def _require(mapping: dict, key: str, path: str) -> Any:
    if key not in mapping:
        raise ConfigError(f"{path}.{key}: missing required field")
    return mapping[key]


def _as_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}: expected an integer, got {value!r}")
    return value


def _load_space(raw: Any) -> InputSpace:
    if not isinstance(raw, list) or len(raw) != 6:
        raise ConfigError("space: expected an array of 6 dimensions")
    dims = []
    for j, entry in enumerate(raw):
        path = f"space[{j}]"
        if not isinstance(entry, dict):
            raise ConfigError(f"{path}: expected an object")
        name = _require(entry, "name", path)
        levels = _require(entry, "levels", path)
        if not isinstance(levels, list) or not levels:
            raise ConfigError(f"{path}.levels: expected a nonempty array")
        try:
            dims.append(
                Dimension(str(name), tuple(_as_number(v, f"{path}.levels") for v in levels))
            )
        except ValueError as exc:
            raise ConfigError(f"{path}.levels: {exc}") from exc
    return InputSpace(dims=tuple(dims))


def _load_gan(raw: Any, path: str) -> GanHyperparams:
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected an object")
    kwargs: dict[str, Any] = {}
    for key in ("disc_epochs", "gen_epochs", "minibatch", "gen_samples_per_round"):
        if key in raw:
            kwargs[key] = _as_int(raw[key], f"{path}.{key}")
    unknown = set(raw) - {"disc_epochs", "gen_epochs", "minibatch", "gen_samples_per_round"}
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")
    try:
        return GanHyperparams(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _load_algorithm(raw: Any, index: int, space: InputSpace) -> AlgorithmVariant:
    path = f"algorithms[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = _require(raw, "kind", path)
    if kind not in ALGORITHM_KINDS:
        raise ConfigError(f"{path}.kind: must be one of {ALGORITHM_KINDS}")
    kwargs: dict[str, Any] = {}
    for key in ("budget", "warmup", "batchsize", "fallback_after"):
        if key in raw:
            kwargs[key] = _as_int(raw[key], f"{path}.{key}")
    if "treducer" in raw:
        kwargs["treducer"] = _as_number(raw["treducer"], f"{path}.treducer")
    if "gan" in raw:
        kwargs["gan"] = _load_gan(raw["gan"], f"{path}.gan")
    known = {"kind", "label", "budget", "warmup", "treducer", "batchsize",
             "gan", "fallback_after"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")
    try:
        config = AlgorithmConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if config.budget > cardinality(space):
        raise ConfigError(
            f"{path}.budget: exceeds space cardinality {cardinality(space)}"
        )
    default_label = kind if kind != "dn" else f"dn_bs{config.batchsize}"
    label = str(raw.get("label", default_label))
    return AlgorithmVariant(label=label, kind=kind, config=config)


def load_config(path: str | Path, output_dir: str | Path | None = None) -> ExperimentConfig:
    """Parse and validate a JSON experiment configuration file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    return parse_config(raw, output_dir=output_dir)


def parse_config(raw: dict, output_dir: str | Path | None = None) -> ExperimentConfig:
    space = _load_space(_require(raw, "space", "top level"))

    sut_raw = _require(raw, "sut", "top level")
    if not isinstance(sut_raw, dict):
        raise ConfigError("sut: expected an object")
    sut_kwargs = {}
    for key in ("p_idle", "kappa_big", "kappa_little", "gain"):
        if key in sut_raw:
            sut_kwargs[key] = _as_number(sut_raw[key], f"sut.{key}")
    target_density = None
    if "target_density" in sut_raw:
        if "gain" in sut_raw:
            raise ConfigError("sut.target_density: give either gain or target_density")
        target_density = _as_number(sut_raw["target_density"], "sut.target_density")
    try:
        sut = SyntheticSut(**sut_kwargs)
    except ValueError as exc:
        raise ConfigError(f"sut: {exc}") from exc

    fitness_raw = raw.get("fitness", {})
    if not isinstance(fitness_raw, dict):
        raise ConfigError("fitness: expected an object")
    try:
        fitness = FitnessSpec(p_m=_as_number(fitness_raw.get("p_m", 6.0), "fitness.p_m"))
    except ValueError as exc:
        raise ConfigError(f"fitness.p_m: {exc}") from exc

    algorithms_raw = _require(raw, "algorithms", "top level")
    if not isinstance(algorithms_raw, list) or not algorithms_raw:
        raise ConfigError("algorithms: expected a nonempty array")
    algorithms = [
        _load_algorithm(entry, i, space) for i, entry in enumerate(algorithms_raw)
    ]
    labels = [v.label for v in algorithms]
    if len(set(labels)) != len(labels):
        raise ConfigError("algorithms: labels must be distinct (set 'label')")

    runs = _as_int(raw.get("runs", 10), "runs")
    if runs < 1:
        raise ConfigError("runs: must be >= 1")
    master_seed = _as_int(raw.get("master_seed", 0), "master_seed")
    sma_window = _as_int(raw.get("sma_window", 10), "sma_window")
    histogram_bins = _as_int(raw.get("histogram_bins", 10), "histogram_bins")
    if sma_window < 1:
        raise ConfigError("sma_window: must be >= 1")
    if histogram_bins < 1:
        raise ConfigError("histogram_bins: must be >= 1")
    for variant in algorithms:
        if sma_window > variant.config.budget:
            raise ConfigError(
                f"sma_window: exceeds budget of algorithm {variant.label!r}"
            )

    out = output_dir if output_dir is not None else raw.get("output_dir")
    cfg = ExperimentConfig(
        space=space,
        sut=sut,
        fitness=fitness,
        algorithms=algorithms,
        runs=runs,
        master_seed=master_seed,
        sma_window=sma_window,
        histogram_bins=histogram_bins,
        output_dir=Path(out) if out is not None else None,
        target_density=target_density,
    )
    if target_density is not None:
        cfg.sut = calibrate_gain(sut, space, fitness, target_density)
    return cfg


# ---------------------------------------------------------------------------
# running


_RUNNERS = {"random": run_random, "dn": run_dn, "ogan": run_ogan}


def run_experiment(
    cfg: ExperimentConfig, run_seeds: list[int] | None = None
) -> tuple[list[RunResult], Summary]:
    """Run every algorithm variant over the per-run seeds and summarize.

    Seeds default to derive_run_seed(master_seed, i) for i in
    range(runs): the same run index gives every variant the same seed,
    pairing their warm-up phases.  Writes output files when the config
    names an output directory.
    """
    if run_seeds is None:
        run_seeds = [derive_run_seed(cfg.master_seed, i) for i in range(cfg.runs)]
    if len(run_seeds) != cfg.runs:
        raise ValueError("run_seeds must have one entry per run")

    results: list[RunResult] = []
    for variant in cfg.algorithms:
        runner = _RUNNERS[variant.kind]
        for i, seed in enumerate(run_seeds):
            start = time.perf_counter()
            suite = runner(cfg.space, cfg.sut, cfg.fitness, variant.config, seed)
            duration = time.perf_counter() - start
            positives = sum(1 for r in suite.records if r.fitness == 1.0)
            log.info(
                "%s run %d/%d: %d positives in %.2fs",
                variant.label, i + 1, cfg.runs, positives, duration,
            )
            results.append(
                RunResult(algorithm=variant.label, seed=seed, suite=suite,
                          duration_s=duration)
            )

    summary = summarize(cfg, results)
    if cfg.output_dir is not None:
        emit_outputs(results, summary, cfg)
    return results, summary


def summarize(cfg: ExperimentConfig, results: list[RunResult]) -> Summary:
    total = cardinality(cfg.space)
    oracle_positives = int(
        np.count_nonzero(cfg.sut.power_grid(cfg.space) >= cfg.fitness.p_m)
    )
    algo_summaries = []
    for variant in cfg.algorithms:
        suites = [r.suite for r in results if r.algorithm == variant.label]
        positives = [
            sum(1 for rec in s.records if rec.fitness == 1.0) for s in suites
        ]
        all_fitness = [rec.fitness for s in suites for rec in s.records]
        post = [
            rec
            for s in suites
            for rec in s.records
            if rec.test_index >= variant.config.warmup
        ]
        per_index = np.array([[rec.fitness for rec in s.records] for s in suites])
        mean_series = per_index.mean(axis=0)
        algo_summaries.append(
            AlgorithmSummary(
                label=variant.label,
                kind=variant.kind,
                positive_counts=positives,
                mean_positive_count=float(np.mean(positives)),
                stddev_positive_count=(
                    float(np.std(positives, ddof=1)) if len(positives) > 1 else 0.0
                ),
                mean_fitness=float(np.mean(all_fitness)),
                mean_inner_iterations=(
                    float(np.mean([r.inner_iterations for r in post])) if post else None
                ),
                mean_candidate_trials=(
                    float(np.mean([r.candidate_trials for r in post])) if post else None
                ),
                histogram=histogram(all_fitness, cfg.histogram_bins),
                sma=sma([float(v) for v in mean_series], cfg.sma_window),
            )
        )
    return Summary(
        oracle_cardinality=total,
        oracle_positive_count=oracle_positives,
        oracle_density=oracle_positives / total,
        gain=cfg.sut.gain,
        algorithms=algo_summaries,
    )


# ---------------------------------------------------------------------------
# output files


def _config_echo(cfg: ExperimentConfig) -> dict:
    # output_dir and wall-clock data stay out: two invocations with the
    # same master seed must produce byte-identical files
    return {
        "space": [
            {"name": d.name, "levels": list(d.levels)} for d in cfg.space.dims
        ],
        "sut": {
            "p_idle": cfg.sut.p_idle,
            "kappa_big": cfg.sut.kappa_big,
            "kappa_little": cfg.sut.kappa_little,
            "gain": cfg.sut.gain,
            "target_density": cfg.target_density,
        },
        "fitness": {"p_m": cfg.fitness.p_m},
        "algorithms": [
            {
                "label": v.label,
                "kind": v.kind,
                "budget": v.config.budget,
                "warmup": v.config.warmup,
                "treducer": v.config.treducer,
                "batchsize": v.config.batchsize,
                "fallback_after": v.config.fallback_after,
                "gan": {
                    "disc_epochs": v.config.gan.disc_epochs,
                    "gen_epochs": v.config.gan.gen_epochs,
                    "minibatch": v.config.gan.minibatch,
                    "gen_samples_per_round": v.config.gan.gen_samples_per_round,
                },
            }
            for v in cfg.algorithms
        ],
        "runs": cfg.runs,
        "master_seed": cfg.master_seed,
        "sma_window": cfg.sma_window,
        "histogram_bins": cfg.histogram_bins,
    }


def summary_to_dict(summary: Summary, cfg: ExperimentConfig) -> dict:
    return {
        "oracle": {
            "cardinality": summary.oracle_cardinality,
            "positive_count": summary.oracle_positive_count,
            "density": summary.oracle_density,
            "gain": summary.gain,
        },
        "algorithms": {
            a.label: {
                "kind": a.kind,
                "positive_counts": a.positive_counts,
                "mean_positive_count": a.mean_positive_count,
                "stddev_positive_count": a.stddev_positive_count,
                "mean_fitness": a.mean_fitness,
                "mean_inner_iterations": a.mean_inner_iterations,
                "mean_candidate_trials": a.mean_candidate_trials,
                "histogram": a.histogram,
                "sma": a.sma,
            }
            for a in summary.algorithms
        },
        "config": _config_echo(cfg),
    }


def emit_outputs(
    results: list[RunResult], summary: Summary, cfg: ExperimentConfig
) -> list[Path]:
    """Write tests.csv, summary.json, histogram.csv and sma.csv."""
    out = cfg.output_dir
    if out is None:
        raise ValueError("config has no output directory")
    out.mkdir(parents=True, exist_ok=True)
    written = []

    tests_path = out / "tests.csv"
    with tests_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TESTS_CSV_HEADER)
        for variant in cfg.algorithms:
            run_id = 0
            for result in results:
                if result.algorithm != variant.label:
                    continue
                for rec in result.suite.records:
                    values = cfg.space.physical_values(rec.input)
                    writer.writerow(
                        [run_id, variant.label, result.seed, rec.test_index]
                        + [repr(v) for v in values]
                        + [
                            repr(rec.power),
                            repr(rec.fitness),
                            rec.inner_iterations,
                            rec.candidate_trials,
                        ]
                    )
                run_id += 1
    written.append(tests_path)

    summary_path = out / "summary.json"
    payload = summary_to_dict(summary, cfg)
    summary_path.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(summary_path)

    hist_path = out / "histogram.csv"
    with hist_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm", "bin_index", "bin_low", "bin_high", "count"])
        for a in summary.algorithms:
            bins = len(a.histogram)
            for j, count in enumerate(a.histogram):
                writer.writerow(
                    [a.label, j, repr(j / bins), repr((j + 1) / bins), count]
                )
    written.append(hist_path)

    sma_path = out / "sma.csv"
    with sma_path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["algorithm", "window_start", "sma_mean_fitness"])
        for a in summary.algorithms:
            for j, value in enumerate(a.sma):
                writer.writerow([a.label, j, repr(value)])
    written.append(sma_path)

    return written
