# SPDX-FileCopyrightText: Copyright (C) 2025 Omid Jafari <omidjafari.com>
# SPDX-License-Identifier: AGPL-3.0-or-later
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial

import numpy as np
from scipy import stats

from berkson_engine import about
from berkson_engine.components.data_generator import DataGenerator
from berkson_engine.components.importance import ErrorDensityImportance
from berkson_engine.components.importance import ImportanceDensity
from berkson_engine.components.importance import default_importance
from berkson_engine.data_structures.estimate_result import EstimateResult
from berkson_engine.data_structures.study_config import StudyConfig
from berkson_engine.data_structures.study_report import CoordinateSummary
from berkson_engine.data_structures.study_report import ReplicationRecord
from berkson_engine.data_structures.study_report import StudyReport
from berkson_engine.pipelines.base_pipeline import FitOptions
from berkson_engine.pipelines.single_pipeline import SinglePipeline
from berkson_engine.utils.errors import BerksonEngineError
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import OptimizationError
from berkson_engine.utils.utils import derive_seed

logger = logging.getLogger(__name__)

MAX_FAILURE_RATE = 0.05


def replication_seeds(master: int, index: int) -> dict[str, int]:
    return {
        "data": derive_seed(master, index),
        "draws": derive_seed(master, index, "draws"),
        "starts": derive_seed(master, index, "starts"),
    }


def study_importance(config: StudyConfig) -> ImportanceDensity:
    gen = config.gen
    if config.importance == "error_density":
        return ErrorDensityImportance(gen.model.f_delta, gen.gamma0.psi)

    return default_importance(gen.model, gen.effective_space(), df=config.importance_df)


def fit_replication(config: StudyConfig, index: int) -> EstimateResult:
    """Generates the dataset of replication ``index`` and fits it; no error handling."""
    gen = config.gen
    seeds = replication_seeds(gen.seed, index)
    data = DataGenerator(gen).generate(seeds["data"])
    options = FitOptions(
        two_stage=config.estimator == "mde2",
        multistart_count=config.multistarts,
        max_iterations=config.max_iterations,
        seed=seeds["starts"],
        level=config.level,
    )
    pipeline = SinglePipeline(gen.model, gen.effective_space(), options)

    if config.estimator == "se":
        return pipeline.fit_se(data, S=config.S, phi=study_importance(config), seed=seeds["draws"])

    return pipeline.fit_mde(data)


def run_replication(config: StudyConfig, index: int) -> ReplicationRecord:
    seed = replication_seeds(config.gen.seed, index)["data"]
    try:
        result = fit_replication(config, index)
    except (BerksonEngineError, np.linalg.LinAlgError, FloatingPointError) as e:
        return ReplicationRecord(index=index, seed=seed, error=f"{type(e).__name__}: {e}")

    return ReplicationRecord(
        index=index,
        seed=seed,
        estimate=result.gamma_hat.to_array().tolist(),
        std_errors=None if result.std_errors is None else result.std_errors.tolist(),
        converged=result.converged,
        boundary_hit=result.boundary_hit,
        objective_value=result.objective_value,
    )


def summarize(
    names: tuple[str, ...],
    truth: np.ndarray,
    records: list[ReplicationRecord],
    level: float = 0.95,
) -> list[CoordinateSummary]:
    """Per-coordinate bias, sd, RMSE, mean SE and Wald coverage over successful replications.

    ``sd`` uses the 1/R normalization, so RMSE^2 = bias^2 + sd^2 holds exactly. Bias, sd and RMSE use
    every successful replication; mean SE and coverage only those with standard errors, and the
    summary records how many that was next to the number of boundary fits.
    """
    done = [r for r in records if not r.failed]
    estimates = np.array([r.estimate for r in done], dtype=float).reshape(len(done), truth.size)
    with_se = [r for r in done if r.std_errors is not None]
    boundary = sum(r.boundary_hit for r in done)
    if len(with_se) < len(done):
        logger.warning(
            "Coverage uses %d of %d successful replications (%d on the box boundary)",
            len(with_se),
            len(done),
            boundary,
        )

    critical = stats.norm.ppf(0.5 + 0.5 * level)

    summary = []
    for j, name in enumerate(names):
        column = estimates[:, j]
        errors = column - truth[j]
        mean_se = None
        coverage = None
        if with_se:
            est = np.array([r.estimate[j] for r in with_se])  # type: ignore[index]
            se = np.array([r.std_errors[j] for r in with_se])  # type: ignore[index]
            mean_se = float(np.mean(se))
            coverage = float(np.mean(np.abs(est - truth[j]) <= critical * se))

        summary.append(
            CoordinateSummary(
                name=name,
                true=float(truth[j]),
                bias=float(np.mean(errors)),
                sd=float(np.std(column)),
                rmse=float(np.sqrt(np.mean(errors * errors))),
                mean_se=mean_se,
                coverage=coverage,
                n_covered=len(with_se),
                n_boundary=boundary,
            ),
        )

    return summary


class BatchPipeline:
    """Replication study: R independent (dataset, fit, sandwich) runs fanned out over processes.

    Every replication derives its seeds from the master seed and its index only, so the results do
    not depend on the worker count or on completion order.
    """

    def __init__(self, config: StudyConfig) -> None:
        if config.replications < 1 or config.workers < 1:
            message = f"Study needs replications >= 1 and workers >= 1, got {config.replications}, {config.workers}"
            raise ConfigError(message)

        DataGenerator(config.gen)
        self.config = config

    def process(self, processes: int | None = None) -> StudyReport:
        config = self.config
        workers = processes if processes is not None else config.workers
        indices = list(range(config.replications))
        started = time.perf_counter()
        logger.info(
            "Study of %s with %s: R=%d, n=%d, workers=%d",
            config.gen.model.name,
            config.estimator,
            config.replications,
            config.gen.n,
            workers,
        )

        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(partial(run_replication, config), indices, chunksize=1))
        else:
            records = [run_replication(config, i) for i in indices]

        failures = [r for r in records if r.failed]
        for record in failures:
            logger.info("Replication %d failed: %s", record.index, record.error)

        if len(failures) > MAX_FAILURE_RATE * config.replications:
            message = f"{len(failures)} of {config.replications} replications failed (limit {MAX_FAILURE_RATE:.0%})"
            raise OptimizationError(message)

        gen = config.gen
        report = StudyReport(
            software={"name": about.__title__, "version": about.__version__},
            config=dict(config.echo),
            seeds={
                "master": gen.seed,
                "replications": [{"index": i, **replication_seeds(gen.seed, i)} for i in indices],
            },
            summary=summarize(gen.model.param_names, gen.gamma0.to_array(), records, config.level),
            replications=records,
            failures=len(failures),
            timing={"total_seconds": time.perf_counter() - started},
        )
        logger.info("Study finished: %d replications, %d failures", config.replications, len(failures))
        return report


def run_study(config: StudyConfig) -> StudyReport:
    return BatchPipeline(config).process()
