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

from dataclasses import replace

import numpy as np
import pytest

from berkson_engine.components.data_generator import DataGenerator
from berkson_engine.components.importance import ErrorDensityImportance
from berkson_engine.components.importance import build_draw_store
from berkson_engine.components.importance import default_importance
from berkson_engine.components.inference import estimate_C
from berkson_engine.components.inference import estimate_CS
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.moment_sources import ClosedFormSource
from berkson_engine.components.objective import WeightScheme
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.data_structures.param_vector import ParamVector
from berkson_engine.data_structures.study_config import Estimator
from berkson_engine.data_structures.study_config import GenConfig
from berkson_engine.data_structures.study_config import StudyConfig
from berkson_engine.data_structures.study_report import StudyReport
from berkson_engine.pipelines.base_pipeline import FitOptions
from berkson_engine.pipelines.batch_pipeline import run_study
from berkson_engine.pipelines.single_pipeline import SinglePipeline
from berkson_engine.utils.io import dumps_report

pytestmark = pytest.mark.slow

WORKERS = 4
# sigma_delta^2 = 0.25 keeps E exp(4 theta2 X2) near e^2 and every coordinate several SEs inside the default box.
INTERIOR_GAMMA = np.array([1.0, 1.0, 1.0, 0.25, 1.0])
MAX_BOUNDARY_RATE = 0.02


@pytest.fixture
def example1_gen(example1: ModelSpec) -> GenConfig:
    return GenConfig(
        model=example1,
        gamma0=ParamVector.from_array(INTERIOR_GAMMA, example1.p, example1.q),
        n=4000,
        seed=2024,
    )


def study(gen: GenConfig, replications: int, estimator: Estimator = "mde") -> StudyReport:
    config = StudyConfig(gen=gen, estimator=estimator, replications=replications, multistarts=2, workers=WORKERS)
    report = run_study(config)
    assert report.failures <= 0.05 * replications
    assert report.summary[0].n_boundary <= MAX_BOUNDARY_RATE * replications
    return report


def rmse(report: StudyReport) -> np.ndarray:
    return np.array([s.rmse for s in report.summary])


def test_simulators_agree_with_closed_forms(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    rng = np.random.default_rng(0)
    z = rng.uniform(-1.0, 1.0, size=(10, 2))
    store = build_draw_store(10, 50_000, 2, default_importance(example1), seed=1)
    simulated = SimulatedMoments(example1, store)
    theta, _, _ = example1.split(gamma_example1)

    m1, m2 = simulated.moments(z, gamma_example1, "pooled")
    exact_m1, exact_m2 = ClosedFormSource(example1).moments(z, gamma_example1)
    w = simulated.weights(gamma_example1)
    g = example1.eval_g(z[:, None, :] + store.draws, theta)
    scale = np.sqrt(2 * store.S)

    assert np.all(np.abs(m1 - exact_m1) <= 4.0 * np.std(g * w, axis=1) / scale)
    assert np.all(np.abs(m2 - exact_m2) <= 4.0 * np.std(g * g * w, axis=1) / scale)


def test_mde_is_consistent(example1_gen: GenConfig) -> None:
    report = study(example1_gen, 200)

    for coordinate in report.summary:
        assert abs(coordinate.bias) < 3.0 * coordinate.sd / np.sqrt(200), coordinate.name


def test_root_n_rate(example1_gen: GenConfig) -> None:
    small = study(replace(example1_gen, n=2000), 200)
    large = study(replace(example1_gen, n=8000), 200)

    ratio = rmse(small) / rmse(large)
    assert np.all((ratio >= 1.6) & (ratio <= 2.5)), ratio.tolist()


def test_wald_coverage(example1_gen: GenConfig) -> None:
    report = study(example1_gen, 300)

    for coordinate in report.summary:
        assert coordinate.coverage is not None
        assert coordinate.n_covered >= 0.98 * 300
        assert 0.91 <= coordinate.coverage <= 0.98, coordinate.name


def test_two_stage_weighting_is_not_less_efficient(example1_gen: GenConfig) -> None:
    identity = study(example1_gen, 200)
    two_stage = study(example1_gen, 200, estimator="mde2")

    identity_trace = sum(s.sd**2 for s in identity.summary)
    two_stage_trace = sum(s.sd**2 for s in two_stage.summary)
    assert two_stage_trace <= 1.05 * identity_trace


def test_se_agrees_with_mde_on_fixed_data(example1_gen: GenConfig) -> None:
    data = DataGenerator(example1_gen).generate()
    pipeline = SinglePipeline(example1_gen.model, options=FitOptions(multistart_count=3, seed=0))
    mde = pipeline.fit_mde(data)
    se = pipeline.fit_se(data, S=400, seed=5)

    assert mde.has_inference
    assert np.all(np.abs(mde.gamma_hat.to_array() - INTERIOR_GAMMA) < 4.0 * mde.std_errors)
    gap = np.abs(se.gamma_hat.to_array() - mde.gamma_hat.to_array())
    assert np.all(gap < 3.0 * mde.std_errors), gap.tolist()


def test_se_equals_mde_for_the_degenerate_model(constant_model: ModelSpec) -> None:
    gen = GenConfig(
        model=constant_model,
        gamma0=ParamVector(theta=np.array([0.75]), psi=np.zeros(0), sigma_eps2=0.5),
        n=2000,
        seed=8,
    )
    data = DataGenerator(gen).generate()
    pipeline = SinglePipeline(constant_model, options=FitOptions(multistart_count=3, seed=0))
    store = build_draw_store(data.n, 16, 1, ErrorDensityImportance(constant_model.f_delta), seed=0)

    np.testing.assert_allclose(
        pipeline.fit_se(data, store=store).gamma_hat.to_array(),
        pipeline.fit_mde(data).gamma_hat.to_array(),
        atol=1e-6,
    )


def test_efficiency_loss_shrinks_like_one_over_S(example1_gen: GenConfig) -> None:
    model = example1_gen.model
    data = DataGenerator(replace(example1_gen, n=2000)).generate()
    gamma0 = example1_gen.gamma0.to_array()
    weight = WeightScheme.identity()
    phi = default_importance(model)
    c_hat = estimate_C(data, gamma0, weight, ClosedFormSource(model))

    sizes = np.array([25, 100, 400])
    mean_traces = []
    for S in sizes:
        traces = [
            np.trace(estimate_CS(data, gamma0, weight, SimulatedMoments(model, build_draw_store(data.n, S, 2, phi, s))))
            - np.trace(c_hat)
            for s in range(100)
        ]
        mean_traces.append(np.mean(traces))

    inverse = 1.0 / sizes
    slope, intercept = np.polyfit(inverse, mean_traces, 1)
    fitted = slope * inverse + intercept
    residual = np.sum((np.array(mean_traces) - fitted) ** 2)
    total = np.sum((np.array(mean_traces) - np.mean(mean_traces)) ** 2)

    assert slope > 0
    assert 1.0 - residual / total >= 0.8


def test_studies_are_byte_identical(example1_gen: GenConfig) -> None:
    config = StudyConfig(gen=replace(example1_gen, n=500), replications=8, multistarts=2, workers=1)

    first = dumps_report(run_study(config).to_dict(include_timing=False))
    second = dumps_report(run_study(replace(config, workers=WORKERS)).to_dict(include_timing=False))
    assert first == second
