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

import numpy as np
import pytest

from berkson_engine.components.inference import SandwichParts
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.estimate_result import EstimateResult
from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.data_structures.param_vector import ParamVector
from berkson_engine.pipelines.base_pipeline import BasePipeline
from berkson_engine.pipelines.base_pipeline import FitOptions
from berkson_engine.utils.errors import ConfigError


def make_result(*, boundary_hit: bool = False) -> EstimateResult:
    return EstimateResult(
        gamma_hat=ParamVector(theta=np.array([0.5]), psi=np.zeros(0), sigma_eps2=1.0),
        objective_value=0.0,
        converged=True,
        boundary_hit=boundary_hit,
        n_evals=1,
        weight_used=np.eye(2),
    )


def unreachable() -> SandwichParts:
    message = "inference should not be attempted"
    raise AssertionError(message)


@pytest.mark.parametrize(
    "kwargs",
    [{"multistart_count": 0}, {"max_iterations": 0}, {"xatol": 0.0}, {"fatol": -1e-3}],
)
def test_invalid_options(kwargs: dict) -> None:
    with pytest.raises(ConfigError):
        FitOptions(**kwargs)


def test_with_overrides_skips_missing_values() -> None:
    options = FitOptions().with_overrides(multistart_count=2, seed=None, two_stage=True)

    assert options.multistart_count == 2
    assert options.seed == 0
    assert options.two_stage


def test_box_must_match_the_model(constant_model: ModelSpec) -> None:
    space = ParamSpace(lower=np.zeros(3), upper=np.ones(3))

    with pytest.raises(ConfigError, match="3 coordinates"):
        BasePipeline(constant_model, space)


def test_default_box(constant_model: ModelSpec) -> None:
    pipeline = BasePipeline(constant_model)

    np.testing.assert_array_equal(pipeline.space.lower, constant_model.default_space().lower)
    np.testing.assert_array_equal(pipeline.space.upper, constant_model.default_space().upper)
    assert pipeline.optimizer.multistarts == 5


def test_per_call_options_rebuild_the_optimizer(constant_model: ModelSpec) -> None:
    pipeline = BasePipeline(constant_model)

    assert pipeline.resolve_options(FitOptions(multistart_count=2, polish=False)).multistart_count == 2
    assert pipeline.optimizer.multistarts == 2
    assert not pipeline.optimizer.polish

    assert pipeline.resolve_options(None) is pipeline.options
    assert pipeline.optimizer.multistarts == 5


def test_inference_is_withheld_on_the_boundary(constant_model: ModelSpec) -> None:
    result = BasePipeline(constant_model).attach_inference(make_result(boundary_hit=True), unreachable, FitOptions())

    assert not result.has_inference
    assert "boundary" in result.diagnostics["inference_error"]


def test_inference_can_be_switched_off(constant_model: ModelSpec) -> None:
    options = FitOptions(compute_inference=False)
    result = BasePipeline(constant_model).attach_inference(make_result(), unreachable, options)

    assert not result.has_inference
    assert "inference_error" not in result.diagnostics


def test_ill_conditioned_B_is_reported(constant_model: ModelSpec) -> None:
    parts = SandwichParts(B_hat=np.diag([1.0, 1e-12]), C_hat=np.eye(2), n=10)
    result = BasePipeline(constant_model).attach_inference(make_result(), lambda: parts, FitOptions())

    assert not result.has_inference
    assert result.diagnostics["condition_number"] == pytest.approx(1e12)


def test_singular_B_reports_no_condition_number(constant_model: ModelSpec) -> None:
    parts = SandwichParts(B_hat=np.zeros((2, 2)), C_hat=np.eye(2), n=10)
    result = BasePipeline(constant_model).attach_inference(make_result(), lambda: parts, FitOptions())

    assert result.diagnostics["condition_number"] is None


def test_inference_fills_intervals(constant_model: ModelSpec) -> None:
    parts = SandwichParts(B_hat=np.eye(2), C_hat=np.eye(2), n=100)
    result = BasePipeline(constant_model).attach_inference(make_result(), lambda: parts, FitOptions(level=0.9))

    np.testing.assert_allclose(result.std_errors, [0.1, 0.1])
    intervals = np.array(result.diagnostics["confidence_intervals"])
    np.testing.assert_allclose(intervals[0], [0.5 - 0.1644853626951472, 0.5 + 0.1644853626951472])
    assert result.diagnostics["confidence_level"] == 0.9
