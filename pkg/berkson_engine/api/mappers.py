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
"""Mapping functions between the API's pydantic models and internal data structures."""

import json

import numpy as np

from berkson_engine.api.models import FitRequestModel
from berkson_engine.api.models import FitResponseModel
from berkson_engine.api.models import ModelModel
from berkson_engine.components.builtin_models import builtin
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.data_structures.estimate_result import EstimateResult
from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.pipelines.base_pipeline import FitOptions
from berkson_engine.utils.config import build_space
from berkson_engine.utils.errors import DataError
from berkson_engine.utils.io import dumps_report


def map_pydantic_to_internal_model(model: ModelModel) -> ModelSpec:
    return builtin(model.name, k=model.k, sigma_delta2=model.sigma_delta2_known, density=model.density)


def map_pydantic_to_internal_predictors(z: list[list[float]], k: int) -> np.ndarray:
    """Converts predictor rows to an n x k array, rejecting ragged rows or the wrong width."""
    widths = {len(row) for row in z}
    if widths != {k}:
        message = f"Every z row needs {k} values, got row widths {sorted(widths)}"
        raise DataError(message)

    return np.array(z, dtype=float)


def map_pydantic_to_internal_dataset(request: FitRequestModel, k: int) -> Dataset:
    return Dataset(y=np.array(request.y, dtype=float), z=map_pydantic_to_internal_predictors(request.z, k))


def map_pydantic_to_internal_space(request: FitRequestModel, model: ModelSpec) -> ParamSpace:
    return build_space(model, request.lower, request.upper)


def map_pydantic_to_internal_options(request: FitRequestModel) -> FitOptions:
    return FitOptions(
        two_stage=request.estimator == "mde2",
        multistart_count=request.multistarts,
        max_iterations=request.max_iterations,
        seed=request.seed,
        level=request.level,
    )


def map_internal_to_pydantic_estimate_model(result: EstimateResult) -> FitResponseModel:
    """Maps an ``EstimateResult`` to the response model.

    The result dictionary goes through the report encoder first, so numpy scalars and
    arrays inside diagnostics arrive as plain JSON values.
    """
    return FitResponseModel.model_validate(json.loads(dumps_report(result.to_dict())))
