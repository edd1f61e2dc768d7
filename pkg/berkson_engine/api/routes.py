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
"""API routes for Berkson-Engine.

Routes:
    /moments (POST): m1 and m2 at the given gamma for each predictor row.
    /fit (POST): MDE, two-stage MDE or SE fit of a dataset posted as JSON.

Domain errors are returned as HTTP 400 with the error message as detail.
"""

import logging

import numpy as np
from fastapi import APIRouter
from fastapi import HTTPException
from numpy.linalg import LinAlgError

from berkson_engine.api.mappers import map_internal_to_pydantic_estimate_model
from berkson_engine.api.mappers import map_pydantic_to_internal_dataset
from berkson_engine.api.mappers import map_pydantic_to_internal_model
from berkson_engine.api.mappers import map_pydantic_to_internal_options
from berkson_engine.api.mappers import map_pydantic_to_internal_predictors
from berkson_engine.api.mappers import map_pydantic_to_internal_space
from berkson_engine.api.models import FitRequestModel
from berkson_engine.api.models import FitResponseModel
from berkson_engine.api.models import MomentsRequestModel
from berkson_engine.api.models import MomentsResponseModel
from berkson_engine.components.importance import build_draw_store
from berkson_engine.components.importance import default_importance
from berkson_engine.components.importance import importance_for
from berkson_engine.components.moment_sources import resolve_source
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.pipelines.single_pipeline import SinglePipeline
from berkson_engine.utils.errors import BerksonEngineError

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/moments")
def compute_moments(request: MomentsRequestModel) -> MomentsResponseModel:
    """Evaluates the conditional moments for every row of ``z``.

    ``simulated`` averages both halves of a fresh draw store of size ``S`` built from ``seed``.

    Raises:
        HTTPException: 400 for unknown models, bad dimensions or unsupported methods.

    """
    try:
        model = map_pydantic_to_internal_model(request.model)
        gamma = np.asarray(request.gamma, dtype=float)
        model.split(gamma)
        z = map_pydantic_to_internal_predictors(request.z, model.k)

        if request.method == "simulated":
            store = build_draw_store(z.shape[0], request.S, model.k, default_importance(model), request.seed)
            m1, m2 = SimulatedMoments(model, store).moments(z, gamma, "pooled")
            method = f"simulated(S={request.S})"
        else:
            source = resolve_source(model, request.method, request.order)
            m1, m2 = source.moments(z, gamma)
            method = source.kind

    except BerksonEngineError as e:
        raise HTTPException(status_code=400, detail=f"Error computing moments: {e!s}") from e

    return MomentsResponseModel(method=method, m1=m1.tolist(), m2=m2.tolist())


@router.post("/fit")
def fit(request: FitRequestModel) -> FitResponseModel:
    """Fits the posted dataset.

    A fit whose covariance is unavailable still returns 200; the reason is in
    ``diagnostics["inference_error"]``.

    Raises:
        HTTPException: 400 for invalid models, data or bounds, and when every start fails.

    """
    try:
        model = map_pydantic_to_internal_model(request.model)
        data = map_pydantic_to_internal_dataset(request, model.k)
        space = map_pydantic_to_internal_space(request, model)
        pipeline = SinglePipeline(model, space, map_pydantic_to_internal_options(request))

        if request.estimator == "se":
            phi = importance_for(request.importance, model, space)
            result = pipeline.fit_se(data, S=request.S, phi=phi, seed=request.seed)
        else:
            result = pipeline.fit_mde(data)

    except (BerksonEngineError, LinAlgError) as e:
        logger.warning("Fit request failed: %s", e)
        raise HTTPException(status_code=400, detail=f"Error fitting data: {e!s}") from e

    return map_internal_to_pydantic_estimate_model(result)
