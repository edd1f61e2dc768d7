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
"""Pydantic models for the Berkson-Engine API.

Request models validate the JSON bodies of ``/moments`` and ``/fit``; response models
describe what the routes return. Internal dataclasses are built from them in
``berkson_engine.api.mappers``.

Classes:
    ModelModel: Built-in model selection (name, predictor dimension, known variance, density).
    MomentsRequestModel: Parameters and predictor rows for a moment evaluation.
    MomentsResponseModel: m1 and m2 per predictor row.
    FitRequestModel: Dataset, estimator choice and optimizer settings for a fit.
    FitResponseModel: The estimate with its covariance and diagnostics.
"""

from typing import Any
from typing import Literal

from pydantic import BaseModel
from pydantic import Field


class ModelModel(BaseModel):
    name: str
    k: int | None = Field(default=None, ge=1)
    sigma_delta2_known: float | None = Field(default=None, gt=0)
    density: Literal["normal", "laplace"] = "normal"


class MomentsRequestModel(BaseModel):
    model: ModelModel
    gamma: list[float]
    z: list[list[float]] = Field(min_length=1)
    method: Literal["auto", "closed", "quadrature", "simulated"] = "auto"
    S: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    order: int = Field(default=20, ge=1)


class MomentsResponseModel(BaseModel):
    method: str
    m1: list[float]
    m2: list[float]


class FitRequestModel(BaseModel):
    model: ModelModel
    y: list[float] = Field(min_length=1)
    z: list[list[float]] = Field(min_length=1)
    estimator: Literal["mde", "mde2", "se"] = "mde"
    S: int = Field(default=100, ge=1)
    importance: Literal["student_t", "error_density"] = "student_t"
    seed: int = Field(default=0, ge=0)
    lower: list[float] | None = None
    upper: list[float] | None = None
    multistarts: int = Field(default=5, ge=1)
    max_iterations: int = Field(default=2000, ge=1)
    level: float = Field(default=0.95, gt=0, lt=1)


class FitResponseModel(BaseModel):
    parameters: dict[str, float]
    gamma_hat: list[float]
    objective_value: float
    converged: bool
    boundary_hit: bool
    n_evals: int
    weight_used: list[Any]
    covariance: list[list[float]] | None = None
    std_errors: list[float] | None = None
    diagnostics: dict[str, Any] = Field(default_factory=dict)
