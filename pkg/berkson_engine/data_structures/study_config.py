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
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import Any
from typing import Literal

import numpy as np

from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.data_structures.param_vector import ParamVector

ZDist = Literal["uniform", "normal", "file"]
EpsDist = Literal["normal", "t", "uniform"]
Estimator = Literal["mde", "mde2", "se"]
ImportanceKind = Literal["student_t", "error_density"]


@dataclass(slots=True, frozen=True)
class GenConfig:
    """Synthetic data design.

    Attributes:
        model (ModelSpec): Data-generating model.
        gamma0 (ParamVector): True parameter values.
        n (int): Sample size.
        z_dist (str): ``uniform`` on [z_low, z_high]^k, ``normal`` or ``file``.
        z_mean (float | tuple): Mean of normal Z, one value or one per coordinate.
        z_sd (float | tuple): Standard deviation of normal Z, one value or one per coordinate.
        z_values (np.ndarray | None): Predictor rows for ``file``; the first n rows are used.
        eps_dist (str): ``normal``, ``t`` (scaled and centered, eps_df > 4) or ``uniform``.
        seed (int): Seed of the Z, delta and eps streams.
        space (ParamSpace | None): Box gamma0 must lie in; the model's default box when None.

    """

    model: ModelSpec
    gamma0: ParamVector
    n: int
    z_dist: ZDist = "uniform"
    z_low: float = -1.0
    z_high: float = 1.0
    z_mean: float | tuple[float, ...] = 0.0
    z_sd: float | tuple[float, ...] = 1.0
    z_values: np.ndarray | None = None
    eps_dist: EpsDist = "normal"
    eps_df: float = 5.0
    seed: int = 0
    space: ParamSpace | None = None
    echo: dict[str, Any] = field(default_factory=dict)

    def effective_space(self) -> ParamSpace:
        return self.space if self.space is not None else self.model.default_space()

    def with_seed(self, seed: int) -> "GenConfig":
        return replace(self, seed=seed)


@dataclass(slots=True, frozen=True)
class StudyConfig:
    gen: GenConfig
    estimator: Estimator = "mde"
    S: int = 100
    importance: ImportanceKind = "student_t"
    importance_df: float = 5.0
    replications: int = 1
    workers: int = 1
    multistarts: int = 5
    max_iterations: int = 2000
    level: float = 0.95
    echo: dict[str, Any] = field(default_factory=dict)
