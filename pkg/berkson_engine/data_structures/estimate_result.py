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
from typing import Any

import numpy as np

from berkson_engine.data_structures.param_vector import ParamVector


@dataclass(slots=True)
class EstimateResult:
    gamma_hat: ParamVector
    objective_value: float
    converged: bool
    boundary_hit: bool
    n_evals: int
    weight_used: np.ndarray
    param_names: tuple[str, ...] = ()
    covariance: np.ndarray | None = None
    std_errors: np.ndarray | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def has_inference(self) -> bool:
        return self.covariance is not None

    def to_dict(self) -> dict[str, Any]:
        gamma = self.gamma_hat.to_array()
        names = self.param_names or tuple(f"gamma{j + 1}" for j in range(gamma.size))
        return {
            "parameters": dict(zip(names, gamma.tolist(), strict=True)),
            "gamma_hat": gamma.tolist(),
            "objective_value": float(self.objective_value),
            "converged": bool(self.converged),
            "boundary_hit": bool(self.boundary_hit),
            "n_evals": int(self.n_evals),
            "weight_used": np.asarray(self.weight_used).tolist(),
            "covariance": None if self.covariance is None else self.covariance.tolist(),
            "std_errors": None if self.std_errors is None else self.std_errors.tolist(),
            "diagnostics": self.diagnostics,
        }
