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
"""Moment sources for Berkson-Engine.

A moment source returns (m1, m2) and their gamma-gradients for every row of a predictor
matrix. The objective, the weight estimate and the sandwich all consume this interface, so
each of them works unchanged with closed forms, quadrature or one half of a draw store.

Classes:
    MomentSource: Abstract interface.
    ClosedFormSource: Exact closed-form moments of the built-in models.
    QuadratureSource: Gauss-Hermite quadrature moments.
    SimulatedSource: Importance-sampling moments from one half of a frozen draw store.

Functions:
    resolve_source: Picks closed forms when available and quadrature otherwise.
"""

from abc import ABC
from abc import abstractmethod

import numpy as np

from berkson_engine.components.closed_moments import closed_gradients
from berkson_engine.components.closed_moments import closed_moments
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.quadrature import DEFAULT_ORDER
from berkson_engine.components.quadrature import QuadratureOracle
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.data_structures.draw_store import Half
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import UnsupportedOperationError


class MomentSource(ABC):
    kind: str = "source"

    def __init__(self, model: ModelSpec) -> None:
        self.model = model

    @abstractmethod
    def moments(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...

    @abstractmethod
    def gradients(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...


class ClosedFormSource(MomentSource):
    kind = "closed"

    def __init__(self, model: ModelSpec) -> None:
        if not model.has_closed_moments:
            message = f"Model {model.name!r} has no closed-form moments; use quadrature or simulation"
            raise UnsupportedOperationError(message)

        super().__init__(model)

    def moments(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return closed_moments(self.model, np.atleast_2d(z), gamma)

    def gradients(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return closed_gradients(self.model, np.atleast_2d(z), gamma)


class QuadratureSource(MomentSource):
    kind = "quadrature"

    def __init__(self, model: ModelSpec, order: int = DEFAULT_ORDER) -> None:
        super().__init__(model)
        self.oracle = QuadratureOracle(model, order)

    def moments(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.oracle.moments(z, gamma)

    def gradients(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.oracle.gradients(z, gamma)


class SimulatedSource(MomentSource):
    """One half ("first", "second") or the pooled view of a store; ``z`` must align with its rows."""

    kind = "simulated"

    def __init__(self, simulated: SimulatedMoments, half: Half = "pooled") -> None:
        super().__init__(simulated.model)
        self.simulated = simulated
        self.half = half

    def moments(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.simulated.moments(z, gamma, self.half)

    def gradients(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return self.simulated.gradients(z, gamma, self.half)


def resolve_source(model: ModelSpec, method: str = "auto", order: int = DEFAULT_ORDER) -> MomentSource:
    """Returns the exact moment source for ``method`` in {auto, closed, quadrature}.

    ``auto`` prefers closed forms and falls back to quadrature.
    """
    if method == "closed" or (method == "auto" and model.has_closed_moments):
        return ClosedFormSource(model)

    if method in {"auto", "quadrature"}:
        return QuadratureSource(model, order)

    message = f"Unknown moment method: {method!r}; expected auto, closed or quadrature"
    raise ConfigError(message)
