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

import numpy as np

from berkson_engine.utils.errors import ConfigError


@dataclass(slots=True, frozen=True)
class ParamVector:
    theta: np.ndarray
    psi: np.ndarray
    sigma_eps2: float

    def __post_init__(self) -> None:
        theta = np.array(self.theta, dtype=float).ravel()
        psi = np.array(self.psi, dtype=float).ravel()
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "sigma_eps2", float(self.sigma_eps2))

        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(psi)) and np.isfinite(self.sigma_eps2)):
            message = f"Parameter vector has non-finite coordinates: {self.to_array()!r}"
            raise ConfigError(message)

        if self.sigma_eps2 < 0:
            message = f"sigma_eps2 must be nonnegative, got {self.sigma_eps2}"
            raise ConfigError(message)

    @property
    def p(self) -> int:
        return self.theta.size

    @property
    def q(self) -> int:
        return self.psi.size

    @property
    def size(self) -> int:
        return self.p + self.q + 1

    def to_array(self) -> np.ndarray:
        return np.concatenate([self.theta, self.psi, [self.sigma_eps2]])

    @classmethod
    def from_array(cls, values: np.ndarray | list[float], p: int, q: int) -> "ParamVector":
        arr = np.asarray(values, dtype=float).ravel()
        if arr.size != p + q + 1:
            message = f"Expected {p + q + 1} parameters (p={p}, q={q}), got {arr.size}"
            raise ConfigError(message)

        return cls(theta=arr[:p], psi=arr[p : p + q], sigma_eps2=float(arr[-1]))
