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

from berkson_engine.utils.errors import DataError


@dataclass(slots=True, frozen=True)
class Dataset:
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        y = np.array(self.y, dtype=float).ravel()
        z = np.array(self.z, dtype=float)
        if z.ndim == 1:
            z = z.reshape(-1, 1)

        if z.ndim != 2 or z.shape[0] != y.size:  # noqa: PLR2004
            message = f"z must be an n x k matrix paired with y; got y of length {y.size} and z of shape {z.shape}"
            raise DataError(message)

        if y.size == 0:
            message = "Dataset must contain at least one observation."
            raise DataError(message)

        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(z))):
            message = "Dataset entries must all be finite."
            raise DataError(message)

        y.setflags(write=False)
        z.setflags(write=False)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def k(self) -> int:
        return self.z.shape[1]

    def take(self, indices: np.ndarray | list[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(y=self.y[idx], z=self.z[idx])
