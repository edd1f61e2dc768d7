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

import numpy as np

from berkson_engine.utils.errors import ConfigError

BOUNDARY_TOLERANCE = 1e-8


@dataclass(slots=True, frozen=True)
class ParamSpace:
    """Compact coordinate box for gamma = (theta, psi, sigma_eps2).

    Attributes:
        lower (np.ndarray): Lower bounds, one per coordinate.
        upper (np.ndarray): Upper bounds, one per coordinate.
        names (tuple[str, ...]): Optional coordinate names used in reports.

    """

    lower: np.ndarray
    upper: np.ndarray
    names: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        lower = np.array(self.lower, dtype=float).ravel()
        upper = np.array(self.upper, dtype=float).ravel()
        lower.setflags(write=False)
        upper.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

        if lower.shape != upper.shape or lower.size == 0:
            message = f"Bounds must be non-empty and of equal length, got {lower.size} and {upper.size}"
            raise ConfigError(message)

        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            message = "Parameter space bounds must be finite."
            raise ConfigError(message)

        if np.any(lower > upper):
            bad = np.flatnonzero(lower > upper).tolist()
            message = f"Lower bound exceeds upper bound at coordinates {bad}"
            raise ConfigError(message)

        if lower[-1] < 0:
            message = f"Lower bound of sigma_eps2 must be >= 0, got {lower[-1]}"
            raise ConfigError(message)

        if self.names and len(self.names) != lower.size:
            message = f"Expected {lower.size} coordinate names, got {len(self.names)}"
            raise ConfigError(message)

    @property
    def dim(self) -> int:
        return self.lower.size

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def contains(self, gamma: np.ndarray) -> bool:
        gamma = np.asarray(gamma, dtype=float)
        return bool(gamma.shape == self.lower.shape and np.all(gamma >= self.lower) and np.all(gamma <= self.upper))

    def project(self, gamma: np.ndarray) -> np.ndarray:
        return np.clip(np.asarray(gamma, dtype=float), self.lower, self.upper)

    def on_boundary(self, gamma: np.ndarray, tolerance: float = BOUNDARY_TOLERANCE) -> np.ndarray:
        """Returns a boolean mask of coordinates lying on (or within tolerance of) a bound.

        Degenerate coordinates with ``lower == upper`` are fixed by the user and never flagged.
        """
        gamma = np.asarray(gamma, dtype=float)
        slack = tolerance * (1.0 + np.abs(self.upper - self.lower))
        free = self.upper > self.lower
        return free & ((gamma - self.lower <= slack) | (self.upper - gamma <= slack))

    def uniform_starts(self, count: int, rng: np.random.Generator) -> np.ndarray:
        if count <= 0:
            return np.empty((0, self.dim))

        return rng.uniform(self.lower, self.upper, size=(count, self.dim))
