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
from typing import Literal

import numpy as np

from berkson_engine.utils.errors import ConfigError

Half = Literal["first", "second", "pooled"]


@dataclass(slots=True, frozen=True)
class DrawStore:
    """Frozen importance-sampling draws t_is, s = 1..2S, one row per observation.

    Attributes:
        draws (np.ndarray): Draws of shape (n, 2S, k).
        phi_vals (np.ndarray): Importance density at each draw, shape (n, 2S), strictly positive.
        seed (int): Seed the store was generated from.
        S (int): Half size; the first S draws of a row form the first half, the rest the second.
        tag (str): Description of the importance density.

    """

    draws: np.ndarray
    phi_vals: np.ndarray
    seed: int
    S: int
    tag: str = ""

    def __post_init__(self) -> None:
        draws = np.array(self.draws, dtype=float)
        phi_vals = np.array(self.phi_vals, dtype=float)

        if self.S < 1:
            message = f"S must be >= 1, got {self.S}"
            raise ConfigError(message)

        if draws.ndim != 3 or draws.shape[1] != 2 * self.S or phi_vals.shape != draws.shape[:2]:  # noqa: PLR2004
            message = f"Inconsistent store shapes: draws {draws.shape}, phi_vals {phi_vals.shape}, S={self.S}"
            raise ConfigError(message)

        if not np.all(np.isfinite(draws)):
            message = "Draw store contains non-finite draws."
            raise ConfigError(message)

        if not (np.all(np.isfinite(phi_vals)) and np.all(phi_vals > 0)):
            message = "Importance density values must be strictly positive and finite."
            raise ConfigError(message)

        draws.setflags(write=False)
        phi_vals.setflags(write=False)
        object.__setattr__(self, "draws", draws)
        object.__setattr__(self, "phi_vals", phi_vals)

    @property
    def n(self) -> int:
        return self.draws.shape[0]

    @property
    def k(self) -> int:
        return self.draws.shape[2]

    def half_slice(self, half: Literal["first", "second"]) -> slice:
        return slice(0, self.S) if half == "first" else slice(self.S, 2 * self.S)

    def swapped(self) -> "DrawStore":
        """Returns a store whose first and second halves are exchanged."""
        order = np.r_[self.S : 2 * self.S, 0 : self.S]
        return DrawStore(
            draws=self.draws[:, order],
            phi_vals=self.phi_vals[:, order],
            seed=self.seed,
            S=self.S,
            tag=self.tag,
        )
