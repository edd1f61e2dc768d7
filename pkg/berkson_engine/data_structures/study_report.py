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

from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from typing import Any


@dataclass(slots=True)
class ReplicationRecord:
    index: int
    seed: int
    estimate: list[float] | None = None
    std_errors: list[float] | None = None
    converged: bool = False
    boundary_hit: bool = False
    objective_value: float | None = None
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.estimate is None


@dataclass(slots=True)
class CoordinateSummary:
    """Per-coordinate study summary.

    ``mean_se`` and ``coverage`` are computed over the ``n_covered`` replications that report standard
    errors; fits ending on the box boundary (``n_boundary``) carry none and are left out of both.
    """

    name: str
    true: float
    bias: float
    sd: float
    rmse: float
    mean_se: float | None
    coverage: float | None
    n_covered: int = 0
    n_boundary: int = 0


@dataclass(slots=True)
class StudyReport:
    software: dict[str, str]
    config: dict[str, Any]
    seeds: dict[str, Any]
    summary: list[CoordinateSummary] = field(default_factory=list)
    replications: list[ReplicationRecord] = field(default_factory=list)
    failures: int = 0
    timing: dict[str, float] = field(default_factory=dict)

    def to_dict(self, *, include_timing: bool = True) -> dict[str, Any]:
        out = {
            "software": self.software,
            "config": self.config,
            "seeds": self.seeds,
            "summary": [asdict(s) for s in self.summary],
            "replications": [asdict(r) for r in self.replications],
            "failures": self.failures,
        }
        if include_timing:
            out["timing"] = self.timing

        return out
