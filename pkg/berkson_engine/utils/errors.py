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

"""Exception types for Berkson-Engine.

Every domain error derives from ``BerksonEngineError`` and carries the process
exit code the command-line interface reports for it.

Classes:
    BerksonEngineError: Base class of all engine errors.
    ConfigError: Invalid configuration, model name, dimensions or parameter values.
    DomainError: A density parameter outside the density's domain.
    UnsupportedOperationError: A moment method that the model cannot provide.
    SingularMapError: A reparameterization evaluated where it is not defined.
    DataError: Malformed or non-finite input data.
    EvaluationError: A model evaluation that produced a non-finite value.
    OptimizationError: A minimization that could not produce any estimate.
    InferenceUnavailableError: A covariance that cannot be computed reliably.
"""

from typing import Any


class BerksonEngineError(Exception):
    exit_code: int = 1


class ConfigError(BerksonEngineError, ValueError):
    exit_code = 2


class DomainError(ConfigError):
    pass


class UnsupportedOperationError(ConfigError):
    pass


class SingularMapError(ConfigError):
    pass


class DataError(BerksonEngineError, ValueError):
    exit_code = 3


class EvaluationError(BerksonEngineError, ArithmeticError):
    exit_code = 3

    def __init__(self, message: str, **point: Any) -> None:  # noqa: ANN401
        super().__init__(message)
        self.point = point


class OptimizationError(BerksonEngineError, RuntimeError):
    exit_code = 4


class InferenceUnavailableError(BerksonEngineError, RuntimeError):
    exit_code = 5

    def __init__(self, message: str, condition_number: float | None = None) -> None:
        super().__init__(message)
        self.condition_number = condition_number
