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
"""Built-in Berkson regression models.

Functions:
    builtin: Builds a fully wired ModelSpec by name.
"""

from collections.abc import Callable

from berkson_engine.components.closed_moments import ClosedMoments
from berkson_engine.components.closed_moments import ConstantMoments
from berkson_engine.components.closed_moments import Example1Moments
from berkson_engine.components.closed_moments import Example2Moments
from berkson_engine.components.closed_moments import Example3Moments
from berkson_engine.components.closed_moments import LinearMoments
from berkson_engine.components.error_densities import ErrorDensity
from berkson_engine.components.error_densities import IsotropicNormal
from berkson_engine.components.error_densities import ProductLaplace
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.regression_functions import ConstantRegression
from berkson_engine.components.regression_functions import Example1Regression
from berkson_engine.components.regression_functions import Example2Regression
from berkson_engine.components.regression_functions import Example3Regression
from berkson_engine.components.regression_functions import LinearRegression
from berkson_engine.components.regression_functions import RegressionFunction
from berkson_engine.utils.errors import ConfigError

FIXED_K = {"example1": 2, "example3": 2}

_REGRESSIONS: dict[str, Callable[[int], RegressionFunction]] = {
    "example1": lambda _: Example1Regression(),
    "example2": Example2Regression,
    "example3": lambda _: Example3Regression(),
    "linear": LinearRegression,
    "constant": ConstantRegression,
}

_CLOSED: dict[str, Callable[[], ClosedMoments]] = {
    "example1": Example1Moments,
    "example2": Example2Moments,
    "example3": Example3Moments,
    "linear": LinearMoments,
    "constant": ConstantMoments,
}

_DENSITIES: dict[str, Callable[[int, float | None], ErrorDensity]] = {
    "normal": IsotropicNormal,
    "laplace": ProductLaplace,
}

MODEL_NAMES = tuple(_REGRESSIONS)
DENSITY_NAMES = tuple(_DENSITIES)


def builtin(
    name: str,
    k: int | None = None,
    sigma_delta2: float | None = None,
    density: str = "normal",
) -> ModelSpec:
    """Builds a built-in model.

    Closed-form moments are attached only under normal Berkson errors. With ``sigma_delta2``
    given, the error variance is known and psi is empty (q = 0).

    Args:
        name (str): One of ``example1``, ``example2``, ``example3``, ``linear``, ``constant``.
        k (int | None): Predictor dimension; fixed at 2 for example1 / example3, default 1 otherwise.
        sigma_delta2 (float | None): Known Berkson error variance, or None to estimate it.
        density (str): ``normal`` or ``laplace``.

    Returns:
        ModelSpec: The wired model.

    Raises:
        ConfigError: For unknown names or incompatible dimensions.

    """
    if name not in _REGRESSIONS:
        message = f"Unknown model: {name!r}; expected one of {', '.join(MODEL_NAMES)}"
        raise ConfigError(message)

    if density not in _DENSITIES:
        message = f"Unknown error density: {density!r}; expected one of {', '.join(DENSITY_NAMES)}"
        raise ConfigError(message)

    if name in FIXED_K:
        if k is not None and k != FIXED_K[name]:
            message = f"Model {name!r} requires k={FIXED_K[name]}, got k={k}"
            raise ConfigError(message)

        k = FIXED_K[name]

    k = 1 if k is None else int(k)
    if k < 1:
        message = f"k must be >= 1, got {k}"
        raise ConfigError(message)

    g = _REGRESSIONS[name](k)
    f_delta = _DENSITIES[density](k, sigma_delta2)
    closed = _CLOSED[name]() if density == "normal" else None
    return ModelSpec(name=name, g=g, f_delta=f_delta, closed_moments=closed)
