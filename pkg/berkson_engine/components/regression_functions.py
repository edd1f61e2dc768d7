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

"""Regression functions for Berkson-Engine.

This module provides the regression-function interface g(x; theta) used by every
moment method, together with the built-in families. Each family evaluates g, its
gradient and its Hessian in theta, vectorized over any number of leading axes of x.
Families without analytic derivatives fall back to central finite differences.

Classes:
    RegressionFunction: Abstract interface for g(x; theta).
    Example1Regression: theta1 x1 + theta3 exp(theta2 x2).
    Example2Regression: theta1 exp(x' theta2).
    Example3Regression: Full quadratic polynomial in two predictors.
    LinearRegression: x' theta.
    ConstantRegression: g identically equal to theta1.
    CallableRegression: User-supplied g with optional analytic gradient.
"""

from abc import ABC
from abc import abstractmethod
from collections.abc import Callable

import numpy as np

from berkson_engine.utils.utils import central_difference


class RegressionFunction(ABC):
    """Interface for a regression function g(x; theta) with x in R^k and theta in R^p.

    ``x`` may carry any number of leading axes; the last axis has length ``k``. ``value`` returns
    the leading shape, ``gradient`` appends an axis of length ``p`` and ``hessian`` appends two.
    """

    name: str = "regression"
    analytic_gradient: bool = True

    def __init__(self, k: int, p: int) -> None:
        self.k = k
        self.p = p

    @abstractmethod
    def value(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray: ...

    def gradient(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return central_difference(lambda th: self.value(x, th), theta)

    def hessian(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return central_difference(lambda th: self.gradient(x, th), theta)

    def identifiability_violations(self, theta: np.ndarray) -> list[str]:  # noqa: ARG002, PLR6301
        return []


class Example1Regression(RegressionFunction):
    name = "example1"

    def __init__(self) -> None:
        super().__init__(k=2, p=3)

    def value(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        return theta[0] * x[..., 0] + theta[2] * np.exp(theta[1] * x[..., 1])

    def gradient(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        e = np.exp(theta[1] * x[..., 1])
        return np.stack([x[..., 0], theta[2] * x[..., 1] * e, e], axis=-1)

    def hessian(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        x2 = x[..., 1]
        e = np.exp(theta[1] * x2)
        out = np.zeros((*x.shape[:-1], 3, 3))
        out[..., 1, 1] = theta[2] * x2 * x2 * e
        out[..., 1, 2] = x2 * e
        out[..., 2, 1] = x2 * e
        return out

    def identifiability_violations(self, theta: np.ndarray) -> list[str]:  # noqa: PLR6301
        if theta[1] * theta[2] == 0:
            return ["example1 requires theta2 * theta3 != 0"]

        return []


class Example2Regression(RegressionFunction):
    name = "example2"

    def __init__(self, k: int) -> None:
        super().__init__(k=k, p=k + 1)

    def value(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        return theta[0] * np.exp(x @ theta[1:])

    def gradient(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        e = np.exp(x @ theta[1:])
        return np.concatenate([e[..., None], theta[0] * e[..., None] * x], axis=-1)

    def hessian(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        e = np.exp(x @ theta[1:])
        out = np.zeros((*x.shape[:-1], self.p, self.p))
        out[..., 0, 1:] = e[..., None] * x
        out[..., 1:, 0] = e[..., None] * x
        out[..., 1:, 1:] = theta[0] * e[..., None, None] * x[..., :, None] * x[..., None, :]
        return out

    def identifiability_violations(self, theta: np.ndarray) -> list[str]:  # noqa: PLR6301
        problems = []
        if theta[0] == 0:
            problems.append("example2 requires theta1 != 0")

        if not np.any(theta[1:] != 0):
            problems.append("example2 requires theta2 != 0")

        return problems


def quadratic_features(x: np.ndarray) -> np.ndarray:
    x1 = x[..., 0]
    x2 = x[..., 1]
    return np.stack([x1, x2, x1 * x1, x2 * x2, x1 * x2], axis=-1)


class Example3Regression(RegressionFunction):
    name = "example3"

    def __init__(self) -> None:
        super().__init__(k=2, p=5)

    def value(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        return quadratic_features(x) @ theta

    def gradient(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: ARG002, PLR6301
        return quadratic_features(x)

    def hessian(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: ARG002
        return np.zeros((*x.shape[:-1], self.p, self.p))


class LinearRegression(RegressionFunction):
    name = "linear"

    def __init__(self, k: int) -> None:
        super().__init__(k=k, p=k)

    def value(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        return x @ theta

    def gradient(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: ARG002, PLR6301
        return np.array(x, dtype=float, copy=True)

    def hessian(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: ARG002
        return np.zeros((*x.shape[:-1], self.p, self.p))


class ConstantRegression(RegressionFunction):
    name = "constant"

    def __init__(self, k: int) -> None:
        super().__init__(k=k, p=1)

    def value(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: PLR6301
        return np.full(x.shape[:-1], theta[0], dtype=float)

    def gradient(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: ARG002, PLR6301
        return np.ones((*x.shape[:-1], 1))

    def hessian(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:  # noqa: ARG002, PLR6301
        return np.zeros((*x.shape[:-1], 1, 1))


class CallableRegression(RegressionFunction):
    """Wraps a user-supplied vectorized g(x, theta).

    Without ``gradient`` the derivatives are central finite differences (step 1e-6 * (1 + |theta_j|))
    and ``analytic_gradient`` is False.
    """

    def __init__(
        self,
        name: str,
        k: int,
        p: int,
        func: Callable[[np.ndarray, np.ndarray], np.ndarray],
        gradient: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    ) -> None:
        super().__init__(k=k, p=p)
        self.name = name
        self._func = func
        self._gradient = gradient
        self.analytic_gradient = gradient is not None

    def value(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        return np.asarray(self._func(x, theta), dtype=float)

    def gradient(self, x: np.ndarray, theta: np.ndarray) -> np.ndarray:
        if self._gradient is None:
            return super().gradient(x, theta)

        return np.asarray(self._gradient(x, theta), dtype=float)
