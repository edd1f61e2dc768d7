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

"""Measurement-error densities for Berkson-Engine.

This module provides the interface for the parametric density f_delta(t; psi) of the
Berkson error delta = X - Z, its psi-derivatives and a sampler. Two families are built
in: the isotropic normal N(0, sigma_delta^2 I_k) and the product Laplace, each either
with a free variance parameter (q = 1) or with a known variance (q = 0).

Classes:
    ErrorDensity: Abstract interface for f_delta(t; psi).
    IsotropicNormal: N(0, sigma_delta^2 I_k).
    ProductLaplace: Independent Laplace coordinates with common variance sigma_delta^2.
"""

from abc import ABC
from abc import abstractmethod

import numpy as np
from scipy import stats

from berkson_engine.utils.errors import DomainError


class ErrorDensity(ABC):
    """Density of the Berkson error with parameters psi (length q).

    ``t`` may carry leading axes; its last axis has length ``k``. Both built-in families are
    parameterized by the common coordinate variance sigma_delta^2, either free (``psi = (sigma_delta^2,)``)
    or fixed at construction (``psi`` empty).
    """

    name: str = "density"
    analytic_gradient: bool = True

    def __init__(self, k: int, variance: float | None = None) -> None:
        self.k = k
        self.known_variance = None if variance is None else float(variance)
        self.q = 0 if variance is not None else 1

        if self.known_variance is not None and not (np.isfinite(self.known_variance) and self.known_variance > 0):
            message = f"Known variance must be positive and finite, got {variance}"
            raise DomainError(message)

    def variance(self, psi: np.ndarray) -> float:
        self.check_psi(psi)
        if self.known_variance is not None:
            return self.known_variance

        return float(psi[0])

    def check_psi(self, psi: np.ndarray) -> None:
        psi = np.asarray(psi, dtype=float).ravel()
        if psi.size != self.q:
            message = f"{self.name} expects {self.q} density parameter(s), got {psi.size}"
            raise DomainError(message)

        if self.q and not (np.isfinite(psi[0]) and psi[0] > 0):
            message = f"{self.name} variance must be positive and finite, got {psi[0]}"
            raise DomainError(message)

    def value(self, t: np.ndarray, psi: np.ndarray) -> np.ndarray:
        return np.exp(self.log_value(t, self.variance(psi)))

    def gradient(self, t: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """Returns d f / d psi with a trailing axis of length q."""
        if self.q == 0:
            return np.zeros((*np.shape(t)[:-1], 0))

        s = self.variance(psi)
        f = np.exp(self.log_value(t, s))
        return (f * self.score(t, s))[..., None]

    def hessian(self, t: np.ndarray, psi: np.ndarray) -> np.ndarray:
        if self.q == 0:
            return np.zeros((*np.shape(t)[:-1], 0, 0))

        s = self.variance(psi)
        f = np.exp(self.log_value(t, s))
        u = self.score(t, s)
        return (f * (u * u + self.score_derivative(t, s)))[..., None, None]

    def log_gradient(self, t: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """Returns d log f / d psi, shape (..., q)."""
        if self.q == 0:
            return np.zeros((*np.shape(t)[:-1], 0))

        return self.score(t, self.variance(psi))[..., None]

    @abstractmethod
    def log_value(self, t: np.ndarray, s: float) -> np.ndarray: ...

    @abstractmethod
    def score(self, t: np.ndarray, s: float) -> np.ndarray:
        """d log f / d s at variance s."""

    @abstractmethod
    def score_derivative(self, t: np.ndarray, s: float) -> np.ndarray:
        """d^2 log f / d s^2 at variance s."""

    @abstractmethod
    def sample(self, psi: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray: ...


class IsotropicNormal(ErrorDensity):
    name = "normal"

    def log_value(self, t: np.ndarray, s: float) -> np.ndarray:  # noqa: PLR6301
        return np.sum(stats.norm.logpdf(t, scale=np.sqrt(s)), axis=-1)

    def score(self, t: np.ndarray, s: float) -> np.ndarray:
        r2 = np.sum(np.square(t), axis=-1)
        return -0.5 * self.k / s + r2 / (2.0 * s * s)

    def score_derivative(self, t: np.ndarray, s: float) -> np.ndarray:
        r2 = np.sum(np.square(t), axis=-1)
        return 0.5 * self.k / (s * s) - r2 / (s * s * s)

    def sample(self, psi: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
        s = self.variance(psi)
        return rng.normal(loc=0.0, scale=np.sqrt(s), size=(count, self.k))


class ProductLaplace(ErrorDensity):
    """Independent Laplace coordinates, each with variance s (scale b = sqrt(s / 2))."""

    name = "laplace"

    def log_value(self, t: np.ndarray, s: float) -> np.ndarray:  # noqa: PLR6301
        return np.sum(stats.laplace.logpdf(t, scale=np.sqrt(0.5 * s)), axis=-1)

    def score(self, t: np.ndarray, s: float) -> np.ndarray:
        a = np.sum(np.abs(t), axis=-1)
        return -0.5 * self.k / s + 0.25 * a * (0.5 * s) ** -1.5

    def score_derivative(self, t: np.ndarray, s: float) -> np.ndarray:
        a = np.sum(np.abs(t), axis=-1)
        return 0.5 * self.k / (s * s) - 0.1875 * a * (0.5 * s) ** -2.5

    def sample(self, psi: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
        b = np.sqrt(0.5 * self.variance(psi))
        return rng.laplace(loc=0.0, scale=b, size=(count, self.k))
