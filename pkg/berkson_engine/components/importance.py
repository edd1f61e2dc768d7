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
"""Importance densities and frozen draw stores for Berkson-Engine.

The simulated moments average g(z_i + t_is; theta) f_delta(t_is; psi) / phi(t_is) over draws
t_is from an importance density phi whose support is all of R^k. The draws are generated once
per estimation run and frozen, so the simulated objective is a deterministic, smooth function
of gamma. Row i of a store comes from its own seed stream
``numpy.random.SeedSequence(seed, spawn_key=(i,))``; any chunk of rows can be regenerated
bit-identically with ``draw_rows``.

Classes:
    ImportanceDensity: Abstract sampling density phi.
    StudentTImportance: Product of independent scaled Student-t coordinates.
    ErrorDensityImportance: phi = f_delta(.; psi0) for a fixed psi0.

Functions:
    default_importance: Student-t density scaled by the largest sigma_delta the box allows.
    importance_for: Importance density selected by name.
    draw_rows: Draws and densities for a range of observations.
    build_draw_store: Full frozen DrawStore.
"""

from abc import ABC
from abc import abstractmethod

import numpy as np
from scipy import stats

from berkson_engine.components.error_densities import ErrorDensity
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.draw_store import DrawStore
from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.utils.errors import ConfigError

DEFAULT_DF = 5.0


class ImportanceDensity(ABC):
    def __init__(self, k: int) -> None:
        self.k = k

    @property
    @abstractmethod
    def tag(self) -> str: ...

    @abstractmethod
    def value(self, t: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray: ...


class StudentTImportance(ImportanceDensity):
    """Independent Student-t coordinates with ``df`` degrees of freedom and common ``scale``."""

    def __init__(self, k: int, scale: float, df: float = DEFAULT_DF) -> None:
        super().__init__(k)
        if not (np.isfinite(scale) and scale > 0 and np.isfinite(df) and df > 0):
            message = f"Student-t importance density needs scale > 0 and df > 0, got scale={scale}, df={df}"
            raise ConfigError(message)

        self.scale = float(scale)
        self.df = float(df)

    @property
    def tag(self) -> str:
        return f"student_t(df={self.df:g}, scale={self.scale:g})"

    def value(self, t: np.ndarray) -> np.ndarray:
        return np.exp(np.sum(stats.t.logpdf(t, df=self.df, scale=self.scale), axis=-1))

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self.scale * rng.standard_t(self.df, size=(count, self.k))


class ErrorDensityImportance(ImportanceDensity):
    """Samples from the Berkson error density itself at a fixed psi0.

    With a known-variance density the importance weights f_delta / phi are identically one.
    """

    def __init__(self, density: ErrorDensity, psi: np.ndarray | None = None) -> None:
        super().__init__(density.k)
        self.density = density
        self.psi = np.zeros(0) if psi is None else np.asarray(psi, dtype=float).ravel()
        density.check_psi(self.psi)

    @property
    def tag(self) -> str:
        return f"error_density({self.density.name}, variance={self.density.variance(self.psi):g})"

    def value(self, t: np.ndarray) -> np.ndarray:
        return self.density.value(t, self.psi)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self.density.sample(self.psi, count, rng)


def default_importance(model: ModelSpec, space: ParamSpace | None = None, df: float = DEFAULT_DF) -> StudentTImportance:
    """Student-t density scaled by the square root of the largest variance allowed.

    For a free variance the bound is the upper sigma_delta^2 of ``space``; for a known variance
    it is that variance.
    """
    if model.q:
        space = space if space is not None else model.default_space()
        largest = float(space.upper[model.p])
    else:
        largest = model.f_delta.variance(np.zeros(0))

    return StudentTImportance(k=model.k, scale=float(np.sqrt(largest)), df=df)


def importance_for(kind: str, model: ModelSpec, space: ParamSpace | None = None) -> ImportanceDensity:
    """Student-t by default; ``error_density`` samples f_delta at the largest variance of the box."""
    if kind == "error_density":
        space = space if space is not None else model.default_space()
        return ErrorDensityImportance(model.f_delta, space.upper[model.p : model.p + model.q])

    if kind != "student_t":
        message = f"Unknown importance density: {kind!r}; expected student_t or error_density"
        raise ConfigError(message)

    return default_importance(model, space)


def draw_rows(phi: ImportanceDensity, seed: int, S: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    """Regenerates rows ``start`` to ``stop - 1`` of the store built from ``seed``.

    Returns:
        tuple[np.ndarray, np.ndarray]: Draws (stop - start, 2S, k) and phi values (stop - start, 2S).

    """
    draws = np.empty((stop - start, 2 * S, phi.k))
    for offset, i in enumerate(range(start, stop)):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        draws[offset] = phi.sample(2 * S, rng)

    return draws, phi.value(draws)


def build_draw_store(n: int, S: int, k: int, phi: ImportanceDensity, seed: int) -> DrawStore:
    """Builds the frozen n x 2S x k store of importance draws.

    Raises:
        ConfigError: For n < 1, S < 1, a dimension mismatch or non-positive / non-finite phi values.

    """
    if n < 1 or S < 1:
        message = f"Draw store needs n >= 1 and S >= 1, got n={n}, S={S}"
        raise ConfigError(message)

    if phi.k != k:
        message = f"Importance density has k={phi.k}, expected k={k}"
        raise ConfigError(message)

    draws, phi_vals = draw_rows(phi, seed, S, 0, n)
    return DrawStore(draws=draws, phi_vals=phi_vals, seed=seed, S=S, tag=phi.tag)
