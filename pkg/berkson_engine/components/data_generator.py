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
"""Synthetic data generation under the Berkson model.

Draws Z from the configured design, delta from f_delta(.; psi0) and eps from a mean-zero
distribution with variance sigma_eps2, and returns the observed pairs (Y, Z) with
Y = g(Z + delta; theta0) + eps. The latent X = Z + delta is discarded. Z, delta and eps come
from three independent streams spawned from the configured seed.

Classes:
    DataGenerator: Validates a GenConfig once and generates datasets from it.

Functions:
    generate_dataset: One dataset for a GenConfig.
"""

import numpy as np

from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.data_structures.study_config import GenConfig
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.utils import get_effective_param

MIN_T_DF = 4.0


class DataGenerator:
    """Generator of Berkson datasets for one validated design.

    Attributes:
        config (GenConfig): The design.

    """

    def __init__(self, config: GenConfig) -> None:
        self.config = config
        self.validate()

    def validate(self) -> None:
        """Checks dimensions, distribution settings, the box and the identifiability side conditions.

        Raises:
            ConfigError: On the first violated requirement.

        """
        config = self.config
        model = config.model
        gamma0 = config.gamma0.to_array()

        if config.n < 1:
            message = f"n must be >= 1, got {config.n}"
            raise ConfigError(message)

        if config.gamma0.p != model.p or config.gamma0.q != model.q:
            message = (
                f"gamma0 has p={config.gamma0.p}, q={config.gamma0.q}; "
                f"model {model.name!r} needs p={model.p}, q={model.q}"
            )
            raise ConfigError(message)

        model.f_delta.check_psi(config.gamma0.psi)

        space = config.effective_space()
        if space.dim != model.dim:
            message = f"Parameter box has {space.dim} coordinates, model {model.name!r} has {model.dim}"
            raise ConfigError(message)

        if not space.contains(gamma0):
            message = f"gamma0={gamma0.tolist()} lies outside the parameter box"
            raise ConfigError(message)

        violations = model.identifiability_violations(gamma0)
        if violations:
            message = f"gamma0 violates identifiability conditions: {'; '.join(violations)}"
            raise ConfigError(message)

        if config.z_dist == "uniform" and not config.z_low < config.z_high:
            message = f"Uniform Z needs z_low < z_high, got {config.z_low} and {config.z_high}"
            raise ConfigError(message)

        if config.z_dist == "normal":
            _, z_sd = self.normal_design()
            if not np.all(z_sd > 0):
                message = f"Normal Z needs z_sd > 0, got {z_sd.tolist()}"
                raise ConfigError(message)

        if config.z_dist == "file":
            z_values = config.z_values
            if z_values is None or z_values.ndim != 2 or z_values.shape[1] != model.k:  # noqa: PLR2004
                message = f"Fixed Z needs an (n, {model.k}) matrix of predictor rows"
                raise ConfigError(message)

            if z_values.shape[0] < config.n:
                message = f"Fixed Z provides {z_values.shape[0]} rows, n={config.n} needed"
                raise ConfigError(message)

        if config.z_dist not in {"uniform", "normal", "file"}:
            message = f"Unknown Z distribution: {config.z_dist!r}"
            raise ConfigError(message)

        if config.eps_dist not in {"normal", "t", "uniform"}:
            message = f"Unknown eps distribution: {config.eps_dist!r}"
            raise ConfigError(message)

        if config.eps_dist == "t" and not config.eps_df > MIN_T_DF:
            message = f"Student-t eps needs df > {MIN_T_DF:g} for finite fourth moments, got {config.eps_df}"
            raise ConfigError(message)

    def normal_design(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-coordinate mean and standard deviation of normal Z, scalars broadcast to length k.

        Raises:
            ConfigError: If z_mean or z_sd has neither 1 nor k values.

        """
        config = self.config
        k = config.model.k
        out = []
        for label, raw in (("z_mean", config.z_mean), ("z_sd", config.z_sd)):
            values = np.atleast_1d(np.asarray(raw, dtype=float))
            if values.ndim != 1 or values.size not in {1, k}:
                message = f"{label} needs 1 or {k} values for model {config.model.name!r}, got {values.size}"
                raise ConfigError(message)

            out.append(np.broadcast_to(values, (k,)))

        return out[0], out[1]

    def _draw_z(self, rng: np.random.Generator) -> np.ndarray:
        config = self.config
        shape = (config.n, config.model.k)
        if config.z_dist == "uniform":
            return rng.uniform(config.z_low, config.z_high, size=shape)

        if config.z_dist == "normal":
            z_mean, z_sd = self.normal_design()
            return rng.normal(z_mean, z_sd, size=shape)

        return np.array(config.z_values[: config.n], dtype=float)  # type: ignore[index]

    def _draw_eps(self, rng: np.random.Generator) -> np.ndarray:
        config = self.config
        sigma = np.sqrt(config.gamma0.sigma_eps2)
        if config.eps_dist == "normal":
            return sigma * rng.standard_normal(config.n)

        if config.eps_dist == "t":
            df = config.eps_df
            return sigma * np.sqrt((df - 2.0) / df) * rng.standard_t(df, size=config.n)

        half_width = sigma * np.sqrt(3.0)
        return rng.uniform(-half_width, half_width, size=config.n)

    def generate(self, seed: int | None = None) -> Dataset:
        config = self.config
        effective_seed = get_effective_param(config.seed, seed)
        z_stream, delta_stream, eps_stream = np.random.SeedSequence(effective_seed).spawn(3)

        z = self._draw_z(np.random.default_rng(z_stream))
        delta = config.model.sample_delta(config.gamma0.psi, config.n, np.random.default_rng(delta_stream))
        eps = self._draw_eps(np.random.default_rng(eps_stream))
        y = config.model.eval_g(z + delta, config.gamma0.theta) + eps
        return Dataset(y=y, z=z)


def generate_dataset(config: GenConfig) -> Dataset:
    return DataGenerator(config).generate()
