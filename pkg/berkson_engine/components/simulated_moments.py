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
"""Importance-sampling simulators of the conditional moments.

For observation i and half h of a frozen DrawStore, with weights w_is = f_delta(t_is; psi) / phi(t_is):

    m1_h(Z_i; gamma) = mean_s g(Z_i + t_is; theta) w_is
    m2_h(Z_i; gamma) = mean_s g^2(Z_i + t_is; theta) w_is + sigma_eps2

The "first" half averages s = 1..S, the "second" half s = S+1..2S and "pooled" all 2S draws.
Gradients are exact derivatives of these averages for the frozen draws.

Classes:
    SimulatedMoments: Simulators and their gradients for one model and one store.

Functions:
    m1_S, m1_2S, m2_S, m2_2S, grad_m1_S, grad_m2_S: Single-observation operations.
"""

import logging

import numpy as np

from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.draw_store import DrawStore
from berkson_engine.data_structures.draw_store import Half
from berkson_engine.utils.errors import ConfigError

logger = logging.getLogger(__name__)

WEIGHT_RATIO_LIMIT = 1e3


class SimulatedMoments:
    """Simulated m1 / m2 of a model over the rows of a frozen store.

    Attributes:
        model (ModelSpec): Model providing g and f_delta.
        store (DrawStore): Frozen draws, one row per observation.

    """

    def __init__(self, model: ModelSpec, store: DrawStore) -> None:
        if store.k != model.k:
            message = f"Draw store has k={store.k} but model {model.name!r} has k={model.k}"
            raise ConfigError(message)

        self.model = model
        self.store = store

    @property
    def S(self) -> int:  # noqa: N802
        return self.store.S

    def _select(self, half: Half, rows: slice | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        cols = slice(None) if half == "pooled" else self.store.half_slice(half)
        return self.store.draws[rows, cols], self.store.phi_vals[rows, cols]

    def _check_rows(self, z: np.ndarray, rows: slice | np.ndarray) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        expected = self.store.draws[rows].shape[0]
        if z.shape[0] != expected:
            message = f"Expected {expected} predictor rows aligned with the draw store, got {z.shape[0]}"
            raise ConfigError(message)

        return z

    def weights(self, gamma: np.ndarray, half: Half = "pooled", rows: slice | np.ndarray = slice(None)) -> np.ndarray:
        _, psi, _ = self.model.split(gamma)
        draws, phi_vals = self._select(half, rows)
        return self.model.eval_density(draws, psi) / phi_vals

    def moments(
        self,
        z: np.ndarray,
        gamma: np.ndarray,
        half: Half = "first",
        rows: slice | np.ndarray = slice(None),
    ) -> tuple[np.ndarray, np.ndarray]:
        """Returns (m1_h, m2_h) for the rows of ``z`` aligned with ``rows`` of the store."""
        z = self._check_rows(z, rows)
        theta, psi, sigma_eps2 = self.model.split(gamma)
        draws, phi_vals = self._select(half, rows)
        w = self.model.eval_density(draws, psi) / phi_vals
        g = self.model.eval_g(z[:, None, :] + draws, theta)
        return np.mean(g * w, axis=1), np.mean(g * g * w, axis=1) + sigma_eps2

    def gradients(
        self,
        z: np.ndarray,
        gamma: np.ndarray,
        half: Half = "first",
        rows: slice | np.ndarray = slice(None),
    ) -> tuple[np.ndarray, np.ndarray]:
        """Returns (dm1_h/dgamma, dm2_h/dgamma), each (n, p + q + 1), for the frozen draws."""
        model = self.model
        z = self._check_rows(z, rows)
        theta, psi, _ = model.split(gamma)
        draws, phi_vals = self._select(half, rows)
        w = model.eval_density(draws, psi) / phi_vals
        x = z[:, None, :] + draws
        g = model.eval_g(x, theta)
        dg = model.grad_g_theta(x, theta)

        n = z.shape[0]
        grad1 = np.zeros((n, model.dim))
        grad2 = np.zeros((n, model.dim))
        grad1[:, : model.p] = np.mean(dg * w[..., None], axis=1)
        grad2[:, : model.p] = np.mean(2.0 * g[..., None] * dg * w[..., None], axis=1)
        if model.q:
            dw = model.grad_density_psi(draws, psi) / phi_vals[..., None]
            grad1[:, model.p : model.p + model.q] = np.mean(g[..., None] * dw, axis=1)
            grad2[:, model.p : model.p + model.q] = np.mean((g * g)[..., None] * dw, axis=1)

        grad2[:, -1] = 1.0
        return grad1, grad2

    def weight_ratio(self, gamma: np.ndarray) -> float:
        """Largest max_s w_is / median_s w_is over observations, using all 2S draws."""
        w = self.weights(gamma, "pooled")
        median = np.median(w, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(median > 0, np.max(w, axis=1) / median, np.inf)

        worst = float(np.max(ratio))
        if worst > WEIGHT_RATIO_LIMIT:
            logger.warning(
                "Importance weight ratio %.3g exceeds %.0f; consider a wider importance density",
                worst,
                WEIGHT_RATIO_LIMIT,
            )

        return worst


def _single(
    model: ModelSpec,
    z_i: np.ndarray,
    gamma: np.ndarray,
    store: DrawStore,
    i: int,
    half: Half,
) -> tuple[float, float]:
    rows = np.array([i])
    m1, m2 = SimulatedMoments(model, store).moments(np.atleast_2d(z_i), gamma, half, rows)
    return float(m1[0]), float(m2[0])


def m1_S(model: ModelSpec, z_i: np.ndarray, gamma: np.ndarray, store: DrawStore, i: int) -> float:  # noqa: N802
    """First-half simulated m1 for observation i.

    Args:
        model (ModelSpec): Model whose g and f_delta are averaged.
        z_i (np.ndarray): Predictor row of observation i, length k.
        gamma (np.ndarray): Parameter vector (theta, psi, sigma_eps2).
        store (DrawStore): Frozen draws; row i is used.
        i (int): Row of the store.

    Returns:
        float: (1/S) sum_{s<=S} g(z_i + t_is; theta) f_delta(t_is; psi) / phi(t_is).

    """
    return _single(model, z_i, gamma, store, i, "first")[0]


def m1_2S(model: ModelSpec, z_i: np.ndarray, gamma: np.ndarray, store: DrawStore, i: int) -> float:  # noqa: N802
    """Same as m1_S over the second half of row i."""
    return _single(model, z_i, gamma, store, i, "second")[0]


def m2_S(model: ModelSpec, z_i: np.ndarray, gamma: np.ndarray, store: DrawStore, i: int) -> float:  # noqa: N802
    """First-half simulated m2 for observation i; includes sigma_eps2."""
    return _single(model, z_i, gamma, store, i, "first")[1]


def m2_2S(model: ModelSpec, z_i: np.ndarray, gamma: np.ndarray, store: DrawStore, i: int) -> float:  # noqa: N802
    """Same as m2_S over the second half of row i."""
    return _single(model, z_i, gamma, store, i, "second")[1]


def grad_m1_S(  # noqa: N802
    model: ModelSpec,
    z_i: np.ndarray,
    gamma: np.ndarray,
    store: DrawStore,
    i: int,
    half: Half = "first",
) -> np.ndarray:
    """Gradient of the simulated m1 of observation i in gamma with the draws held fixed.

    Args:
        model (ModelSpec): Model whose g and f_delta are averaged.
        z_i (np.ndarray): Predictor row of observation i.
        gamma (np.ndarray): Parameter vector.
        store (DrawStore): Frozen draws.
        i (int): Row of the store.
        half (str): ``first``, ``second`` or ``pooled``.

    Returns:
        np.ndarray: Vector of length p + q + 1.

    """
    grad1, _ = SimulatedMoments(model, store).gradients(np.atleast_2d(z_i), gamma, half, np.array([i]))
    return grad1[0]


def grad_m2_S(  # noqa: N802
    model: ModelSpec,
    z_i: np.ndarray,
    gamma: np.ndarray,
    store: DrawStore,
    i: int,
    half: Half = "first",
) -> np.ndarray:
    """Gradient of the simulated m2 of observation i; see :func:`grad_m1_S`."""
    _, grad2 = SimulatedMoments(model, store).gradients(np.atleast_2d(z_i), gamma, half, np.array([i]))
    return grad2[0]
