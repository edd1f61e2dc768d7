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
"""Minimum distance objectives for Berkson-Engine.

This module builds the residual rho_i = (Y_i - m1(Z_i; gamma), Y_i^2 - m2(Z_i; gamma)), the
weighted objective Q_n = sum_i rho_i' W_i rho_i, its simulated cross-product version
Q_nS = sum_i rho_i^(S)' W_i rho_i^(2S), their analytic gradients, the residual covariance
estimate V and the weighting schemes of the one- and two-stage estimators.

Classes:
    WeightScheme: Identity, fixed (2 x 2 or n x 2 x 2) or estimated V^-1 weighting.
    Residual: Pair of residual components.
    MomentObjective: Q_n and its gradient for one moment source, counting evaluations.
    SimulatedObjective: Q_nS and its gradient for one frozen draw store.

Functions:
    rho, Q_n, Q_nS, grad_Q_n, grad_Q_nS, estimate_V, regularize_V.
"""

import logging
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Literal

import numpy as np

from berkson_engine.components.moment_sources import MomentSource
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.data_structures.draw_store import Half
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import EvaluationError

logger = logging.getLogger(__name__)

SHRINKAGE_LADDER = (0.01, 0.05, 0.1, 1.0)
DETERMINANT_TOLERANCE = 1e-10
SYMMETRY_TOLERANCE = 1e-12


def _check_nonneg_definite(matrix: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(matrix))))
    if not np.allclose(matrix, np.swapaxes(matrix, -1, -2), rtol=0.0, atol=SYMMETRY_TOLERANCE * scale):
        message = "Weight matrix must be symmetric."
        raise ConfigError(message)

    smallest = float(np.min(np.linalg.eigvalsh(matrix)))
    if smallest < -SYMMETRY_TOLERANCE * scale:
        message = f"Weight matrix must be nonnegative definite, smallest eigenvalue is {smallest}"
        raise ConfigError(message)


@dataclass(slots=True, frozen=True)
class WeightScheme:
    """Weighting of the two residual components.

    Attributes:
        variant (str): ``identity``, ``fixed`` or ``estimated``.
        matrix (np.ndarray): A 2 x 2 weight, or an n x 2 x 2 stack of per-observation weights.
        diagnostics (dict[str, Any]): Shrinkage and fallback information of an estimated weight.

    """

    variant: Literal["identity", "fixed", "estimated"]
    matrix: np.ndarray
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def identity(cls) -> "WeightScheme":
        return cls(variant="identity", matrix=np.eye(2))

    @classmethod
    def fixed(cls, matrix: np.ndarray | list) -> "WeightScheme":
        arr = np.array(matrix, dtype=float)
        if arr.shape[-2:] != (2, 2) or arr.ndim not in {2, 3}:
            message = f"Fixed weight must be 2 x 2 or n x 2 x 2, got shape {arr.shape}"
            raise ConfigError(message)

        if not np.all(np.isfinite(arr)):
            message = "Fixed weight must be finite."
            raise ConfigError(message)

        _check_nonneg_definite(arr)
        arr.setflags(write=False)
        return cls(variant="fixed", matrix=arr)

    @classmethod
    def estimated(cls, v_hat: np.ndarray) -> "WeightScheme":
        """Returns W = V^-1 after shrinking an ill-conditioned V (identity if every rung fails)."""
        v_used, info = regularize_V(v_hat)
        if info["identity_fallback"]:
            return cls(variant="estimated", matrix=np.eye(2), diagnostics=info)

        inverse = np.linalg.inv(v_used)
        return cls(variant="estimated", matrix=0.5 * (inverse + inverse.T), diagnostics=info)

    def resolve(self, n: int) -> np.ndarray:
        if self.matrix.ndim == 3 and self.matrix.shape[0] != n:  # noqa: PLR2004
            message = f"Per-observation weights cover {self.matrix.shape[0]} observations, data has {n}"
            raise ConfigError(message)

        return np.broadcast_to(self.matrix, (n, 2, 2))

    def summary(self) -> np.ndarray:
        return self.matrix if self.matrix.ndim == 2 else self.matrix.mean(axis=0)  # noqa: PLR2004

    def scaled(self, factor: float) -> "WeightScheme":
        return WeightScheme(variant=self.variant, matrix=factor * self.matrix, diagnostics=dict(self.diagnostics))


@dataclass(slots=True)
class Residual:
    r1: np.ndarray
    r2: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.stack([np.atleast_1d(self.r1), np.atleast_1d(self.r2)], axis=-1)


def _residual_matrix(y: np.ndarray, m1: np.ndarray, m2: np.ndarray) -> np.ndarray:
    res = np.stack([y - m1, y * y - m2], axis=-1)
    bad = ~np.all(np.isfinite(res), axis=-1)
    if np.any(bad):
        index = int(np.flatnonzero(bad)[0])
        message = f"Non-finite residual at observation {index}"
        raise EvaluationError(message, index=index)

    return res


def rho(y: float | np.ndarray, z: np.ndarray, gamma: np.ndarray, source: MomentSource) -> Residual:
    """Residual (y - m1, y^2 - m2) for one observation or for each row of ``z``."""
    y_arr = np.atleast_1d(np.asarray(y, dtype=float))
    m1, m2 = source.moments(np.atleast_2d(z), gamma)
    res = _residual_matrix(y_arr, m1, m2)
    if np.ndim(y) == 0:
        return Residual(r1=res[0, 0], r2=res[0, 1])

    return Residual(r1=res[:, 0], r2=res[:, 1])


def residuals(data: Dataset, gamma: np.ndarray, source: MomentSource) -> np.ndarray:
    m1, m2 = source.moments(data.z, gamma)
    return _residual_matrix(data.y, m1, m2)


def half_residuals(data: Dataset, gamma: np.ndarray, simulated: SimulatedMoments, half: Half) -> np.ndarray:
    return _residual_matrix(data.y, *simulated.moments(data.z, gamma, half))


def half_jacobians(data: Dataset, gamma: np.ndarray, simulated: SimulatedMoments, half: Half) -> np.ndarray:
    return -np.stack(simulated.gradients(data.z, gamma, half), axis=1)


def jacobians(data: Dataset, gamma: np.ndarray, source: MomentSource) -> np.ndarray:
    """Returns d rho_i / d gamma' stacked as (n, 2, p + q + 1)."""
    dm1, dm2 = source.gradients(data.z, gamma)
    return -np.stack([dm1, dm2], axis=1)


def Q_n(data: Dataset, gamma: np.ndarray, weight: WeightScheme, source: MomentSource) -> float:  # noqa: N802
    """Weighted minimum distance objective.

    Args:
        data (Dataset): Observed (Y, Z) pairs.
        gamma (np.ndarray): Parameter vector (theta, psi, sigma_eps2).
        weight (WeightScheme): 2 x 2 or per-observation weights.
        source (MomentSource): Exact or simulated m1 / m2.

    Returns:
        float: sum_i rho_i' W_i rho_i, nonnegative for nonnegative definite weights.

    Raises:
        EvaluationError: If a residual is not finite.

    """
    res = residuals(data, gamma, source)
    return float(np.einsum("ni,nij,nj->", res, weight.resolve(data.n), res))


def Q_nS(data: Dataset, gamma: np.ndarray, weight: WeightScheme, simulated: SimulatedMoments) -> float:  # noqa: N802
    """Cross-product objective of the two store halves; unbiased for Q_n and possibly negative."""
    first = half_residuals(data, gamma, simulated, "first")
    second = half_residuals(data, gamma, simulated, "second")
    return float(np.einsum("ni,nij,nj->", first, weight.resolve(data.n), second))


def grad_Q_n(data: Dataset, gamma: np.ndarray, weight: WeightScheme, source: MomentSource) -> np.ndarray:  # noqa: N802
    """Analytic gradient 2 sum_i J_i' W_i rho_i of :func:`Q_n`."""
    res = residuals(data, gamma, source)
    jac = jacobians(data, gamma, source)
    weighted = np.einsum("nij,nj->ni", weight.resolve(data.n), res)
    return 2.0 * np.einsum("nid,ni->d", jac, weighted)


def grad_Q_nS(  # noqa: N802
    data: Dataset,
    gamma: np.ndarray,
    weight: WeightScheme,
    simulated: SimulatedMoments,
) -> np.ndarray:
    """Gradient of :func:`Q_nS` with the draws frozen; symmetric in the two store halves."""
    w = weight.resolve(data.n)
    first = half_residuals(data, gamma, simulated, "first")
    second = half_residuals(data, gamma, simulated, "second")
    jac_first = half_jacobians(data, gamma, simulated, "first")
    jac_second = half_jacobians(data, gamma, simulated, "second")
    return np.einsum("nid,nij,nj->d", jac_first, w, second) + np.einsum("nid,nij,nj->d", jac_second, w, first)


def estimate_V(data: Dataset, gamma_hat: np.ndarray, source: MomentSource) -> np.ndarray:  # noqa: N802
    """Global residual covariance (1/n) sum_i rho_i rho_i' at the first-stage estimate."""
    res = residuals(data, gamma_hat, source)
    v_hat = res.T @ res / data.n
    return 0.5 * (v_hat + v_hat.T)


def regularize_V(v_hat: np.ndarray) -> tuple[np.ndarray, dict[str, Any]]:  # noqa: N802
    """Shrinks V toward diag(v11, v22) until det(V) > 1e-10 v11 v22.

    Tries lambda in (0, 0.01, 0.05, 0.1, 1); V_lambda = (1 - lambda) V + lambda diag(v11, v22).
    If no rung is well conditioned the identity is returned and flagged.
    """
    v_hat = np.asarray(v_hat, dtype=float)
    v11, v22 = float(v_hat[0, 0]), float(v_hat[1, 1])
    diagonal = np.diag([v11, v22])

    for shrinkage in (0.0, *SHRINKAGE_LADDER):
        candidate = (1.0 - shrinkage) * v_hat + shrinkage * diagonal
        det = float(np.linalg.det(candidate))
        if v11 > 0 and v22 > 0 and det > DETERMINANT_TOLERANCE * v11 * v22:
            if shrinkage > 0:
                logger.warning("Residual covariance is ill-conditioned; shrunk with lambda=%g", shrinkage)

            return candidate, {"shrinkage": shrinkage, "identity_fallback": False}

    logger.warning("Residual covariance could not be regularized; falling back to the identity weight")
    return np.eye(2), {"shrinkage": None, "identity_fallback": True}


class MomentObjective:
    """Q_n(gamma) for fixed data, weight and moment source; counts evaluations."""

    def __init__(self, data: Dataset, source: MomentSource, weight: WeightScheme) -> None:
        self.data = data
        self.source = source
        self.weight = weight
        self.n_evals = 0

    def __call__(self, gamma: np.ndarray) -> float:
        self.n_evals += 1
        return Q_n(self.data, gamma, self.weight, self.source)

    def gradient(self, gamma: np.ndarray) -> np.ndarray:
        return grad_Q_n(self.data, gamma, self.weight, self.source)


class SimulatedObjective:
    """Q_nS(gamma) for fixed data, weight and frozen draw store; counts evaluations."""

    def __init__(self, data: Dataset, simulated: SimulatedMoments, weight: WeightScheme) -> None:
        self.data = data
        self.simulated = simulated
        self.weight = weight
        self.n_evals = 0

    def __call__(self, gamma: np.ndarray) -> float:
        self.n_evals += 1
        return Q_nS(self.data, gamma, self.weight, self.simulated)

    def gradient(self, gamma: np.ndarray) -> np.ndarray:
        return grad_Q_nS(self.data, gamma, self.weight, self.simulated)
