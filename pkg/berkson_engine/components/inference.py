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
"""Sandwich inference for Berkson-Engine.

With J_i = d rho_i / d gamma' and weights W_i:

    B = (1/n) sum_i J_i' W_i J_i
    C = (1/n) sum_i J_i' W_i rho_i rho_i' W_i J_i
    C_S = (1/4n) sum_i u_i u_i',  u_i = J_i^(S)' W_i rho_i^(2S) + J_i^(2S)' W_i rho_i^(S)

and the covariance of the estimate is B^-1 C B^-1 / n (C_S in place of C for simulated fits).

Classes:
    SandwichParts: B, C and n.
    EfficiencyGap: C_S - C summaries.

Functions:
    estimate_B, estimate_C, estimate_CS, sandwich, wald_intervals, efficiency_gap.
"""

from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy import stats

from berkson_engine.components.moment_sources import MomentSource
from berkson_engine.components.objective import WeightScheme
from berkson_engine.components.objective import half_jacobians
from berkson_engine.components.objective import half_residuals
from berkson_engine.components.objective import jacobians
from berkson_engine.components.objective import residuals
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import InferenceUnavailableError

MAX_CONDITION = 1e10


@dataclass(slots=True)
class SandwichParts:
    B_hat: np.ndarray  # noqa: N815
    C_hat: np.ndarray  # noqa: N815
    n: int


@dataclass(slots=True)
class EfficiencyGap:
    gap: np.ndarray
    trace: float
    scaled_trace: float
    min_eigenvalue: float
    S: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "gap": self.gap.tolist(),
            "trace": self.trace,
            "scaled_trace": self.scaled_trace,
            "min_eigenvalue": self.min_eigenvalue,
            "S": self.S,
        }


def _symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def estimate_B(  # noqa: N802
    data: Dataset,
    gamma_hat: np.ndarray,
    weight: WeightScheme,
    source: MomentSource,
) -> np.ndarray:
    """(1/n) sum_i J_i' W_i J_i; symmetric by construction for symmetric weights."""
    jac = jacobians(data, gamma_hat, source)
    b_hat = np.einsum("nia,nij,njb->ab", jac, weight.resolve(data.n), jac) / data.n
    return _symmetrize(b_hat)


def estimate_C(  # noqa: N802
    data: Dataset,
    gamma_hat: np.ndarray,
    weight: WeightScheme,
    source: MomentSource,
) -> np.ndarray:
    """Per-observation score outer product.

    Args:
        data (Dataset): Observed (Y, Z) pairs.
        gamma_hat (np.ndarray): Estimate at which scores are evaluated.
        weight (WeightScheme): Weight used by the fit.
        source (MomentSource): Moments of the fit.

    Returns:
        np.ndarray: (1/n) sum_i J_i' W_i rho_i rho_i' W_i J_i, symmetric (d, d).

    """
    jac = jacobians(data, gamma_hat, source)
    res = residuals(data, gamma_hat, source)
    scores = np.einsum("nia,nij,nj->na", jac, weight.resolve(data.n), res)
    return _symmetrize(scores.T @ scores / data.n)


def estimate_CS(  # noqa: N802
    data: Dataset,
    gamma_hat: np.ndarray,
    weight: WeightScheme,
    simulated: SimulatedMoments,
) -> np.ndarray:
    """Score outer product of the split-sample objective, C_S = (1/4n) sum_i u_i u_i'.

    Args:
        data (Dataset): Observed (Y, Z) pairs.
        gamma_hat (np.ndarray): Simulated estimate.
        weight (WeightScheme): Weight used by the fit.
        simulated (SimulatedMoments): Moments over the frozen store of the fit.

    Returns:
        np.ndarray: Symmetric (d, d) matrix; exceeds C by O(1/S).

    """
    w = weight.resolve(data.n)
    res_first = half_residuals(data, gamma_hat, simulated, "first")
    res_second = half_residuals(data, gamma_hat, simulated, "second")
    jac_first = half_jacobians(data, gamma_hat, simulated, "first")
    jac_second = half_jacobians(data, gamma_hat, simulated, "second")
    u = np.einsum("nia,nij,nj->na", jac_first, w, res_second) + np.einsum("nia,nij,nj->na", jac_second, w, res_first)
    return _symmetrize(u.T @ u / (4.0 * data.n))


def sandwich(parts: SandwichParts, max_condition: float = MAX_CONDITION) -> tuple[np.ndarray, np.ndarray]:
    """Returns (B^-1 C B^-1 / n, standard errors) with B inverted by SVD.

    Raises:
        InferenceUnavailableError: If B is singular or its condition number reaches ``max_condition``.

    """
    u, singular, vt = np.linalg.svd(parts.B_hat)
    condition = np.inf if singular[-1] <= 0 else float(singular[0] / singular[-1])
    if not condition < max_condition:
        message = f"B is ill-conditioned (condition number {condition:.3g}); covariance withheld"
        raise InferenceUnavailableError(message, condition_number=condition)

    b_inv = (vt.T / singular) @ u.T
    covariance = _symmetrize(b_inv @ parts.C_hat @ b_inv / parts.n)
    std_errors = np.sqrt(np.clip(np.diag(covariance), 0.0, None))
    return covariance, std_errors


def wald_intervals(gamma_hat: np.ndarray, std_errors: np.ndarray, level: float = 0.95) -> np.ndarray:
    """Returns an array of shape (d, 2) of gamma_hat -/+ z_{(1+level)/2} se."""
    if not 0 < level < 1:
        message = f"Confidence level must lie in (0, 1), got {level}"
        raise ConfigError(message)

    half_width = stats.norm.ppf(0.5 + 0.5 * level) * np.asarray(std_errors, dtype=float)
    gamma_hat = np.asarray(gamma_hat, dtype=float)
    return np.stack([gamma_hat - half_width, gamma_hat + half_width], axis=-1)


def efficiency_gap(c_hat: np.ndarray, cs_hat: np.ndarray, S: int) -> EfficiencyGap:  # noqa: N803
    gap = _symmetrize(np.asarray(cs_hat, dtype=float) - np.asarray(c_hat, dtype=float))
    trace = float(np.trace(gap))
    return EfficiencyGap(
        gap=gap,
        trace=trace,
        scaled_trace=S * trace,
        min_eigenvalue=float(np.min(np.linalg.eigvalsh(gap))),
        S=S,
    )
