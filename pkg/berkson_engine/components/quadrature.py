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
"""Gauss-Hermite quadrature oracle for Berkson-Engine.

This module integrates g(z + t; theta) and g^2(z + t; theta) against the isotropic normal
Berkson error with a tensor-product Gauss-Hermite rule. It serves as the independent oracle
for the closed forms and simulators and as the exact moment source for models without
closed forms, for k <= 3.

Classes:
    QuadratureRule: Nodes and weights of a rule for N(0, s I_k).
    QuadratureOracle: Moments and gradients of a ModelSpec by quadrature.

Functions:
    standard_rule: Cached rule for N(0, I_k).
    normal_rule: Rule for N(0, s I_k).
    m_quad: Quadrature approximation of (m1, m2).
"""

from dataclasses import dataclass
from functools import lru_cache
from functools import reduce
from itertools import product

import numpy as np
from numpy.polynomial.hermite import hermgauss

from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import UnsupportedOperationError

DEFAULT_ORDER = 20
MAX_K = 3
CHUNK_ELEMENTS = 2_000_000


@dataclass(slots=True, frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def size(self) -> int:
        return self.weights.size


@lru_cache(maxsize=32)
def standard_rule(order: int, k: int) -> QuadratureRule:
    """Tensor-product rule for N(0, I_k) with ``order`` nodes per axis; weights sum to 1."""
    if order < 1 or k < 1:
        message = f"Quadrature order and dimension must be >= 1, got order={order}, k={k}"
        raise ConfigError(message)

    x, w = hermgauss(order)
    points = x * np.sqrt(2.0)
    weights = w / np.sqrt(np.pi)

    nodes = np.array(list(product(points, repeat=k)), dtype=float)
    tensor_weights = reduce(np.kron, [weights] * k)
    nodes.setflags(write=False)
    tensor_weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=tensor_weights)


def normal_rule(order: int, k: int, s: float) -> QuadratureRule:
    base = standard_rule(order, k)
    return QuadratureRule(nodes=base.nodes * np.sqrt(s), weights=base.weights)


def _chunks(n: int, size: int) -> list[slice]:
    step = max(1, CHUNK_ELEMENTS // max(size, 1))
    return [slice(start, min(start + step, n)) for start in range(0, n, step)]


class QuadratureOracle:
    """Moments of a ModelSpec with isotropic normal Berkson errors by Gauss-Hermite quadrature.

    Attributes:
        model (ModelSpec): Model whose error density must be the built-in normal.
        order (int): Nodes per axis (default 20).

    """

    def __init__(self, model: ModelSpec, order: int = DEFAULT_ORDER) -> None:
        if model.f_delta.name != "normal":
            message = f"Quadrature needs normal Berkson errors, model {model.name!r} uses {model.f_delta.name!r}"
            raise UnsupportedOperationError(message)

        if model.k > MAX_K:
            message = f"Quadrature is limited to k <= {MAX_K}; model {model.name!r} has k={model.k}, use simulation"
            raise UnsupportedOperationError(message)

        self.model = model
        self.order = order

    def rule(self, gamma: np.ndarray) -> QuadratureRule:
        _, psi, _ = self.model.split(gamma)
        return normal_rule(self.order, self.model.k, self.model.f_delta.variance(psi))

    def moments(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        theta, _, sigma_eps2 = self.model.split(gamma)
        rule = self.rule(gamma)
        z = np.atleast_2d(np.asarray(z, dtype=float))
        m1 = np.empty(z.shape[0])
        eg2 = np.empty(z.shape[0])

        for rows in _chunks(z.shape[0], rule.size):
            x = z[rows, None, :] + rule.nodes[None, :, :]
            g = self.model.eval_g(x, theta)
            m1[rows] = g @ rule.weights
            eg2[rows] = (g * g) @ rule.weights

        return m1, eg2 + sigma_eps2

    def gradients(self, z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Returns (dm1/dgamma, dm2/dgamma), each (n, p + q + 1).

        The psi-block uses the score form sum_m w_m g(z + t_m) d log f_delta(t_m; psi) / d psi.
        """
        model = self.model
        theta, psi, _ = model.split(gamma)
        rule = self.rule(gamma)
        z = np.atleast_2d(np.asarray(z, dtype=float))
        n = z.shape[0]
        score = model.f_delta.log_gradient(rule.nodes, psi)
        grad1 = np.zeros((n, model.dim))
        grad2 = np.zeros((n, model.dim))
        grad2[:, -1] = 1.0

        for rows in _chunks(n, rule.size * model.p):
            x = z[rows, None, :] + rule.nodes[None, :, :]
            g = model.eval_g(x, theta)
            dg = model.grad_g_theta(x, theta)
            weighted = rule.weights[None, :, None]
            grad1[rows, : model.p] = np.sum(weighted * dg, axis=1)
            grad2[rows, : model.p] = np.sum(weighted * 2.0 * g[..., None] * dg, axis=1)
            if model.q:
                grad1[rows, model.p : model.p + model.q] = (g * rule.weights) @ score
                grad2[rows, model.p : model.p + model.q] = (g * g * rule.weights) @ score

        return grad1, grad2


def m_quad(
    model: ModelSpec,
    z: np.ndarray,
    gamma: np.ndarray,
    order: int = DEFAULT_ORDER,
) -> tuple[float, float] | tuple[np.ndarray, np.ndarray]:
    """Quadrature (m1, m2) for one predictor vector or for each row of an (n, k) matrix."""
    arr = np.asarray(z, dtype=float)
    m1, m2 = QuadratureOracle(model, order).moments(np.atleast_2d(arr), gamma)
    if arr.ndim == 1:
        return float(m1[0]), float(m2[0])

    return m1, m2
