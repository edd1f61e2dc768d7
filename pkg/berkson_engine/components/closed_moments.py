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

"""Closed-form conditional moments for Berkson-Engine.

This module provides exact m1(z; gamma) = E[Y | Z = z] and m2(z; gamma) = E[Y^2 | Z = z]
together with their gamma-gradients for the built-in regression families under the
isotropic normal error N(0, sigma_delta^2 I_k), and the bijective reparameterizations
between structural parameters and the reduced-form coefficients of Examples 1 and 2.

Classes:
    ClosedMoments: Interface returning m1, E[g^2 | z] and their theta / sigma_delta^2 derivatives.
    Example1Moments, Example2Moments, Example3Moments, LinearMoments, ConstantMoments.

Functions:
    m1_closed, m2_closed, grad_m1_closed, grad_m2_closed: Public moment operations on a ModelSpec.
    theta_to_phi, phi_to_theta: Reparameterization maps of Examples 1 and 2.
"""

from abc import ABC
from abc import abstractmethod
from typing import TYPE_CHECKING

import numpy as np

from berkson_engine.components.regression_functions import quadratic_features
from berkson_engine.utils.errors import SingularMapError
from berkson_engine.utils.errors import UnsupportedOperationError

if TYPE_CHECKING:
    from berkson_engine.components.model_spec import ModelSpec

MomentDerivatives = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


class ClosedMoments(ABC):
    """Closed forms under delta ~ N(0, s I_k).

    ``z`` has shape (n, k). ``moments`` returns (m1, E[g^2(z + delta; theta) | z]) without the
    sigma_eps2 term; ``derivatives`` returns (dm1/dtheta, dm1/ds, dEg2/dtheta, dEg2/ds).
    """

    @abstractmethod
    def moments(self, z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]: ...

    @abstractmethod
    def derivatives(self, z: np.ndarray, theta: np.ndarray, s: float) -> MomentDerivatives: ...


class Example1Moments(ClosedMoments):
    """theta1 z1 + theta3 exp(theta2 z2) under N(0, s I_2) errors.

    The exponential term picks up the lognormal factor exp(theta2^2 s / 2) in m1 and exp(2 theta2^2 s) in E g^2.
    """

    @staticmethod
    def _terms(z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
        t2 = theta[1]
        a = np.exp(t2 * z[:, 1] + 0.5 * t2 * t2 * s)
        b = np.exp(2.0 * t2 * z[:, 1] + 2.0 * t2 * t2 * s)
        return a, b

    def moments(self, z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
        t1, _, t3 = theta
        z1 = z[:, 0]
        a, b = self._terms(z, theta, s)
        m1 = t1 * z1 + t3 * a
        eg2 = t1 * t1 * (z1 * z1 + s) + t3 * t3 * b + 2.0 * t1 * t3 * z1 * a
        return m1, eg2

    def derivatives(self, z: np.ndarray, theta: np.ndarray, s: float) -> MomentDerivatives:
        t1, t2, t3 = theta
        z1 = z[:, 0]
        z2 = z[:, 1]
        a, b = self._terms(z, theta, s)

        dm1 = np.stack([z1, t3 * a * (z2 + t2 * s), a], axis=-1)
        dm1_ds = 0.5 * t3 * a * t2 * t2

        deg2 = np.stack(
            [
                2.0 * t1 * (z1 * z1 + s) + 2.0 * t3 * z1 * a,
                t3 * t3 * b * (2.0 * z2 + 4.0 * t2 * s) + 2.0 * t1 * t3 * z1 * a * (z2 + t2 * s),
                2.0 * t3 * b + 2.0 * t1 * z1 * a,
            ],
            axis=-1,
        )
        deg2_ds = t1 * t1 + 2.0 * t2 * t2 * t3 * t3 * b + t1 * t3 * z1 * a * t2 * t2
        return dm1, dm1_ds, deg2, deg2_ds


class Example2Moments(ClosedMoments):
    """theta1 exp(z' beta) under normal errors; the lognormal mean gives exp(s |beta|^2 / 2)."""

    @staticmethod
    def _terms(z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray, float]:
        beta = theta[1:]
        bb = float(beta @ beta)
        zb = z @ beta
        return np.exp(zb + 0.5 * s * bb), np.exp(2.0 * zb + 2.0 * s * bb), bb

    def moments(self, z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
        a, b, _ = self._terms(z, theta, s)
        return theta[0] * a, theta[0] * theta[0] * b

    def derivatives(self, z: np.ndarray, theta: np.ndarray, s: float) -> MomentDerivatives:
        t1 = theta[0]
        beta = theta[1:]
        a, b, bb = self._terms(z, theta, s)

        dm1 = np.concatenate([a[:, None], t1 * a[:, None] * (z + s * beta)], axis=-1)
        dm1_ds = 0.5 * t1 * a * bb
        deg2 = np.concatenate([2.0 * t1 * b[:, None], t1 * t1 * b[:, None] * (2.0 * z + 4.0 * s * beta)], axis=-1)
        deg2_ds = 2.0 * t1 * t1 * b * bb
        return dm1, dm1_ds, deg2, deg2_ds


class Example3Moments(ClosedMoments):
    """Quadratic polynomial in two predictors.

    With g0 = g(z; theta), the gradient a = (a1, a2) of g at z and u = theta3 + theta4:
    m1 = g0 + u s and E[g^2 | z] = g0^2 + s |a|^2 + 2 g0 u s + s^2 c,
    where c = 3 theta3^2 + 3 theta4^2 + theta5^2 + 2 theta3 theta4 (E delta^4 = 3 s^2, odd moments vanish).
    """

    def moments(self, z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
        t1, t2, t3, t4, t5 = theta
        g0 = quadratic_features(z) @ theta
        a1 = t1 + 2.0 * t3 * z[:, 0] + t5 * z[:, 1]
        a2 = t2 + 2.0 * t4 * z[:, 1] + t5 * z[:, 0]
        u = t3 + t4
        c = 3.0 * t3 * t3 + 3.0 * t4 * t4 + t5 * t5 + 2.0 * t3 * t4
        m1 = g0 + u * s
        eg2 = g0 * g0 + s * (a1 * a1 + a2 * a2) + 2.0 * g0 * u * s + s * s * c
        return m1, eg2

    def derivatives(self, z: np.ndarray, theta: np.ndarray, s: float) -> MomentDerivatives:
        t1, t2, t3, t4, t5 = theta
        n = z.shape[0]
        z1 = z[:, 0]
        z2 = z[:, 1]
        feats = quadratic_features(z)
        g0 = feats @ theta
        a1 = t1 + 2.0 * t3 * z1 + t5 * z2
        a2 = t2 + 2.0 * t4 * z2 + t5 * z1
        u = t3 + t4
        c = 3.0 * t3 * t3 + 3.0 * t4 * t4 + t5 * t5 + 2.0 * t3 * t4

        du = np.array([0.0, 0.0, 1.0, 1.0, 0.0])
        dc = np.array([0.0, 0.0, 6.0 * t3 + 2.0 * t4, 6.0 * t4 + 2.0 * t3, 2.0 * t5])
        ones = np.ones(n)
        zeros = np.zeros(n)
        da1 = np.stack([ones, zeros, 2.0 * z1, zeros, z2], axis=-1)
        da2 = np.stack([zeros, ones, zeros, 2.0 * z2, z1], axis=-1)

        dm1 = feats + s * du
        dm1_ds = np.full(n, u)
        deg2 = (
            2.0 * g0[:, None] * feats
            + 2.0 * s * (a1[:, None] * da1 + a2[:, None] * da2)
            + 2.0 * s * (u * feats + g0[:, None] * du)
            + s * s * dc
        )
        deg2_ds = a1 * a1 + a2 * a2 + 2.0 * g0 * u + 2.0 * s * c
        return dm1, dm1_ds, deg2, deg2_ds


class LinearMoments(ClosedMoments):
    """x' theta: m1 = z' theta, E g^2 = (z' theta)^2 + s |theta|^2."""

    def moments(self, z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:
        lin = z @ theta
        return lin, lin * lin + s * float(theta @ theta)

    def derivatives(self, z: np.ndarray, theta: np.ndarray, s: float) -> MomentDerivatives:
        lin = z @ theta
        n = z.shape[0]
        dm1 = np.array(z, dtype=float, copy=True)
        deg2 = 2.0 * lin[:, None] * z + 2.0 * s * theta
        return dm1, np.zeros(n), deg2, np.full(n, float(theta @ theta))


class ConstantMoments(ClosedMoments):
    """g identically theta1; nothing depends on z or s."""

    def moments(self, z: np.ndarray, theta: np.ndarray, s: float) -> tuple[np.ndarray, np.ndarray]:  # noqa: ARG002
        n = z.shape[0]
        return np.full(n, theta[0]), np.full(n, theta[0] * theta[0])

    def derivatives(self, z: np.ndarray, theta: np.ndarray, s: float) -> MomentDerivatives:  # noqa: ARG002
        n = z.shape[0]
        return np.ones((n, 1)), np.zeros(n), np.full((n, 1), 2.0 * theta[0]), np.zeros(n)


def _require_closed(model: "ModelSpec") -> ClosedMoments:
    if model.closed_moments is None:
        message = (
            f"Model {model.name!r} has no closed-form moments; "
            "use the quadrature oracle (normal errors, k <= 3) or the simulated moments instead."
        )
        raise UnsupportedOperationError(message)

    return model.closed_moments


def _rows(z: np.ndarray) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=float)
    return np.atleast_2d(arr), arr.ndim == 1


def closed_moments(model: "ModelSpec", z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Returns (m1, m2) for each row of ``z`` (shape (n, k))."""
    closed = _require_closed(model)
    theta, psi, sigma_eps2 = model.split(gamma)
    m1, eg2 = closed.moments(z, theta, model.f_delta.variance(psi))
    return m1, eg2 + sigma_eps2


def closed_gradients(model: "ModelSpec", z: np.ndarray, gamma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Returns (dm1/dgamma, dm2/dgamma), each of shape (n, p + q + 1)."""
    closed = _require_closed(model)
    theta, psi, _ = model.split(gamma)
    dm1, dm1_ds, deg2, deg2_ds = closed.derivatives(z, theta, model.f_delta.variance(psi))
    n = z.shape[0]

    psi_cols_1 = dm1_ds[:, None] if model.q else np.zeros((n, 0))
    psi_cols_2 = deg2_ds[:, None] if model.q else np.zeros((n, 0))
    grad1 = np.concatenate([dm1, psi_cols_1, np.zeros((n, 1))], axis=-1)
    grad2 = np.concatenate([deg2, psi_cols_2, np.ones((n, 1))], axis=-1)
    return grad1, grad2


def m1_closed(model: "ModelSpec", z: np.ndarray, gamma: np.ndarray) -> float | np.ndarray:
    rows, single = _rows(z)
    m1, _ = closed_moments(model, rows, gamma)
    return float(m1[0]) if single else m1


def m2_closed(model: "ModelSpec", z: np.ndarray, gamma: np.ndarray) -> float | np.ndarray:
    rows, single = _rows(z)
    _, m2 = closed_moments(model, rows, gamma)
    return float(m2[0]) if single else m2


def grad_m1_closed(model: "ModelSpec", z: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    rows, single = _rows(z)
    grad1, _ = closed_gradients(model, rows, gamma)
    return grad1[0] if single else grad1


def grad_m2_closed(model: "ModelSpec", z: np.ndarray, gamma: np.ndarray) -> np.ndarray:
    rows, single = _rows(z)
    _, grad2 = closed_gradients(model, rows, gamma)
    return grad2[0] if single else grad2


def _require_reparameterizable(model: "ModelSpec") -> None:
    if model.name not in {"example1", "example2"} or model.q != 1 or model.f_delta.name != "normal":
        message = f"Reparameterization needs example1 or example2 with a free normal variance, not {model.name!r}"
        raise UnsupportedOperationError(message)


def theta_to_phi(model: "ModelSpec", params: np.ndarray) -> np.ndarray:
    """Maps gamma = (theta, sigma_delta^2, sigma_eps2) to the reduced-form coefficients phi."""
    _require_reparameterizable(model)
    gamma = np.asarray(params, dtype=float)
    theta, psi, sigma_eps2 = model.split(gamma)
    s = float(psi[0])

    if model.name == "example1":
        t1, t2, t3 = theta
        return np.array(
            [
                t1,
                t2,
                t3 * np.exp(0.5 * t2 * t2 * s),
                t1 * t1 * s + sigma_eps2,
                t3 * t3 * np.exp(2.0 * t2 * t2 * s),
            ],
        )

    beta = theta[1:]
    bb = float(beta @ beta)
    return np.concatenate(
        [
            [theta[0] * np.exp(0.5 * bb * s)],
            beta,
            [theta[0] * theta[0] * np.exp(2.0 * bb * s), sigma_eps2],
        ],
    )


def phi_to_theta(model: "ModelSpec", params: np.ndarray) -> np.ndarray:
    """Inverse of ``theta_to_phi``.

    Raises:
        SingularMapError: If a denominator vanishes or the log argument is not positive.

    """
    _require_reparameterizable(model)
    phi = np.asarray(params, dtype=float)

    if model.name == "example1":
        p1, p2, p3, p4, p5 = phi
        if p2 == 0 or p3 == 0:
            message = f"example1 inverse map needs phi2 != 0 and phi3 != 0, got phi={phi.tolist()}"
            raise SingularMapError(message)

        ratio = p5 / (p3 * p3)
        if not ratio > 0:
            message = f"example1 inverse map needs phi5 / phi3^2 > 0, got {ratio}"
            raise SingularMapError(message)

        s = np.log(ratio) / (p2 * p2)
        return np.array([p1, p2, p3 * np.exp(-0.5 * p2 * p2 * s), s, p4 - p1 * p1 * s])

    k = model.k
    p1 = phi[0]
    beta = phi[1 : 1 + k]
    p3 = phi[1 + k]
    p4 = phi[2 + k]
    bb = float(beta @ beta)
    if bb == 0 or p1 == 0:
        message = f"example2 inverse map needs phi2'phi2 != 0 and phi1 != 0, got phi={phi.tolist()}"
        raise SingularMapError(message)

    ratio = p3 / (p1 * p1)
    if not ratio > 0:
        message = f"example2 inverse map needs phi3 / phi1^2 > 0, got {ratio}"
        raise SingularMapError(message)

    s = np.log(ratio) / bb
    return np.concatenate([[p1 * np.exp(-0.5 * bb * s)], beta, [s, p4]])
