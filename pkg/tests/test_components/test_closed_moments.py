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

import numpy as np
import pytest

from berkson_engine.components.builtin_models import builtin
from berkson_engine.components.closed_moments import closed_gradients
from berkson_engine.components.closed_moments import grad_m1_closed
from berkson_engine.components.closed_moments import m1_closed
from berkson_engine.components.closed_moments import m2_closed
from berkson_engine.components.closed_moments import phi_to_theta
from berkson_engine.components.closed_moments import theta_to_phi
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.quadrature import m_quad
from berkson_engine.utils.errors import SingularMapError
from berkson_engine.utils.errors import UnsupportedOperationError
from berkson_engine.utils.utils import central_difference


def test_example1_first_moment(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    assert m1_closed(example1, np.array([0.0, 0.0]), gamma_example1) == pytest.approx(1.648721, abs=1e-6)


def test_example1_second_moment(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    assert m2_closed(example1, np.array([0.0, 0.0]), gamma_example1) == pytest.approx(9.389056, abs=1e-6)


def test_example2_flat_slope(example2: ModelSpec) -> None:
    gamma = np.array([1.0, 0.0, 0.7, 0.5])
    z = np.array([[-1.0], [0.0], [2.5]])
    np.testing.assert_allclose(m1_closed(example2, z, gamma), [1.0, 1.0, 1.0])
    np.testing.assert_allclose(m2_closed(example2, z, gamma), [1.5, 1.5, 1.5])


def test_example3_mean_and_variance_derivative(example3: ModelSpec) -> None:
    gamma = np.array([0.0, 0.0, 1.0, 1.0, 0.0, 2.0, 0.0])
    z = np.array([0.0, 0.0])

    assert m1_closed(example3, z, gamma) == pytest.approx(4.0)
    assert grad_m1_closed(example3, z, gamma)[5] == pytest.approx(2.0)


@pytest.mark.parametrize(
    ("name", "k", "gamma"),
    [
        ("example1", None, np.array([0.8, -0.6, 1.2, 0.4, 0.3])),
        ("example2", 2, np.array([1.1, 0.5, -0.3, 0.6, 0.2])),
        ("example3", None, np.array([0.5, -1.0, 0.25, 0.75, -0.3, 0.8, 0.1])),
        ("linear", 2, np.array([1.0, -0.5, 0.3, 0.4])),
        ("constant", 2, np.array([0.9, 0.3, 0.4])),
    ],
)
def test_closed_forms_agree_with_quadrature(name: str, k: int | None, gamma: np.ndarray) -> None:
    model = builtin(name, k=k)
    z = np.random.default_rng(4).uniform(-1.0, 1.0, size=(5, model.k))

    m1, m2 = m_quad(model, z, gamma, order=40)
    np.testing.assert_allclose(m1_closed(model, z, gamma), m1, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(m2_closed(model, z, gamma), m2, rtol=1e-9, atol=1e-12)


@pytest.mark.parametrize(
    ("name", "k", "gamma"),
    [
        ("example1", None, np.array([0.8, -0.6, 1.2, 0.4, 0.3])),
        ("example2", 2, np.array([1.1, 0.5, -0.3, 0.6, 0.2])),
        ("example3", None, np.array([0.5, -1.0, 0.25, 0.75, -0.3, 0.8, 0.1])),
        ("linear", 3, np.array([1.0, -0.5, 2.0, 0.3, 0.4])),
    ],
)
def test_closed_gradients_match_finite_differences(name: str, k: int | None, gamma: np.ndarray) -> None:
    model = builtin(name, k=k)
    z = np.random.default_rng(5).uniform(-1.0, 1.0, size=(4, model.k))

    grad1, grad2 = closed_gradients(model, z, gamma)
    np.testing.assert_allclose(grad1, central_difference(lambda g: m1_closed(model, z, g), gamma), rtol=1e-6, atol=1e-8)
    np.testing.assert_allclose(grad2, central_difference(lambda g: m2_closed(model, z, g), gamma), rtol=1e-6, atol=1e-8)


def test_closed_forms_need_normal_errors() -> None:
    model = builtin("example1", density="laplace")
    with pytest.raises(UnsupportedOperationError, match="quadrature"):
        m1_closed(model, np.zeros(2), np.ones(5))


def test_example1_inverse_map(example1: ModelSpec) -> None:
    phi = np.array([1.0, 1.0, 1.0, 2.0, np.e])
    np.testing.assert_allclose(phi_to_theta(example1, phi), [1.0, 1.0, np.exp(-0.5), 1.0, 1.0], rtol=1e-12)


def test_example2_forward_map(example2: ModelSpec) -> None:
    gamma = np.array([1.0, 1.0, 1.0, 0.25])
    phi = theta_to_phi(example2, gamma)

    np.testing.assert_allclose(phi, [np.exp(0.5), 1.0, np.exp(2.0), 0.25], rtol=1e-12)
    np.testing.assert_allclose(phi_to_theta(example2, phi), gamma, atol=1e-12)


@pytest.mark.parametrize(("name", "k"), [("example1", None), ("example2", 3)])
def test_reparameterization_round_trip(name: str, k: int | None) -> None:
    model = builtin(name, k=k)
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(50):
        theta = rng.uniform(0.2, 1.5, size=model.p) * rng.choice([-1.0, 1.0], size=model.p)
        gamma = np.concatenate([theta, [rng.uniform(0.1, 1.5), rng.uniform(0.0, 2.0)]])
        recovered = phi_to_theta(model, theta_to_phi(model, gamma))
        worst = max(worst, float(np.max(np.abs(recovered - gamma))))

    assert worst < 1e-10


def test_singular_inverse_map(example1: ModelSpec) -> None:
    with pytest.raises(SingularMapError):
        phi_to_theta(example1, np.array([1.0, 0.0, 1.0, 2.0, np.e]))

    with pytest.raises(SingularMapError):
        phi_to_theta(example1, np.array([1.0, 1.0, 1.0, 2.0, -1.0]))


def test_reparameterization_needs_example1_or_example2(example3: ModelSpec) -> None:
    with pytest.raises(UnsupportedOperationError):
        theta_to_phi(example3, np.ones(7))


@pytest.mark.parametrize(
    ("name", "k", "gamma"),
    [
        ("example1", None, np.array([1.0, 1.0, 1.0, 1.0, 1.0])),
        ("example2", 2, np.array([1.1, 0.5, -0.3, 0.6, 0.0])),
        ("example3", None, np.array([0.5, -1.0, 0.25, 0.75, -0.3, 0.8, 0.0])),
        ("linear", 2, np.array([1.0, -0.5, 0.3, 0.0])),
    ],
)
def test_conditional_variance_is_nonnegative(name: str, k: int | None, gamma: np.ndarray) -> None:
    model = builtin(name, k=k)
    z = np.random.default_rng(7).uniform(-2.0, 2.0, size=(200, model.k))

    variance = m2_closed(model, z, gamma) - np.square(m1_closed(model, z, gamma))
    assert np.min(variance) >= -1e-10
