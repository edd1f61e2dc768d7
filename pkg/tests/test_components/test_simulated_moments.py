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

import logging

import numpy as np
import pytest

from berkson_engine.components.builtin_models import builtin
from berkson_engine.components.closed_moments import m1_closed
from berkson_engine.components.importance import ErrorDensityImportance
from berkson_engine.components.importance import StudentTImportance
from berkson_engine.components.importance import build_draw_store
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.components.simulated_moments import grad_m1_S
from berkson_engine.components.simulated_moments import m1_2S
from berkson_engine.components.simulated_moments import m1_S
from berkson_engine.components.simulated_moments import m2_S
from berkson_engine.data_structures.draw_store import DrawStore
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.utils import central_difference


def test_simulated_mean_is_unbiased(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    z = np.array([[0.3, -0.2]])
    phi = StudentTImportance(k=2, scale=np.sqrt(2.0))
    means = np.array(
        [
            SimulatedMoments(example1, build_draw_store(1, 50, 2, phi, seed)).moments(z, gamma_example1)[0][0]
            for seed in range(200)
        ],
    )

    truth = m1_closed(example1, z[0], gamma_example1)
    standard_error = means.std(ddof=1) / np.sqrt(means.size)
    assert abs(means.mean() - truth) < 4.0 * standard_error


def test_zero_regression_gives_noise_variance() -> None:
    model = builtin("linear", k=1)
    gamma = np.array([0.0, 0.8, 0.35])
    store = build_draw_store(3, 10, 1, StudentTImportance(k=1, scale=1.0), seed=0)
    m1, m2 = SimulatedMoments(model, store).moments(np.zeros((3, 1)), gamma)

    np.testing.assert_array_equal(m1, 0.0)
    np.testing.assert_array_equal(m2, 0.35)


def test_halves_use_disjoint_draws(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    store = build_draw_store(2, 20, 2, StudentTImportance(k=2, scale=1.0), seed=9)
    z = np.array([0.1, 0.2])

    first = m1_S(example1, z, gamma_example1, store, 1)
    second = m1_2S(example1, z, gamma_example1, store, 1)
    swapped = m1_S(example1, z, gamma_example1, store.swapped(), 1)

    assert first != second
    assert swapped == pytest.approx(second, rel=1e-14)


def test_single_observation_helpers_match_vectorized(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    store = build_draw_store(3, 15, 2, StudentTImportance(k=2, scale=1.0), seed=2)
    z = np.array([[0.0, 0.5], [-0.5, 0.1], [0.7, 0.7]])
    m1, m2 = SimulatedMoments(example1, store).moments(z, gamma_example1, "first")

    assert m1_S(example1, z[2], gamma_example1, store, 2) == pytest.approx(m1[2], rel=1e-14)
    assert m2_S(example1, z[2], gamma_example1, store, 2) == pytest.approx(m2[2], rel=1e-14)


def test_gradients_match_finite_differences_for_a_frozen_store(example1: ModelSpec) -> None:
    gamma = np.array([0.8, -0.6, 1.2, 0.4, 0.3])
    store = build_draw_store(4, 25, 2, StudentTImportance(k=2, scale=1.0), seed=4)
    simulated = SimulatedMoments(example1, store)
    z = np.random.default_rng(3).uniform(-1.0, 1.0, size=(4, 2))

    for half in ("first", "second", "pooled"):
        grad1, grad2 = simulated.gradients(z, gamma, half)
        numeric1 = central_difference(lambda g, h=half: simulated.moments(z, g, h)[0], gamma)
        numeric2 = central_difference(lambda g, h=half: simulated.moments(z, g, h)[1], gamma)
        np.testing.assert_allclose(grad1, numeric1, rtol=1e-6, atol=1e-8)
        np.testing.assert_allclose(grad2, numeric2, rtol=1e-6, atol=1e-8)

    np.testing.assert_allclose(grad_m1_S(example1, z[0], gamma, store, 0, "pooled"), grad1[0], rtol=1e-14)


def test_zero_noise_simulation_is_exact(constant_model: ModelSpec) -> None:
    phi = ErrorDensityImportance(constant_model.f_delta)
    store = build_draw_store(5, 16, 1, phi, seed=0)
    gamma = np.array([0.75, 0.5])
    m1, m2 = SimulatedMoments(constant_model, store).moments(np.zeros((5, 1)), gamma, "second")

    np.testing.assert_array_equal(m1, 0.75)
    np.testing.assert_array_equal(m2, 0.75 * 0.75 + 0.5)


def test_weight_ratio_warns_for_a_narrow_importance_density(
    example1: ModelSpec,
    caplog: pytest.LogCaptureFixture,
) -> None:
    # One draw is four orders of magnitude less likely under phi than the others.
    store = DrawStore(draws=np.zeros((1, 4, 2)), phi_vals=np.array([[1.0, 1.0, 1.0, 1e-4]]), seed=0, S=2)
    with caplog.at_level(logging.WARNING):
        ratio = SimulatedMoments(example1, store).weight_ratio(np.array([1.0, 1.0, 1.0, 2.0, 1.0]))

    assert ratio > 1e3
    assert "weight ratio" in caplog.text


def test_store_must_match_model_dimension(example2: ModelSpec) -> None:
    store = build_draw_store(2, 2, 2, StudentTImportance(k=2, scale=1.0), seed=0)
    with pytest.raises(ConfigError):
        SimulatedMoments(example2, store)


def test_rows_must_align_with_store(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    store = build_draw_store(3, 2, 2, StudentTImportance(k=2, scale=1.0), seed=0)
    with pytest.raises(ConfigError):
        SimulatedMoments(example1, store).moments(np.zeros((2, 2)), gamma_example1)


def repeated_row_moments(model: ModelSpec, S: int, rows: int = 400) -> SimulatedMoments:  # noqa: N803
    store = build_draw_store(rows, S, 2, StudentTImportance(k=2, scale=np.sqrt(2.0)), seed=12)
    return SimulatedMoments(model, store)


def test_halves_are_uncorrelated(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    z = np.tile([0.3, -0.2], (400, 1))
    simulated = repeated_row_moments(example1, S=20)

    first = simulated.moments(z, gamma_example1, "first")[0]
    second = simulated.moments(z, gamma_example1, "second")[0]
    assert abs(np.corrcoef(first, second)[0, 1]) < 0.2


def test_simulation_variance_shrinks_like_one_over_S(example1: ModelSpec, gamma_example1: np.ndarray) -> None:
    z = np.tile([0.3, -0.2], (400, 1))

    coarse = repeated_row_moments(example1, S=10).moments(z, gamma_example1, "first")[0]
    fine = repeated_row_moments(example1, S=40).moments(z, gamma_example1, "first")[0]
    ratio = np.var(coarse, ddof=1) / np.var(fine, ddof=1)
    assert 2.5 <= ratio <= 6.0
