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

from berkson_engine.components.importance import ErrorDensityImportance
from berkson_engine.components.importance import build_draw_store
from berkson_engine.components.inference import SandwichParts
from berkson_engine.components.inference import efficiency_gap
from berkson_engine.components.inference import estimate_B
from berkson_engine.components.inference import estimate_C
from berkson_engine.components.inference import estimate_CS
from berkson_engine.components.inference import sandwich
from berkson_engine.components.inference import wald_intervals
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.moment_sources import ClosedFormSource
from berkson_engine.components.objective import WeightScheme
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import InferenceUnavailableError


def test_sandwich_identity() -> None:
    covariance, se = sandwich(SandwichParts(B_hat=np.eye(3), C_hat=np.eye(3), n=100))

    np.testing.assert_allclose(covariance, np.eye(3) / 100)
    np.testing.assert_allclose(se, np.full(3, 0.1))


def test_sandwich_scales_with_B() -> None:
    covariance, _ = sandwich(SandwichParts(B_hat=2.0 * np.eye(2), C_hat=np.eye(2), n=50))

    np.testing.assert_allclose(covariance, np.eye(2) / (4 * 50))


def test_sandwich_general_matrices() -> None:
    b_hat = np.array([[2.0, 0.5], [0.5, 1.0]])
    c_hat = np.array([[1.0, 0.2], [0.2, 3.0]])
    covariance, se = sandwich(SandwichParts(B_hat=b_hat, C_hat=c_hat, n=10))
    b_inv = np.linalg.inv(b_hat)

    np.testing.assert_allclose(covariance, b_inv @ c_hat @ b_inv / 10, rtol=1e-12)
    np.testing.assert_allclose(se, np.sqrt(np.diag(covariance)))


def test_ill_conditioned_B_withholds_covariance() -> None:
    with pytest.raises(InferenceUnavailableError) as excinfo:
        sandwich(SandwichParts(B_hat=np.diag([1.0, 1e-11]), C_hat=np.eye(2), n=10))

    assert excinfo.value.condition_number == pytest.approx(1e11)


def test_singular_B_reports_infinite_condition() -> None:
    with pytest.raises(InferenceUnavailableError) as excinfo:
        sandwich(SandwichParts(B_hat=np.zeros((2, 2)), C_hat=np.eye(2), n=10))

    assert excinfo.value.condition_number == np.inf


def test_wald_intervals() -> None:
    intervals = wald_intervals(np.array([1.0, 2.0]), np.array([0.1, 0.2]), level=0.95)

    assert intervals.shape == (2, 2)
    np.testing.assert_allclose(intervals[:, 0], [1.0 - 0.1959963984540054, 2.0 - 0.3919927969080108])
    np.testing.assert_allclose(intervals[:, 1], [1.0 + 0.1959963984540054, 2.0 + 0.3919927969080108])


@pytest.mark.parametrize("level", [0.0, 1.0, 1.5])
def test_wald_intervals_rejects_levels(level: float) -> None:
    with pytest.raises(ConfigError):
        wald_intervals(np.zeros(1), np.ones(1), level=level)


def test_null_weight_gives_null_B(example1: ModelSpec, example1_data: Dataset, gamma_example1: np.ndarray) -> None:
    weight = WeightScheme.fixed(np.zeros((2, 2)))
    b_hat = estimate_B(example1_data, gamma_example1, weight, ClosedFormSource(example1))

    np.testing.assert_array_equal(b_hat, np.zeros((5, 5)))


def test_B_is_symmetric_positive_semidefinite(
    example1: ModelSpec,
    example1_data: Dataset,
    gamma_example1: np.ndarray,
) -> None:
    b_hat = estimate_B(example1_data, gamma_example1, WeightScheme.identity(), ClosedFormSource(example1))

    np.testing.assert_array_equal(b_hat, b_hat.T)
    assert np.min(np.linalg.eigvalsh(b_hat)) > -1e-10


def test_zero_residuals_give_null_C(constant_model: ModelSpec) -> None:
    data = Dataset(y=np.full(5, 0.75), z=np.zeros((5, 1)))
    c_hat = estimate_C(data, np.array([0.75, 0.0]), WeightScheme.identity(), ClosedFormSource(constant_model))

    np.testing.assert_array_equal(c_hat, np.zeros((2, 2)))


def test_simulated_C_matches_exact_C_without_simulation_noise(
    constant_model: ModelSpec,
    constant_data: Dataset,
) -> None:
    gamma = np.array([0.75, 0.5])
    store = build_draw_store(constant_data.n, 16, 1, ErrorDensityImportance(constant_model.f_delta), seed=0)
    weight = WeightScheme.identity()
    c_hat = estimate_C(constant_data, gamma, weight, ClosedFormSource(constant_model))
    cs_hat = estimate_CS(constant_data, gamma, weight, SimulatedMoments(constant_model, store))

    np.testing.assert_allclose(cs_hat, c_hat, rtol=1e-10, atol=1e-12)
    gap = efficiency_gap(c_hat, cs_hat, S=16)
    assert gap.trace == pytest.approx(0.0, abs=1e-9)


def test_efficiency_gap_summaries() -> None:
    gap = efficiency_gap(np.eye(2), np.diag([2.0, 3.0]), S=10)

    np.testing.assert_array_equal(gap.gap, np.diag([1.0, 2.0]))
    assert gap.trace == pytest.approx(3.0)
    assert gap.scaled_trace == pytest.approx(30.0)
    assert gap.min_eigenvalue == pytest.approx(1.0)
    assert gap.to_dict()["S"] == 10


def test_sandwich_is_invariant_to_weight_scale(
    example1: ModelSpec,
    example1_data: Dataset,
    gamma_example1: np.ndarray,
) -> None:
    source = ClosedFormSource(example1)
    weight = WeightScheme.fixed([[2.0, 0.3], [0.3, 0.5]])

    def covariance(w: WeightScheme) -> np.ndarray:
        parts = SandwichParts(
            B_hat=estimate_B(example1_data, gamma_example1, w, source),
            C_hat=estimate_C(example1_data, gamma_example1, w, source),
            n=example1_data.n,
        )
        return sandwich(parts)[0]

    reference = covariance(weight)
    for factor in (1e-3, 7.5):
        np.testing.assert_allclose(covariance(weight.scaled(factor)), reference, rtol=1e-8, atol=1e-14)
