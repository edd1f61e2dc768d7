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
from berkson_engine.components.data_generator import DataGenerator
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.data_structures.param_vector import ParamVector
from berkson_engine.data_structures.study_config import GenConfig


@pytest.fixture
def example1() -> ModelSpec:
    return builtin("example1")


@pytest.fixture
def example2() -> ModelSpec:
    return builtin("example2", k=1)


@pytest.fixture
def example3() -> ModelSpec:
    return builtin("example3")


@pytest.fixture
def constant_model() -> ModelSpec:
    # g is constant and sigma_delta^2 is known: simulation noise vanishes under phi = f_delta.
    return builtin("constant", k=1, sigma_delta2=1.0)


@pytest.fixture
def gamma_example1() -> np.ndarray:
    # theta = (1, 1, 1), sigma_delta^2 = 1, sigma_eps^2 = 1
    return np.array([1.0, 1.0, 1.0, 1.0, 1.0])


@pytest.fixture
def gamma_example2() -> np.ndarray:
    return np.array([1.0, 1.0, 0.5, 0.5])


@pytest.fixture
def example1_data(example1: ModelSpec, gamma_example1: np.ndarray) -> Dataset:
    config = GenConfig(
        model=example1,
        gamma0=ParamVector.from_array(gamma_example1, example1.p, example1.q),
        n=300,
        seed=11,
    )
    return DataGenerator(config).generate()


@pytest.fixture
def example2_config(example2: ModelSpec, gamma_example2: np.ndarray) -> GenConfig:
    return GenConfig(
        model=example2,
        gamma0=ParamVector.from_array(gamma_example2, example2.p, example2.q),
        n=2000,
        seed=3,
    )


@pytest.fixture
def example2_data(example2_config: GenConfig) -> Dataset:
    return DataGenerator(example2_config).generate()


@pytest.fixture
def constant_data(constant_model: ModelSpec) -> Dataset:
    config = GenConfig(
        model=constant_model,
        gamma0=ParamVector(theta=np.array([0.75]), psi=np.zeros(0), sigma_eps2=0.5),
        n=200,
        seed=5,
    )
    return DataGenerator(config).generate()
