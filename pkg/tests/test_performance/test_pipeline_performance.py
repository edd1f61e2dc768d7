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

from collections.abc import Callable

import pytest

from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.pipelines.base_pipeline import FitOptions
from berkson_engine.pipelines.single_pipeline import SinglePipeline


@pytest.fixture
def pipeline(example2: ModelSpec) -> SinglePipeline:
    return SinglePipeline(example2, options=FitOptions(multistart_count=1, seed=0))


@pytest.mark.benchmark(group="SinglePipeline Performance", warmup=False)
def test_mde_fit_performance(benchmark: Callable, pipeline: SinglePipeline, example2_data: Dataset) -> None:
    benchmark.pedantic(pipeline.fit_mde, args=(example2_data,), rounds=3, iterations=1)


@pytest.mark.benchmark(group="SinglePipeline Performance", warmup=False)
def test_se_fit_performance(benchmark: Callable, pipeline: SinglePipeline, example2_data: Dataset) -> None:
    data = example2_data.take(list(range(500)))
    benchmark.pedantic(pipeline.fit_se, args=(data,), kwargs={"S": 20, "seed": 1}, rounds=3, iterations=1)
