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

from berkson_engine.components.importance import ImportanceDensity
from berkson_engine.components.importance import build_draw_store
from berkson_engine.components.importance import default_importance
from berkson_engine.components.inference import SandwichParts
from berkson_engine.components.inference import efficiency_gap
from berkson_engine.components.inference import estimate_B
from berkson_engine.components.inference import estimate_C
from berkson_engine.components.inference import estimate_CS
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.moment_sources import SimulatedSource
from berkson_engine.components.moment_sources import resolve_source
from berkson_engine.components.objective import MomentObjective
from berkson_engine.components.objective import SimulatedObjective
from berkson_engine.components.objective import WeightScheme
from berkson_engine.components.simulated_moments import WEIGHT_RATIO_LIMIT
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.data_structures.draw_store import DrawStore
from berkson_engine.data_structures.estimate_result import EstimateResult
from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.pipelines.base_pipeline import BasePipeline
from berkson_engine.pipelines.base_pipeline import FitOptions
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import UnsupportedOperationError
from berkson_engine.utils.utils import get_effective_param

logger = logging.getLogger(__name__)


class SinglePipeline(BasePipeline):
    def fit_mde(self, data: Dataset, options: FitOptions | None = None) -> EstimateResult:
        """Minimum distance estimate with closed-form or quadrature moments."""
        options = self.resolve_options(options)
        self._check_data(data)
        source = resolve_source(self.model, options.moment_method, options.quadrature_order)

        stages = self.run_stages(
            data,
            lambda weight: MomentObjective(data, source, weight),
            source,
            options,
        )
        stages.diagnostics["estimator"] = "mde2" if options.two_stage else "mde"
        stages.diagnostics["moment_source"] = source.kind
        result = self.build_result(stages)

        gamma_hat = result.gamma_hat.to_array()
        return self.attach_inference(
            result,
            lambda: SandwichParts(
                B_hat=estimate_B(data, gamma_hat, stages.weight, source),
                C_hat=estimate_C(data, gamma_hat, stages.weight, source),
                n=data.n,
            ),
            options,
        )

    def fit_se(
        self,
        data: Dataset,
        S: int = 100,  # noqa: N803
        phi: ImportanceDensity | None = None,
        seed: int | None = None,
        options: FitOptions | None = None,
        store: DrawStore | None = None,
    ) -> EstimateResult:
        """Simulation-based estimate over one frozen draw store.

        The store is built from ``seed`` (default: the options seed) with ``phi`` (default: Student-t
        scaled by the largest sigma_delta of the box) unless a prebuilt ``store`` is passed.
        """
        options = self.resolve_options(options)
        self._check_data(data)
        if store is None:
            phi = phi if phi is not None else default_importance(self.model, self.space)
            store_seed = get_effective_param(options.seed, seed)
            store = build_draw_store(data.n, S, self.model.k, phi, int(store_seed))

        if store.n != data.n:
            message = f"Draw store has {store.n} rows, data has {data.n} observations"
            raise ConfigError(message)

        simulated = SimulatedMoments(self.model, store)
        pooled = SimulatedSource(simulated, "pooled")

        stages = self.run_stages(
            data,
            lambda weight: SimulatedObjective(data, simulated, weight),
            pooled,
            options,
        )
        gamma_hat = stages.outcome.x
        ratio = simulated.weight_ratio(gamma_hat)
        stages.diagnostics.update(
            {
                "estimator": "se2" if options.two_stage else "se",
                "moment_source": "simulated",
                "S": store.S,
                "seed": store.seed,
                "importance": store.tag,
                "max_weight_ratio": ratio if np.isfinite(ratio) else None,
                "weight_warning": not ratio <= WEIGHT_RATIO_LIMIT,
            },
        )
        result = self.build_result(stages)

        result = self.attach_inference(
            result,
            lambda: SandwichParts(
                B_hat=estimate_B(data, gamma_hat, stages.weight, pooled),
                C_hat=estimate_CS(data, gamma_hat, stages.weight, simulated),
                n=data.n,
            ),
            options,
        )
        if options.compute_inference:
            self._attach_efficiency_gap(result, data, simulated, stages.weight, options)

        return result

    def _attach_efficiency_gap(
        self,
        result: EstimateResult,
        data: Dataset,
        simulated: SimulatedMoments,
        weight: WeightScheme,
        options: FitOptions,
    ) -> None:
        try:
            exact = resolve_source(self.model, options.moment_method, options.quadrature_order)
        except UnsupportedOperationError:
            return

        gamma_hat = result.gamma_hat.to_array()
        gap = efficiency_gap(
            estimate_C(data, gamma_hat, weight, exact),
            estimate_CS(data, gamma_hat, weight, simulated),
            simulated.S,
        )
        result.diagnostics["efficiency_gap"] = gap.to_dict()

    def _check_data(self, data: Dataset) -> None:
        if data.k != self.model.k:
            message = f"Data has k={data.k} predictors, model {self.model.name!r} needs k={self.model.k}"
            raise ConfigError(message)


def fit_mde(
    data: Dataset,
    model: ModelSpec,
    space: ParamSpace | None = None,
    options: FitOptions | None = None,
) -> EstimateResult:
    """Fits one dataset by minimum distance with a throwaway pipeline.

    Args:
        data (Dataset): Observed (Y, Z) pairs.
        model (ModelSpec): Model to estimate.
        space (ParamSpace | None): Parameter box; the model default when None.
        options (FitOptions | None): Weighting, multistart and inference options.

    Returns:
        EstimateResult: Estimate with sandwich inference when available.

    """
    return SinglePipeline(model, space, options).fit_mde(data)


def fit_se(  # noqa: PLR0913
    data: Dataset,
    model: ModelSpec,
    space: ParamSpace | None = None,
    options: FitOptions | None = None,
    S: int = 100,  # noqa: N803
    phi: ImportanceDensity | None = None,
    seed: int | None = None,
) -> EstimateResult:
    """Simulated counterpart of :func:`fit_mde`; see :meth:`SinglePipeline.fit_se`."""
    return SinglePipeline(model, space, options).fit_se(data, S=S, phi=phi, seed=seed)
