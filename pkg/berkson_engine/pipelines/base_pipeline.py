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
from collections.abc import Callable
from dataclasses import dataclass
from dataclasses import field
from dataclasses import replace
from typing import Any

import numpy as np

from berkson_engine.components.inference import SandwichParts
from berkson_engine.components.inference import sandwich
from berkson_engine.components.inference import wald_intervals
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.components.moment_sources import MomentSource
from berkson_engine.components.objective import WeightScheme
from berkson_engine.components.objective import estimate_V
from berkson_engine.components.optimizer import BoxOptimizer
from berkson_engine.components.optimizer import Objective
from berkson_engine.components.optimizer import OptimizationOutcome
from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.data_structures.estimate_result import EstimateResult
from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.data_structures.param_vector import ParamVector
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import InferenceUnavailableError

logger = logging.getLogger(__name__)


@dataclass(slots=True, frozen=True)
class FitOptions:
    weight: WeightScheme = field(default_factory=WeightScheme.identity)
    two_stage: bool = False
    multistart_count: int = 5
    max_iterations: int = 2000
    xatol: float = 1e-8
    fatol: float = 1e-10
    seed: int | None = 0
    polish: bool = True
    moment_method: str = "auto"
    quadrature_order: int = 20
    compute_inference: bool = True
    level: float = 0.95

    def __post_init__(self) -> None:
        if self.multistart_count < 1 or self.max_iterations < 1:
            message = "multistart_count and max_iterations must be >= 1"
            raise ConfigError(message)

        if self.xatol <= 0 or self.fatol <= 0:
            message = f"Tolerances must be positive, got xatol={self.xatol}, fatol={self.fatol}"
            raise ConfigError(message)

    def with_overrides(self, **overrides: Any) -> "FitOptions":  # noqa: ANN401
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


@dataclass(slots=True)
class StageOutcome:
    outcome: OptimizationOutcome
    weight: WeightScheme
    n_evals: int
    diagnostics: dict[str, Any]


class BasePipeline:
    """Shared stage logic of the estimators: optimizer wiring, one- or two-stage fits, inference.

    Attributes:
        model (ModelSpec): Model being estimated.
        space (ParamSpace): Compact parameter box.
        options (FitOptions): Default options; every fit may override them.
        optimizer (BoxOptimizer): Multistart minimizer built from the options.

    """

    def __init__(
        self,
        model: ModelSpec,
        space: ParamSpace | None = None,
        options: FitOptions | None = None,
    ) -> None:
        self.model = model
        self.space = space if space is not None else model.default_space()
        self.options = options if options is not None else FitOptions()

        if self.space.dim != model.dim:
            message = f"Parameter box has {self.space.dim} coordinates, model {model.name!r} has {model.dim}"
            raise ConfigError(message)

        self.optimizer = self._init_optimizer(self.options)
        self._optimizer_options = self.options

    def _init_optimizer(self, options: FitOptions) -> BoxOptimizer:  # noqa: PLR6301
        return BoxOptimizer(
            multistarts=options.multistart_count,
            max_iterations=options.max_iterations,
            xatol=options.xatol,
            fatol=options.fatol,
            polish=options.polish,
        )

    def resolve_options(self, options: FitOptions | None) -> FitOptions:
        effective = options if options is not None else self.options
        if effective is not self._optimizer_options:
            self.optimizer = self._init_optimizer(effective)
            self._optimizer_options = effective

        return effective

    def run_stages(
        self,
        data: Dataset,
        make_objective: Callable[[WeightScheme], Objective],
        v_source: MomentSource,
        options: FitOptions,
    ) -> StageOutcome:
        """Stage 1 with the identity (two-stage) or the configured weight; stage 2 refits with V^-1.

        Stage 2 starts from the stage-1 solution in addition to the usual multistarts.
        """
        weight = WeightScheme.identity() if options.two_stage else options.weight
        logger.info("Stage 1 fit of %s (n=%d, weight=%s)", self.model.name, data.n, weight.variant)
        outcome = self.optimizer.minimize(make_objective(weight), self.space, seed=options.seed)
        n_evals = outcome.n_evals
        diagnostics: dict[str, Any] = {
            "stage1": {"gamma": outcome.x.tolist(), "objective_value": outcome.fun, "converged": outcome.converged},
        }

        if options.two_stage:
            v_hat = estimate_V(data, outcome.x, v_source)
            weight = WeightScheme.estimated(v_hat)
            diagnostics["v_hat"] = v_hat.tolist()
            diagnostics.update(weight.diagnostics)
            logger.info("Stage 2 fit of %s with the estimated optimal weight", self.model.name)
            outcome = self.optimizer.minimize(
                make_objective(weight),
                self.space,
                seed=options.seed,
                extra_starts=[outcome.x],
            )
            n_evals += outcome.n_evals

        diagnostics["starts"] = [s.to_dict() for s in outcome.starts]
        diagnostics["boundary_coordinates"] = np.flatnonzero(outcome.boundary_mask).tolist()
        diagnostics["derivative_sources"] = self.model.derivative_sources
        return StageOutcome(outcome=outcome, weight=weight, n_evals=n_evals, diagnostics=diagnostics)

    def build_result(self, stages: StageOutcome) -> EstimateResult:
        outcome = stages.outcome
        return EstimateResult(
            gamma_hat=ParamVector.from_array(outcome.x, self.model.p, self.model.q),
            objective_value=outcome.fun,
            converged=outcome.converged,
            boundary_hit=outcome.boundary_hit,
            n_evals=stages.n_evals,
            weight_used=stages.weight.summary(),
            param_names=self.model.param_names,
            diagnostics=stages.diagnostics,
        )

    def attach_inference(
        self,
        result: EstimateResult,
        parts: Callable[[], SandwichParts],
        options: FitOptions,
    ) -> EstimateResult:
        """Fills covariance and standard errors unless the estimate is on the boundary or B is ill-conditioned."""
        if not options.compute_inference:
            return result

        if result.boundary_hit:
            result.diagnostics["inference_error"] = "estimate lies on the parameter box boundary"
            return result

        try:
            covariance, std_errors = sandwich(parts())
        except InferenceUnavailableError as e:
            logger.warning("Inference unavailable for %s: %s", self.model.name, e)
            result.diagnostics["inference_error"] = str(e)
            condition = e.condition_number
            finite = condition is not None and bool(np.isfinite(condition))
            result.diagnostics["condition_number"] = condition if finite else None
            return result

        result.covariance = covariance
        result.std_errors = std_errors
        result.diagnostics["confidence_level"] = options.level
        result.diagnostics["confidence_intervals"] = wald_intervals(
            result.gamma_hat.to_array(),
            std_errors,
            options.level,
        ).tolist()
        return result
