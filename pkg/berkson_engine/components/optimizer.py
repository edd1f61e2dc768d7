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
"""Box-constrained multistart minimization for Berkson-Engine.

Each start runs a bounded Nelder-Mead simplex (points are clipped into the box, so the
objective is never evaluated outside it) and, when the objective exposes an analytic
gradient, an L-BFGS-B polish from the simplex solution. The best start wins; ties are broken
by the lexicographically smallest parameter vector.

Classes:
    StartOutcome: Result of one start.
    OptimizationOutcome: Best point across starts with diagnostics.
    BoxOptimizer: Multistart driver.
"""

import logging
from collections.abc import Callable
from collections.abc import Sequence
from dataclasses import dataclass
from dataclasses import field
from typing import Any
from typing import Protocol

import numpy as np
from scipy.optimize import Bounds
from scipy.optimize import minimize

from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.utils.errors import DomainError
from berkson_engine.utils.errors import EvaluationError
from berkson_engine.utils.errors import OptimizationError
from berkson_engine.utils.utils import get_effective_param

logger = logging.getLogger(__name__)


class Objective(Protocol):
    def __call__(self, gamma: np.ndarray) -> float: ...


@dataclass(slots=True)
class StartOutcome:
    start: np.ndarray
    x: np.ndarray | None = None
    fun: float = np.inf
    converged: bool = False
    polished: bool = False
    error: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "start": self.start.tolist(),
            "x": None if self.x is None else self.x.tolist(),
            "fun": self.fun if np.isfinite(self.fun) else None,
            "converged": self.converged,
            "polished": self.polished,
            "error": self.error,
        }


@dataclass(slots=True)
class OptimizationOutcome:
    x: np.ndarray
    fun: float
    converged: bool
    boundary_hit: bool
    boundary_mask: np.ndarray
    n_evals: int
    starts: list[StartOutcome] = field(default_factory=list)


class BoxOptimizer:
    """Multistart Nelder-Mead with optional quasi-Newton polish inside a ParamSpace.

    Attributes:
        multistarts (int): Number of generated starts: the box center plus seeded uniform draws.
        max_iterations (int): Iteration cap per start and per stage (default 2000).
        xatol (float): Simplex size tolerance on parameters (default 1e-8).
        fatol (float): Relative simplex tolerance on the objective, scaled by 1 + |Q(start)|.
        polish (bool): Whether to run L-BFGS-B with the analytic gradient after the simplex.

    """

    def __init__(
        self,
        multistarts: int = 5,
        max_iterations: int = 2000,
        xatol: float = 1e-8,
        fatol: float = 1e-10,
        *,
        polish: bool = True,
    ) -> None:
        if multistarts < 1 or max_iterations < 1 or xatol <= 0 or fatol <= 0:
            message = (
                "Optimizer needs multistarts >= 1, max_iterations >= 1 and positive tolerances, got "
                f"multistarts={multistarts}, max_iterations={max_iterations}, xatol={xatol}, fatol={fatol}"
            )
            raise OptimizationError(message)

        self.multistarts = multistarts
        self.max_iterations = max_iterations
        self.xatol = xatol
        self.fatol = fatol
        self.polish = polish

    def starts(  # noqa: PLR6301
        self,
        space: ParamSpace,
        seed: int | None,
        count: int,
        extra_starts: Sequence[np.ndarray] = (),
    ) -> list[np.ndarray]:
        rng = np.random.default_rng(seed)
        points = [space.project(s) for s in extra_starts]
        points.append(space.center())
        points.extend(space.uniform_starts(count - 1, rng))
        return points

    def minimize(
        self,
        objective: Objective,
        space: ParamSpace,
        seed: int | None = None,
        extra_starts: Sequence[np.ndarray] = (),
        multistarts: int | None = None,
        max_iterations: int | None = None,
        gradient: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> OptimizationOutcome:
        """Minimizes ``objective`` over ``space``.

        Args:
            objective (Objective): Function of gamma.
            space (ParamSpace): Compact box.
            seed (int | None): Seed of the uniform starts.
            extra_starts (Sequence[np.ndarray]): Starts tried before the generated ones.
            multistarts (int | None): Overrides the number of generated starts.
            max_iterations (int | None): Overrides the iteration cap.
            gradient (Callable | None): Analytic gradient used by the polish; defaults to ``objective.gradient``.

        Returns:
            OptimizationOutcome: The best start.

        Raises:
            OptimizationError: If the objective cannot be evaluated at any start.

        """
        effective_multistarts = get_effective_param(self.multistarts, multistarts)
        effective_max_iterations = get_effective_param(self.max_iterations, max_iterations)
        effective_gradient = gradient if gradient is not None else getattr(objective, "gradient", None)
        bounds = Bounds(space.lower, space.upper)
        evals = [0]

        def safe(x: np.ndarray) -> float:
            evals[0] += 1
            try:
                value = float(objective(space.project(x)))
            except (EvaluationError, DomainError, FloatingPointError, np.linalg.LinAlgError):
                return np.inf

            return value if np.isfinite(value) else np.inf

        outcomes = []
        for start in self.starts(space, seed, effective_multistarts, extra_starts):
            outcome = self._run_start(safe, effective_gradient, start, space, bounds, effective_max_iterations)
            logger.debug("Start %s -> Q=%.10g (converged=%s)", start.tolist(), outcome.fun, outcome.converged)
            outcomes.append(outcome)

        finished = [o for o in outcomes if o.x is not None]
        if not finished:
            message = f"Objective could not be evaluated at any of {len(outcomes)} starts"
            raise OptimizationError(message)

        best = min(finished, key=lambda o: (o.fun, tuple(o.x.tolist())))  # type: ignore[union-attr]
        x = space.project(best.x)
        mask = space.on_boundary(x)
        if np.any(mask):
            logger.warning("Estimate lies on the box boundary at coordinates %s", np.flatnonzero(mask).tolist())

        return OptimizationOutcome(
            x=x,
            fun=best.fun,
            converged=best.converged,
            boundary_hit=bool(np.any(mask)),
            boundary_mask=mask,
            n_evals=evals[0],
            starts=outcomes,
        )

    def _run_start(
        self,
        safe: Callable[[np.ndarray], float],
        gradient: Callable[[np.ndarray], np.ndarray] | None,
        start: np.ndarray,
        space: ParamSpace,
        bounds: Bounds,
        max_iterations: int,
    ) -> StartOutcome:
        initial = safe(start)
        if not np.isfinite(initial):
            return StartOutcome(start=start, error="objective not finite at start")

        simplex = minimize(
            safe,
            start,
            method="Nelder-Mead",
            bounds=bounds,
            options={
                "xatol": self.xatol,
                "fatol": self.fatol * (1.0 + abs(initial)),
                "maxiter": max_iterations,
                "maxfev": 4 * max_iterations,
            },
        )
        outcome = StartOutcome(
            start=start,
            x=space.project(simplex.x),
            fun=float(simplex.fun),
            converged=bool(simplex.success),
        )

        if self.polish and gradient is not None:
            try:
                polished = minimize(
                    safe,
                    outcome.x,
                    jac=lambda x: gradient(space.project(x)),
                    method="L-BFGS-B",
                    bounds=bounds,
                    options={"maxiter": max_iterations},
                )
            except (EvaluationError, DomainError, FloatingPointError, np.linalg.LinAlgError) as e:
                logger.debug("Polish from %s failed: %s", outcome.x.tolist(), e)
                return outcome

            if np.isfinite(polished.fun) and polished.fun < outcome.fun:
                outcome.x = space.project(polished.x)
                outcome.fun = float(polished.fun)
                outcome.converged = outcome.converged or bool(polished.success)
                outcome.polished = True

        return outcome
