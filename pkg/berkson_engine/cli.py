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
"""Command-line interface of Berkson-Engine.

Subcommands:
    fit: Estimate gamma on a CSV dataset and write a JSON report.
    simulate: Generate a dataset from a key-value config file.
    study: Run a replication study and write report.json, summary.csv and replications.csv.
    moments: Print m1 and m2 by closed form, quadrature and simulation side by side.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 optimization failure,
5 inference unavailable (the fit report is still written).
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from dataclasses import replace

import pandas as pd

from berkson_engine import about
from berkson_engine.components.data_generator import generate_dataset
from berkson_engine.components.importance import build_draw_store
from berkson_engine.components.importance import default_importance
from berkson_engine.components.importance import importance_for
from berkson_engine.components.moment_sources import ClosedFormSource
from berkson_engine.components.moment_sources import QuadratureSource
from berkson_engine.components.simulated_moments import SimulatedMoments
from berkson_engine.pipelines.base_pipeline import FitOptions
from berkson_engine.pipelines.batch_pipeline import run_study
from berkson_engine.pipelines.single_pipeline import SinglePipeline
from berkson_engine.utils.config import load_bounds
from berkson_engine.utils.config import load_gen_config
from berkson_engine.utils.config import load_model
from berkson_engine.utils.config import load_study_config
from berkson_engine.utils.errors import BerksonEngineError
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.errors import InferenceUnavailableError
from berkson_engine.utils.errors import UnsupportedOperationError
from berkson_engine.utils.io import read_csv
from berkson_engine.utils.io import write_csv
from berkson_engine.utils.io import write_report
from berkson_engine.utils.io import write_study_outputs
from berkson_engine.utils.utils import parse_float_list

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="berkson-engine", description=about.__description__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {about.__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level.")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="Estimate gamma on a CSV dataset.")
    fit.add_argument("--data", required=True, help="CSV file with header y,z1,...,zk.")
    fit.add_argument("--model", required=True, help="Built-in model name or model file.")
    fit.add_argument("--k", type=int, default=None, help="Predictor dimension (example2, linear, constant).")
    fit.add_argument("--estimator", choices=["mde", "mde2", "se"], default="mde")
    fit.add_argument("--S", dest="S", type=int, default=100, help="Draws per store half (se only).")
    fit.add_argument("--importance", choices=["student_t", "error_density"], default="student_t")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--bounds", default=None, help="Key-value file with LOWER and UPPER.")
    fit.add_argument("--multistarts", type=int, default=5)
    fit.add_argument("--max-iterations", type=int, default=2000)
    fit.add_argument("--level", type=float, default=0.95)
    fit.add_argument("--out", required=True, help="JSON report path.")

    simulate = sub.add_parser("simulate", help="Generate a dataset.")
    simulate.add_argument("--config", required=True)
    simulate.add_argument("--out", required=True, help="CSV output path.")

    study = sub.add_parser("study", help="Run a replication study.")
    study.add_argument("--config", required=True)
    study.add_argument("--out", required=True, help="Output directory.")
    study.add_argument("--workers", type=int, default=None, help="Overrides WORKERS.")

    moments = sub.add_parser("moments", help="Compare m1 and m2 across moment methods.")
    moments.add_argument("--model", required=True)
    moments.add_argument("--k", type=int, default=None)
    moments.add_argument("--gamma", required=True, help="Comma-separated gamma = (theta, psi, sigma_eps2).")
    moments.add_argument("--z", required=True, help="Comma-separated predictor vector.")
    moments.add_argument("--S", dest="S", type=int, default=10_000)
    moments.add_argument("--seed", type=int, default=0)
    moments.add_argument("--order", type=int, default=20, help="Gauss-Hermite nodes per axis.")
    return parser


def command_fit(args: argparse.Namespace) -> int:
    model = load_model(args.model, args.k)
    space = load_bounds(args.bounds, model) if args.bounds else model.default_space()
    data = read_csv(args.data)
    options = FitOptions(
        two_stage=args.estimator == "mde2",
        multistart_count=args.multistarts,
        max_iterations=args.max_iterations,
        seed=args.seed,
        level=args.level,
    )
    pipeline = SinglePipeline(model, space, options)

    if args.estimator == "se":
        result = pipeline.fit_se(data, S=args.S, phi=importance_for(args.importance, model, space), seed=args.seed)
    else:
        result = pipeline.fit_mde(data)

    write_report(
        {
            "software": {"name": about.__title__, "version": about.__version__},
            "model": {"name": model.name, "k": model.k, "p": model.p, "q": model.q},
            "estimator": args.estimator,
            "data": {"path": str(args.data), "n": data.n, "k": data.k},
            "seed": args.seed,
            "bounds": {"lower": space.lower.tolist(), "upper": space.upper.tolist()},
            "result": result.to_dict(),
        },
        args.out,
    )
    logger.info("Wrote %s", args.out)

    if not result.has_inference:
        reason = result.diagnostics.get("inference_error", "covariance unavailable")
        logger.error("Inference unavailable: %s", reason)
        return InferenceUnavailableError.exit_code

    return 0


def command_simulate(args: argparse.Namespace) -> int:
    config = load_gen_config(args.config)
    data = generate_dataset(config)
    write_csv(data, args.out)
    logger.info("Wrote %d observations to %s", data.n, args.out)
    return 0


def command_study(args: argparse.Namespace) -> int:
    config = load_study_config(args.config)
    if args.workers is not None:
        if args.workers < 1:
            message = f"--workers must be >= 1, got {args.workers}"
            raise ConfigError(message)

        config = replace(config, workers=args.workers)

    report = run_study(config)
    path = write_study_outputs(report, args.out)
    logger.info("Wrote %s", path)
    return 0


def command_moments(args: argparse.Namespace) -> int:
    model = load_model(args.model, args.k)
    gamma = parse_float_list(args.gamma)
    z = parse_float_list(args.z).reshape(1, -1)
    model.split(gamma)
    if z.shape[1] != model.k:
        message = f"--z needs {model.k} values for model {model.name!r}, got {z.shape[1]}"
        raise ConfigError(message)

    rows = []
    for method, build in (("closed", ClosedFormSource), ("quadrature", lambda m: QuadratureSource(m, args.order))):
        try:
            m1, m2 = build(model).moments(z, gamma)
        except UnsupportedOperationError as e:
            logger.info("%s moments unavailable: %s", method, e)
            continue

        rows.append({"method": method, "m1": float(m1[0]), "m2": float(m2[0])})

    store = build_draw_store(1, args.S, model.k, default_importance(model), args.seed)
    simulated = SimulatedMoments(model, store)
    m1, m2 = simulated.moments(z, gamma, "pooled")
    rows.append({"method": f"simulated(S={args.S})", "m1": float(m1[0]), "m2": float(m2[0])})

    print(pd.DataFrame(rows).to_string(index=False, float_format=lambda v: f"{v:.10g}"))  # noqa: T201
    return 0


COMMANDS = {
    "fit": command_fit,
    "simulate": command_simulate,
    "study": command_study,
    "moments": command_moments,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=LOG_FORMAT,
        datefmt="%H:%M:%S",
    )

    try:
        return COMMANDS[args.command](args)
    except BerksonEngineError as e:
        logger.error("%s: %s", type(e).__name__, e)  # noqa: TRY400
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
