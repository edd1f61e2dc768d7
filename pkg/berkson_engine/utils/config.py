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
"""Key-value configuration files for Berkson-Engine.

Every configuration file is a dotenv-style list of ``KEY=VALUE`` lines read with
``python-dotenv``; list values are comma separated. Keys are case-insensitive and validated
by pydantic models, then converted to the internal dataclasses.

Classes:
    ModelFileModel: MODEL, K, SIGMA_DELTA2_KNOWN, DENSITY.
    BoundsModel: LOWER, UPPER.
    GenConfigModel: Data-generation keys.
    StudyConfigModel: Data-generation keys plus the study keys.

Functions:
    read_key_values, load_model, load_bounds, load_gen_config, load_study_config.
"""

from pathlib import Path
from typing import Any
from typing import Literal

import numpy as np
from dotenv import dotenv_values
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field
from pydantic import ValidationError
from pydantic import field_validator

from berkson_engine.components.builtin_models import builtin
from berkson_engine.components.model_spec import ModelSpec
from berkson_engine.data_structures.param_space import ParamSpace
from berkson_engine.data_structures.param_vector import ParamVector
from berkson_engine.data_structures.study_config import GenConfig
from berkson_engine.data_structures.study_config import StudyConfig
from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.io import read_predictors
from berkson_engine.utils.utils import parse_float_list


class _KeyValueModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _float_list(value: Any) -> list[float] | None:  # noqa: ANN401
    if value is None:
        return None

    return parse_float_list(value).tolist()


class ModelFileModel(_KeyValueModel):
    """Model selection.

    Attributes:
        model (str): Built-in model name.
        k (int | None): Predictor dimension for example2 / linear / constant.
        sigma_delta2_known (float | None): Known Berkson error variance; estimated when missing.
        density (str): Berkson error family, ``normal`` or ``laplace``.

    """

    model: str = Field(default="example1", description="Built-in model name.")
    k: int | None = Field(default=None, ge=1, description="Predictor dimension.")
    sigma_delta2_known: float | None = Field(default=None, gt=0, description="Known Berkson error variance.")
    density: Literal["normal", "laplace"] = Field(default="normal", description="Berkson error family.")


class BoundsModel(_KeyValueModel):
    lower: list[float] = Field(..., description="Lower bounds of gamma.")
    upper: list[float] = Field(..., description="Upper bounds of gamma.")

    split_lists = field_validator("lower", "upper", mode="before")(_float_list)


class GenConfigModel(ModelFileModel):
    gamma0: list[float] = Field(..., description="True gamma = (theta, psi, sigma_eps2).")
    n: int = Field(..., ge=1, description="Sample size.")
    z_dist: Literal["uniform", "normal", "file"] = "uniform"
    z_low: float = -1.0
    z_high: float = 1.0
    z_mean: list[float] = Field(default_factory=lambda: [0.0], description="Mean of normal Z, 1 or k values.")
    z_sd: list[float] = Field(default_factory=lambda: [1.0], description="SD of normal Z, 1 or k values.")
    z_file: str | None = None
    eps_dist: Literal["normal", "t", "uniform"] = "normal"
    eps_df: float = Field(default=5.0, gt=4)
    seed: int = Field(default=0, ge=0)
    lower: list[float] | None = None
    upper: list[float] | None = None

    split_lists = field_validator("gamma0", "lower", "upper", "z_mean", "z_sd", mode="before")(_float_list)


class StudyConfigModel(GenConfigModel):
    estimator: Literal["mde", "mde2", "se"] = "mde"
    s: int = Field(default=100, ge=1)
    importance: Literal["student_t", "error_density"] = "student_t"
    importance_df: float = Field(default=5.0, gt=0)
    replications: int = Field(default=1, ge=1)
    workers: int = Field(default=1, ge=1)
    multistarts: int = Field(default=5, ge=1)
    max_iterations: int = Field(default=2000, ge=1)
    level: float = Field(default=0.95, gt=0, lt=1)


def read_key_values(path: str | Path) -> dict[str, Any]:
    """Reads a ``KEY=VALUE`` file into a dict with lower-case keys; blank values are dropped."""
    path = Path(path)
    if not path.is_file():
        message = f"Config file not found: {path}"
        raise ConfigError(message)

    values = dotenv_values(path)
    return {key.strip().lower(): value.strip() for key, value in values.items() if value is not None and value.strip()}


def _validate[T: BaseModel](model_cls: type[T], values: dict[str, Any], source: str) -> T:
    try:
        return model_cls.model_validate(values)
    except ValidationError as e:
        message = f"Invalid configuration in {source}: {e}"
        raise ConfigError(message) from e


def build_model(cfg: ModelFileModel) -> ModelSpec:
    return builtin(cfg.model, k=cfg.k, sigma_delta2=cfg.sigma_delta2_known, density=cfg.density)


def build_space(model: ModelSpec, lower: list[float] | None, upper: list[float] | None) -> ParamSpace:
    if lower is None and upper is None:
        return model.default_space()

    if lower is None or upper is None:
        message = "LOWER and UPPER must be given together"
        raise ConfigError(message)

    if len(lower) != model.dim or len(upper) != model.dim:
        message = f"Bounds need {model.dim} values for model {model.name!r}, got {len(lower)} and {len(upper)}"
        raise ConfigError(message)

    return ParamSpace(lower=np.array(lower), upper=np.array(upper), names=model.param_names)


def load_model(name_or_path: str, k: int | None = None) -> ModelSpec:
    """Builds a model from a built-in name or from a model file with MODEL / K / SIGMA_DELTA2_KNOWN / DENSITY."""
    path = Path(name_or_path)
    if path.is_file():
        cfg = _validate(ModelFileModel, read_key_values(path), str(path))
        if k is not None:
            cfg = cfg.model_copy(update={"k": k})

        return build_model(cfg)

    return builtin(name_or_path, k=k)


def load_bounds(path: str | Path, model: ModelSpec) -> ParamSpace:
    cfg = _validate(BoundsModel, read_key_values(path), str(path))
    return build_space(model, cfg.lower, cfg.upper)


def _to_gen_config(cfg: GenConfigModel, base_dir: Path, echo: dict[str, Any]) -> GenConfig:
    model = build_model(cfg)
    gamma0 = ParamVector.from_array(cfg.gamma0, model.p, model.q)
    z_values = None
    if cfg.z_dist == "file":
        if cfg.z_file is None:
            message = "Z_DIST=file requires Z_FILE"
            raise ConfigError(message)

        z_path = Path(cfg.z_file)
        z_values = read_predictors(z_path if z_path.is_absolute() else base_dir / z_path)

    return GenConfig(
        model=model,
        gamma0=gamma0,
        n=cfg.n,
        z_dist=cfg.z_dist,
        z_low=cfg.z_low,
        z_high=cfg.z_high,
        z_mean=tuple(cfg.z_mean),
        z_sd=tuple(cfg.z_sd),
        z_values=z_values,
        eps_dist=cfg.eps_dist,
        eps_df=cfg.eps_df,
        seed=cfg.seed,
        space=build_space(model, cfg.lower, cfg.upper),
        echo=echo,
    )


def load_gen_config(path: str | Path) -> GenConfig:
    path = Path(path)
    cfg = _validate(GenConfigModel, read_key_values(path), str(path))
    return _to_gen_config(cfg, path.parent, cfg.model_dump(mode="json"))


def load_study_config(path: str | Path) -> StudyConfig:
    path = Path(path)
    cfg = _validate(StudyConfigModel, read_key_values(path), str(path))
    echo = cfg.model_dump(mode="json")
    gen_fields = set(GenConfigModel.model_fields)
    gen = _to_gen_config(GenConfigModel.model_validate(cfg.model_dump(include=gen_fields)), path.parent, echo)
    return StudyConfig(
        gen=gen,
        estimator=cfg.estimator,
        S=cfg.s,
        importance=cfg.importance,
        importance_df=cfg.importance_df,
        replications=cfg.replications,
        workers=cfg.workers,
        multistarts=cfg.multistarts,
        max_iterations=cfg.max_iterations,
        level=cfg.level,
        echo=echo,
    )
