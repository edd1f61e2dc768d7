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
"""CSV and JSON input/output for Berkson-Engine.

Datasets are UTF-8, comma-separated CSV files with the header ``y,z1,...,zk`` and ``.`` as the
decimal point. Reports are JSON written with sorted keys so identical inputs give identical bytes.

Functions:
    read_csv: Parses a dataset, reporting the line of the first malformed row.
    write_csv: Writes a dataset.
    read_predictors: Reads the z columns of a CSV file.
    write_report: Writes a JSON report.
    write_study_outputs: Writes report.json, summary.csv and replications.csv of a study.
"""

import json
import re
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from berkson_engine.data_structures.dataset import Dataset
from berkson_engine.data_structures.study_report import StudyReport
from berkson_engine.utils.errors import DataError

Z_COLUMN = re.compile(r"^z(\d+)$")


def _read_frame(path: str | Path) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        message = f"Data file not found: {path}"
        raise DataError(message)

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True, encoding="utf-8")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        message = f"Could not parse {path}: {e}"
        raise DataError(message) from e

    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def _z_columns(frame: pd.DataFrame, path: str | Path) -> list[str]:
    numbered = sorted((int(m.group(1)), c) for c in frame.columns if (m := Z_COLUMN.match(c)))
    columns = [c for _, c in numbered]
    if not columns or [i for i, _ in numbered] != list(range(1, len(columns) + 1)):
        message = f"{path}: expected predictor columns z1,...,zk, got header {list(frame.columns)}"
        raise DataError(message)

    return columns


def _numeric(frame: pd.DataFrame, columns: list[str], path: str | Path) -> np.ndarray:
    """Converts ``columns`` to floats; line numbers count the header as line 1."""
    values = np.empty((len(frame), len(columns)))
    for j, column in enumerate(columns):
        raw = frame[column].astype(str).str.strip()
        values[:, j] = pd.to_numeric(raw.where(raw != "", None), errors="coerce").to_numpy(dtype=float)

    bad = ~np.all(np.isfinite(values), axis=1)
    if np.any(bad):
        row = int(np.flatnonzero(bad)[0])
        cells = ",".join(str(frame[c].iloc[row]) for c in columns)
        message = f"{path}: line {row + 2} has a missing, non-numeric or non-finite value: {cells!r}"
        raise DataError(message)

    return values


def read_csv(path: str | Path) -> Dataset:
    frame = _read_frame(path)
    if "y" not in frame.columns:
        message = f"{path}: missing response column 'y' in header {list(frame.columns)}"
        raise DataError(message)

    columns = ["y", *_z_columns(frame, path)]
    values = _numeric(frame, columns, path)
    return Dataset(y=values[:, 0], z=values[:, 1:])


def read_predictors(path: str | Path) -> np.ndarray:
    frame = _read_frame(path)
    return _numeric(frame, _z_columns(frame, path), path)


def write_csv(data: Dataset, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(data.z, columns=[f"z{j + 1}" for j in range(data.k)])
    frame.insert(0, "y", data.y)
    frame.to_csv(path, index=False, encoding="utf-8")


def _json_default(value: Any) -> Any:  # noqa: ANN401
    if isinstance(value, np.ndarray):
        return value.tolist()

    if isinstance(value, np.generic):
        return value.item()

    message = f"Object of type {type(value).__name__} is not JSON serializable"
    raise TypeError(message)


def dumps_report(report: dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_json_default) + "\n"


def write_report(report: dict[str, Any], path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_report(report), encoding="utf-8")


def write_study_outputs(report: StudyReport, out_dir: str | Path) -> Path:
    """Writes ``report.json``, ``summary.csv`` and ``replications.csv`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    content = report.to_dict()
    write_report(content, out_dir / "report.json")

    pd.DataFrame(content["summary"]).to_csv(out_dir / "summary.csv", index=False)
    rows = []
    for record in content["replications"]:
        row = {k: v for k, v in record.items() if k not in {"estimate", "std_errors"}}
        for j, value in enumerate(record["estimate"] or []):
            row[f"estimate{j + 1}"] = value

        for j, value in enumerate(record["std_errors"] or []):
            row[f"se{j + 1}"] = value

        rows.append(row)

    pd.DataFrame(rows).to_csv(out_dir / "replications.csv", index=False)
    return out_dir / "report.json"
