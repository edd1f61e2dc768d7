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

import hashlib
from collections.abc import Callable
from typing import Any

import numpy as np

from berkson_engine.utils.errors import ConfigError

FD_RELATIVE_STEP = 1e-6


def get_effective_param(
    instance_value: Any,  # noqa: ANN401
    provided_value: Any,  # noqa: ANN401
    *,
    required: bool = True,
) -> Any:  # noqa: ANN401
    if provided_value is not None:
        return provided_value

    if instance_value is not None:
        return instance_value

    if required:
        message = "A value must be provided."
        raise ValueError(message)

    return None


def fd_steps(x: np.ndarray, relative_step: float = FD_RELATIVE_STEP) -> np.ndarray:
    return relative_step * (1.0 + np.abs(x))


def central_difference(
    func: Callable[[np.ndarray], np.ndarray | float],
    x: np.ndarray,
    relative_step: float = FD_RELATIVE_STEP,
) -> np.ndarray:
    """Central finite-difference derivative of ``func`` with respect to the last axis of ``x``.

    ``x`` holds the differentiation variable in its last axis (length ``d``). ``func`` may return
    a scalar or an array of any shape; the derivative is returned with a trailing axis of length
    ``d`` appended to that shape. The step for coordinate ``j`` is ``relative_step * (1 + |x_j|)``.

    Args:
        func (Callable): Function of a single 1-D parameter vector.
        x (np.ndarray): Point of differentiation, shape (d,).
        relative_step (float): Relative step size (default 1e-6).

    Returns:
        np.ndarray: Array of shape ``func(x).shape + (d,)``.

    """
    x = np.asarray(x, dtype=float)
    steps = fd_steps(x, relative_step)
    columns = []

    for j in range(x.shape[-1]):
        forward = x.copy()
        backward = x.copy()
        forward[j] += steps[j]
        backward[j] -= steps[j]
        diff = (np.asarray(func(forward), dtype=float) - np.asarray(func(backward), dtype=float)) / (2.0 * steps[j])
        columns.append(diff)

    return np.stack(columns, axis=-1)


def derive_seed(master: int, *keys: int | str) -> int:
    """Derives an independent 64-bit seed from a master seed and a sequence of keys.

    The rule is part of the engine's external contract: the SHA-256 digest of the master seed and
    keys joined by ``":"`` is truncated to its first 8 bytes and read as a big-endian unsigned integer.
    It does not depend on the order in which replications are run.

    Args:
        master (int): Master seed.
        *keys (int | str): Replication index, stream label, etc.

    Returns:
        int: Derived seed in ``[0, 2**64)``.

    """
    payload = ":".join(str(part) for part in (master, *keys)).encode("utf8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def parse_float_list(raw: str | list[float] | tuple[float, ...] | np.ndarray) -> np.ndarray:
    if isinstance(raw, str):
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        try:
            return np.array([float(p) for p in parts], dtype=float)
        except ValueError as e:
            message = f"Expected a comma-separated list of numbers, got {raw!r}"
            raise ConfigError(message) from e

    return np.asarray(raw, dtype=float).ravel()
