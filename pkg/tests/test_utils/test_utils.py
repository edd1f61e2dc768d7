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

from berkson_engine.utils.errors import ConfigError
from berkson_engine.utils.utils import central_difference
from berkson_engine.utils.utils import derive_seed
from berkson_engine.utils.utils import get_effective_param
from berkson_engine.utils.utils import parse_float_list


def test_get_effective_param() -> None:
    assert get_effective_param(1, 2) == 2
    assert get_effective_param(1, None) == 1
    assert get_effective_param(None, None, required=False) is None
    with pytest.raises(ValueError, match="must be provided"):
        get_effective_param(None, None)


def test_central_difference_of_vector_function() -> None:
    x = np.array([0.5, -1.0])
    derivative = central_difference(lambda v: np.array([v[0] ** 2, v[0] * v[1], np.sin(v[1])]), x)

    expected = np.array([[1.0, 0.0], [-1.0, 0.5], [0.0, np.cos(-1.0)]])
    np.testing.assert_allclose(derivative, expected, atol=1e-8)


def test_derive_seed_is_stable() -> None:
    assert derive_seed(42, 0) == derive_seed(42, 0)
    assert derive_seed(42, 0) != derive_seed(42, 1)
    assert derive_seed(42, 0, "draws") != derive_seed(42, 0, "data")
    assert 0 <= derive_seed(7, 3) < 2**64


def test_parse_float_list() -> None:
    np.testing.assert_array_equal(parse_float_list("1, 2.5,-3,"), [1.0, 2.5, -3.0])
    np.testing.assert_array_equal(parse_float_list([[1, 2], [3, 4]]), [1.0, 2.0, 3.0, 4.0])
    with pytest.raises(ConfigError, match="comma-separated"):
        parse_float_list("1,two")
