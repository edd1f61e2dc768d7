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

"""Module Information for Berkson-Engine.

This module contains metadata about Berkson-Engine, an estimation engine for
nonlinear regression models whose predictors carry Berkson measurement errors.
It provides the title, description, version, author details, licensing, and
source code URL. The version string is embedded in every report the engine
writes.

Attributes:
    __title__ (str): The name of the engine.
    __description__ (str): A brief description of the engine's purpose.
    __version__ (str): The current version of the engine.
    __author__ (str): The author of the engine.
    __author_website__ (str): The author's website for more information.
    __license__ (str): The license under which the engine is distributed.
    __url__ (str): The URL to the project's repository (empty until published).

License:
    AGPLv3 (https://www.gnu.org/licenses/agpl-3.0.en.html)

"""

__title__ = "Berkson-Engine"
__description__ = "Minimum distance and simulation-based estimation for nonlinear Berkson measurement error models."
__version__ = "0.3.0"
__author__ = "Omid Jafari"
__author_website__ = "https://omidjafari.com"
__license__ = "AGPLv3"
__url__ = ""
