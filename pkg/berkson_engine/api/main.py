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
"""Main entry point for the Berkson-Engine API.

Creates the FastAPI application, configures CORS for GET and POST from any origin,
mounts the moment and fit routes and serves a health check at ``/``.
"""

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from berkson_engine import about
from berkson_engine.api.routes import router

app = FastAPI(title="Berkson-Engine API", version=about.__version__)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=False,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

app.include_router(router)


@app.get("/", tags=["Health Check"])
def health_check() -> dict:
    """Reports that the API is running, with the package version."""
    return {"status": "API is running", "version": about.__version__}
