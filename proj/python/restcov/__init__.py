# SPDX-License-Identifier: Apache-2.0
"""Black-box REST API test coverage."""

import json

from ._core import (
    RestcovError,
    Specification,
    coverage_from_dumps,
    coverage_from_store,
    parse_request,
    run_config,
)

__all__ = [
    "RestcovError",
    "Specification",
    "coverage_from_dumps",
    "coverage_from_store",
    "parse_request",
    "run_config",
    "stats_from_dumps",
]


def stats_from_dumps(specification, dumps_dir):
    """Coverage statistics for a dump directory as a dict."""
    return json.loads(coverage_from_dumps(str(specification), str(dumps_dir)))
