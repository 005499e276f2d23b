# SPDX-License-Identifier: Apache-2.0
import json
import os
import pathlib

import pytest

import restcov

FIXTURES = pathlib.Path(os.environ.get("RESTCOV_FIXTURE_DIR", pathlib.Path(__file__).parents[1] / "fixtures"))
PETSTORE = FIXTURES / "petstore"


def test_specification_shape():
    spec = restcov.Specification.load(str(PETSTORE / "petstore.json"))
    assert spec.title == "Swagger Petstore"
    assert spec.server_prefixes == ["/v2"]
    assert len(spec.operations()) == 7
    assert ("/pet/{petId}", "DELETE") in spec.operations()


def test_match_and_classify():
    spec = restcov.Specification.load(str(PETSTORE / "petstore.json"))
    assert spec.match("/v2/pet/findByStatus") == ("/pet/findByStatus", {})
    assert spec.match("/v2/pet/a%20b") == ("/pet/{petId}", {"petId": "a b"})
    assert spec.match("/v2/store") is None
    result = spec.classify("PATCH /v2/pet HTTP/1.1\r\nHost: h\r\n\r\n")
    assert result["template"] == "/pet"
    assert result["method"] == "PATCH"
    assert result["method_supported"] is False


def test_parse_request_keeps_bytes():
    request = restcov.parse_request(b"POST /v2/pet?a=1&a=2 HTTP/1.1\r\nX: y\r\n\r\n\x00\xff")
    assert request["method"] == "POST"
    assert request["query"] == {"a": ["1", "2"]}
    assert request["headers"] == [("X", "y")]
    assert request["body"] == b"\x00\xff"


def test_fixture_statistics():
    stats = restcov.stats_from_dumps(PETSTORE / "petstore.json", PETSTORE / "dumps")
    assert stats["operationCoverage"]["raw"] == {"documented": 7, "documentedAndTested": 2, "totalTested": 3}
    assert stats["operationCoverage"]["rate"] == 2 / 7
    assert stats["TCL"] == 0
    expected = json.loads((PETSTORE / "expected" / "stats.json").read_text())
    assert stats == expected


def test_errors_carry_exit_codes(tmp_path):
    with pytest.raises(restcov.RestcovError) as info:
        restcov.Specification.load(str(tmp_path / "absent.json"))
    assert info.value.exit_code == 2
    with pytest.raises(restcov.RestcovError) as info:
        restcov.coverage_from_dumps(str(PETSTORE / "petstore.json"), str(tmp_path / "none"))
    assert info.value.exit_code == 3


def test_run_config(tmp_path):
    config = {
        "modules": "all",
        "specification": str(PETSTORE / "petstore.json"),
        "dumpsDir": str(PETSTORE / "dumps"),
        "reportsDir": str(tmp_path / "reports"),
        "dbPath": str(tmp_path / "db.sqlite"),
    }
    (tmp_path / "config.json").write_text(json.dumps(config))
    code, out, err = restcov.run_config(str(tmp_path / "config.json"))
    assert code == 0, err
    assert "TCL: 0" in out
    assert (tmp_path / "reports" / "stats.json").exists()
    stored = json.loads(restcov.coverage_from_store(str(PETSTORE / "petstore.json"), str(tmp_path / "db.sqlite")))
    assert stored == json.loads((tmp_path / "reports" / "stats.json").read_text())
    code, _, err = restcov.run_config(str(tmp_path / "missing.json"))
    assert code == 1
    assert err.startswith("error:")
