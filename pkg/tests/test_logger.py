import json

import pytest

from src import NumericError
from src.logger import TinLogger


def _records(path):
	return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def _caller(logger):
	logger.success("done", stacklevel=1, n=3)


@pytest.mark.parametrize("method, args, level, status", [
	("warning", ("careful",), "WARNING", "OK"),
	("data_error", ("bad row",), "ERROR", "DATA_ERROR"),
	("numeric_failure", ("loss is nan",), "ERROR", "NUMERIC_ERROR"),
])
def test_status_methods(tmp_path, method, args, level, status):
	logger = TinLogger("tests.logger.status", log_path=tmp_path / "log.jsonl")
	logger.enable(stream=False)
	getattr(logger, method)(*args, stacklevel=1, batch=2)
	logger.close()
	(record,) = _records(tmp_path / "log.jsonl")
	assert (record["level"], record["status"], record["msg"], record["batch"]) == (level, status, args[0], 2)


def test_func_names_the_caller(tmp_path):
	logger = TinLogger("tests.logger.caller", log_path=tmp_path / "log.jsonl")
	logger.enable(stream=False)
	_caller(logger)
	logger.close()
	(record,) = _records(tmp_path / "log.jsonl")
	assert record["func"] == "_caller"
	assert record["n"] == 3


def test_exception_takes_error_status(tmp_path):
	logger = TinLogger("tests.logger.exception", log_path=tmp_path / "log.jsonl")
	logger.enable(stream=False)
	logger.exception(NumericError("nan at epoch 1"), stacklevel=1)
	logger.exception(KeyError("x"), stacklevel=1)
	logger.close()
	numeric, other = _records(tmp_path / "log.jsonl")
	assert (numeric["status"], numeric["error_type"]) == ("NUMERIC_ERROR", "NumericError")
	assert (other["status"], other["error_type"]) == ("EXCEPTION", "KeyError")


def test_disable_drops_records(tmp_path):
	logger = TinLogger("tests.logger.disabled", log_path=tmp_path / "log.jsonl")
	logger.disable()
	logger.success("hidden", stacklevel=1)
	logger.enable(stream=False)
	logger.success("shown", stacklevel=1)
	logger.close()
	assert [record["msg"] for record in _records(tmp_path / "log.jsonl")] == ["shown"]
