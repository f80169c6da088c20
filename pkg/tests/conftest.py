from src.registry import RunRegistry
from src.logger import TinLogger
from src.status import RunStatus
import pytest
from .utils import _sample_n_random_samples, _sample_n_random_records, _small_model
from pathlib import Path


FAKE_DATA = Path(__file__).parent / "fake_data"


def pytest_addoption(parser):
	parser.addoption("--runslow", action="store_true", default=False, help="run slow training-trend tests")


def pytest_configure(config):
	config.addinivalue_line("markers", "slow: training-trend runs, enabled with --runslow")


def pytest_collection_modifyitems(config, items):
	if config.getoption("--runslow"):
		return
	skip_slow = pytest.mark.skip(reason="needs --runslow")
	for item in items:
		if "slow" in item.keywords:
			item.add_marker(skip_slow)


@pytest.fixture
def quiet_logger():
	logger = TinLogger("tests.quiet")
	logger.disable()
	return logger


@pytest.fixture
def registry(quiet_logger):
	registry = RunRegistry(url="sqlite:///:memory:", logger=quiet_logger, test=True)
	status = registry.create_database()
	assert status == RunStatus.OK
	return registry


@pytest.fixture
def interactions_path():
	return FAKE_DATA / "interactions_50_users.tsv"


@pytest.fixture
def sample_n_random_samples():
	return _sample_n_random_samples


@pytest.fixture
def random_samples():
	return _sample_n_random_samples(40)


@pytest.fixture
def sample_n_random_records():
	return _sample_n_random_records


@pytest.fixture
def small_model():
	return _small_model
