import pytest
from loguru import logger


@pytest.fixture(autouse=True)
def quiet_logger():
    yield
    # the CLI callback attaches a sink to the runner's stderr, which closes after each invoke
    logger.remove()
    logger.disable("src")
