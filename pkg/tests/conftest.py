import sys

import pytest
from loguru import logger


@pytest.fixture(autouse=True)
def reset_loguru_sinks():
    # main() binds a loguru sink to the sys.stderr of the moment, which under
    # capsys is a capture stream that gets closed when the test ends.
    yield
    logger.remove()
    logger.add(lambda message: sys.stderr.write(message))
