import logging

import pytest


@pytest.fixture(autouse=True)
def restore_root_logger():
    """
    CLI runs re-bind the root logger to the runner's streams; put the original handlers back.
    """
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)
