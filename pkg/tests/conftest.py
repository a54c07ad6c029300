import pytest
from hypothesis import settings

from tests.corpus import AXES, QQ_X

settings.register_profile("tancat", max_examples=200, derandomize=True, deadline=None)
settings.load_profile("tancat")


@pytest.fixture
def qx():
    return QQ_X


@pytest.fixture
def axes():
    return AXES


@pytest.fixture
def write_script(tmp_path):
    """Writes script text to a file and returns its path as a string."""

    def write(text, name="script.tc"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write
