import pytest

from helpers import CORPUS
from smtquery.store import Store


@pytest.fixture
def store(tmp_path):
    s = Store(tmp_path / "data" / "smtquery.db")
    s.init_db(CORPUS)
    yield s
    s.close()
