import os

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path_factory, monkeypatch):
    # never touch the user's real cache directory from the test suite
    monkeypatch.setenv("EISPROD_CACHE_DIR", str(tmp_path_factory.getbasetemp() / "cache"))
