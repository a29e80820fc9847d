import os

import pytest

REPO_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CACHE_DIR = os.path.join(REPO_ROOT, "cache")


@pytest.fixture(scope="session")
def table():
    """The default coefficient table (cache hit in a checked-out repo;
    derived from scratch otherwise, a one-time batch)."""
    from matchdiff.derive import build_default_table

    return build_default_table(root=CACHE_DIR)


@pytest.fixture(scope="session")
def repo_cache_dir():
    return CACHE_DIR
