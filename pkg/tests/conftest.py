import sys
from pathlib import Path

import pytest

# make oracles.py and support.py importable from the test modules
sys.path.insert(0, str(Path(__file__).parent))

from support import FIXTURES


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES
