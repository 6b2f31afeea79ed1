from pathlib import Path

import pytest

from newsrec.corpus import MindAdapter, to_unified_corpus
from newsrec.corpus.unify import PreprocessOptions

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def mind_fixture_dir() -> Path:
    return FIXTURES / "mind"


@pytest.fixture(scope="session")
def fixture_corpus(mind_fixture_dir):
    return to_unified_corpus("mind-fixture", mind_fixture_dir, MindAdapter(), PreprocessOptions())


@pytest.fixture(scope="session")
def config_fixture_root() -> Path:
    return FIXTURES / "configs"
