import pytest

from micronorm.g2p import default_engine
from micronorm.oov_gate import load_labeled_corpus
from micronorm.pipeline import PipelineConfig
from micronorm.resources import GATE_CORPUS, data_path, default_lexicon


@pytest.fixture(scope="session")
def g2p():
    return default_engine()


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def index(lexicon):
    return lexicon.match_index


@pytest.fixture()
def cfg():
    return PipelineConfig()


@pytest.fixture(scope="session")
def gate_corpus():
    return load_labeled_corpus(data_path(GATE_CORPUS))
