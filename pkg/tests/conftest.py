import pytest

import config
from corpus import generate
from text_model import Text


@pytest.fixture(autouse=True)
def runlog_db(tmp_path, monkeypatch):
    """Every test writes its run log into a temporary database."""
    path = tmp_path / 'runs.db'
    monkeypatch.setattr(config, 'RUNLOG_DB_PATH', str(path))
    monkeypatch.setattr(config, 'RUNLOG_ENABLED', True)
    return path


def text_of(s):
    return Text([ord(c) for c in s])


def corpus_text(kind, n, sigma=4, seed=7):
    return Text(generate(kind, n, sigma, seed))


@pytest.fixture
def small_texts():
    """(name, Text) pairs covering random, periodic, fibonacci, runs and unary inputs."""
    return [
        ('random2', corpus_text('random', 256, 2)),
        ('random4', corpus_text('random', 256, 4)),
        ('periodic', corpus_text('periodic', 256)),
        ('fibonacci', corpus_text('fibonacci', 256)),
        ('runs', corpus_text('runs', 256)),
        ('unary', Text([0] * 128)),
    ]
