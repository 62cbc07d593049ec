import numpy as np
import pytest

from corpus import (KINDS, Lcg, default_corpus, encode, fibonacci_symbols, format_for, generate,
                    mixed_symbols, periodic_symbols)
from sst_user import minimal_period
from text_model import load_text


def test_lcg_is_deterministic():
    a, b = Lcg(42), Lcg(42)
    assert [a.next() for _ in range(5)] == [b.next() for _ in range(5)]
    assert Lcg(1).next() != Lcg(2).next()


@pytest.mark.parametrize('kind', KINDS)
def test_generate_ranges(kind):
    symbols = generate(kind, 300, 5, 9)
    assert len(symbols) == 300
    assert all(0 <= x < 5 for x in symbols)
    assert generate(kind, 300, 5, 9) == symbols


def test_generate_rejects():
    with pytest.raises(ValueError):
        generate('random', 0)
    with pytest.raises(ValueError):
        generate('zipf', 10)


def test_fibonacci_word():
    assert encode(fibonacci_symbols(13), 2) == b"abaababaabaab"
    assert fibonacci_symbols(1) == [0]


def test_periodic_root_is_short():
    for seed in range(20):
        assert minimal_period(periodic_symbols(200, 4, seed)) <= 16


def test_encode_formats():
    assert encode([0, 1, 25], 26) == b"abz"
    assert encode([0, 200], 256) == bytes([0, 200])
    raw = encode([0, 70000], 100000)
    assert np.frombuffer(raw, dtype='<u4').tolist() == [0, 70000]
    assert format_for(100000) == 'u32le'
    assert format_for(256) == 'bytes'
    assert load_text(raw, format_for(100000)).symbols == [0, 70000]


def test_default_corpus():
    instances = default_corpus(seed=1, lengths=(64, 256), taus=(4, 16, 64))
    assert instances
    for instance in instances:
        assert 4 <= instance.tau <= instance.text.n // 4
    names = {instance.name for instance in instances}
    assert 'unary-n256-t64' in names
    assert 'random-s256-n64-v0-t16' in names
    assert 'mixed-n256-v2-t64' in names
    assert 'fibonacci-n64-t64' not in names


def test_default_corpus_size():
    instances = default_corpus()
    assert len(instances) >= 500
    assert len({instance.name for instance in instances}) == len(instances)
    assert max(instance.text.n for instance in instances) == 2048
    assert {name.split('-')[0] for name in (i.name for i in instances)} == {
        'random', 'periodic', 'runs', 'mixed', 'fibonacci', 'unary'}
    assert any(instance.tau >= 64 for instance in instances)


def test_mixed_has_a_long_periodic_middle():
    for seed in range(10):
        symbols = mixed_symbols(600, 4, seed)
        assert len(symbols) == 600
        assert minimal_period(symbols[300:400]) <= 8
