import itertools

import pytest

from bitops import INF, Chunk, decode_tuple, encode_tuple, field_width_for, lbit, vbit, window_vbit
from corpus import Lcg
from oracle import window_value
from text_model import Text


def test_lbit():
    assert lbit(0b1010, 0b0010) == 3
    assert lbit(1, 0) == 0
    assert lbit(Chunk(4, 3), 0) == 2
    with pytest.raises(ValueError):
        lbit(5, 5)


def test_vbit():
    assert vbit(0b1010, 0b0010) == 7
    assert vbit(0b0010, 0b1010) == 6
    assert vbit(INF, 3) == INF
    assert vbit(3, INF) == INF


def _reduces(values, u):
    reduced = [vbit(a, b) for a, b in zip(values, values[1:])]
    for x, y in zip(reduced, reduced[1:]):
        assert x != y
    for x in reduced:
        assert 0 <= x < 2 * u


@pytest.mark.parametrize('u', [1, 2, 3, 4])
def test_vbit_triples_exhaustive(u):
    for a, b, c in itertools.product(range(1 << u), repeat=3):
        if a != b and b != c:
            _reduces([a, b, c], u)


@pytest.mark.parametrize('u', [1, 2, 3])
def test_vbit_sequences_exhaustive(u):
    for m in range(2, 6):
        for values in itertools.product(range(1 << u), repeat=m):
            if all(x != y for x, y in zip(values, values[1:])):
                _reduces(values, u)


def test_vbit_random_sequences():
    rng = Lcg(11)
    for _ in range(10_000):
        u = 1 + rng.below(16)
        m = 2 + rng.below(8)
        values = [rng.below(1 << u)]
        while len(values) < m:
            x = rng.below(1 << u)
            if x != values[-1]:
                values.append(x)
        _reduces(values, u)


@pytest.mark.parametrize('symbols', [[0, 1, 2, 0, 1], [3, 3, 3, 1], [1, 0, 1, 0, 1, 1, 0], [2, 5, 2, 5, 4]])
def test_window_vbit_matches_packed_windows(symbols):
    text = Text(symbols)
    span = 2
    for p in range(text.n):
        for q in range(p + 1, text.n):
            ell = text.match_length(p, q, span + 1)
            if ell > span:
                continue
            packed = vbit(window_value(text, p, span), window_value(text, q, span))
            assert window_vbit(ell, text.read(p + ell), text.read(q + ell), text.code_width) == packed


def test_field_width_reserves_all_ones():
    assert field_width_for(6) == 3
    assert field_width_for(7) == 4
    assert field_width_for(0) == 1


def test_encode_decode():
    chunk = encode_tuple([1, INF, 0], 3)
    assert chunk.bits == 1 | (7 << 3)
    assert chunk.width == 9
    assert decode_tuple(chunk, 3) == [1, INF, 0]


def test_encode_rejects_oversized_values():
    with pytest.raises(ValueError):
        encode_tuple([7], 3)
    with pytest.raises(ValueError):
        encode_tuple([1], 0)


def test_chunk():
    assert str(Chunk(5, 4)) == '0101'
    with pytest.raises(ValueError):
        Chunk(16, 4)
    with pytest.raises(ValueError):
        Chunk(0, 0)
