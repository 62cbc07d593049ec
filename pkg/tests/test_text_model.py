import numpy as np
import pytest

import config
from errors import ParameterError, TextFormatError
from text_model import (SENTINEL, Text, ceil_log2, load_text, make_params, params_for_text,
                        params_from_b, phase_count_for, reference_lambda3)


def test_load_bytes():
    text = load_text(b"abab")
    assert text.symbols == [97, 98, 97, 98]
    assert text.n == 4
    assert text.sigma_bound == 99


def test_load_u32le():
    raw = np.asarray([1, 70000, 3], dtype='<u4').tobytes()
    text = load_text(raw, 'u32le')
    assert text.symbols == [1, 70000, 3]
    assert text.w == 17


@pytest.mark.parametrize('raw,fmt', [(b"", 'bytes'), (b"abcde", 'u32le'), (b"ab", 'utf8')])
def test_load_rejects(raw, fmt):
    with pytest.raises(TextFormatError):
        load_text(raw, fmt)


def test_load_rejects_large_alphabet(monkeypatch):
    monkeypatch.setattr(config, 'ALPHABET_EXPONENT', 3)
    raw = np.asarray([1 << 24, 0], dtype='<u4').tobytes()
    with pytest.raises(TextFormatError):
        load_text(raw, 'u32le')


def test_reads_past_end_are_sentinel():
    text = Text([2, 0, 1])
    assert text.read(3) == SENTINEL
    assert text.substring(1, 4) == (0, 1, SENTINEL, SENTINEL)
    assert text.substring(0, 2) == (2, 0)


def test_match_length():
    text = Text([0, 1, 0, 1])
    assert text.match_length(0, 2) == 2
    assert text.match_length(0, 2, cap=1) == 1
    assert text.match_length(1, 1) == 3
    assert text.match_length(0, 1) == 0


def test_window_keeps_alphabet():
    text = Text([0, 1, 2, 3], sigma_bound=8)
    part = text.window(1, 3)
    assert part.symbols == [1, 2]
    assert part.sigma_bound == 8


@pytest.mark.parametrize('x,expected', [(0, 0), (1, 0), (2, 1), (3, 2), (4, 2), (5, 3), (1024, 10)])
def test_ceil_log2(x, expected):
    assert ceil_log2(x) == expected


def test_reference_lambda3():
    assert reference_lambda3(1024, 8) == 3


@pytest.mark.parametrize('tau,lambda3,expected', [(16, 2, 0), (32, 2, 0), (64, 2, 1), (256, 2, 3), (96, 3, 1)])
def test_phase_count(tau, lambda3, expected):
    assert phase_count_for(tau, lambda3) == expected


@pytest.mark.parametrize('tau', [3, 0, 513])
def test_tau_range(tau):
    with pytest.raises(ParameterError):
        make_params(1024, tau)


def test_reference_mode_rejects_overrides():
    with pytest.raises(ParameterError):
        make_params(1024, 64, 'reference', lambda3=4)
    with pytest.raises(ParameterError):
        make_params(1024, 64, 'reference', shrink_slack=2)


def test_desk_mode_validates_overrides():
    with pytest.raises(ParameterError):
        make_params(1024, 64, 'desk', lambda3=1)
    with pytest.raises(ParameterError):
        make_params(1024, 64, 'desk', lambda4=0)


def test_unknown_mode():
    with pytest.raises(ParameterError):
        make_params(1024, 64, 'fast')


def test_params_from_b():
    params = params_from_b(1024, 16)
    assert params.tau == 64
    assert params.b == 16
    with pytest.raises(ParameterError):
        params_from_b(1024, 0)


def test_distance_exponents():
    desk = make_params(1024, 64, 'desk', lambda4=10)
    assert list(desk.distance_exponents) == [10, 9, 8, 7, 6]
    assert desk.m_width == 11
    low = make_params(1024, 64, 'desk', lambda4=3)
    assert list(low.distance_exponents) == [6]
    reference = make_params(1024, 64, 'reference')
    assert reference.lambda4 < 6
    assert list(reference.distance_exponents) == []
    assert reference.m_width == 7


def test_params_for_text_uses_symbol_width():
    text = Text([0, 1] * 512)
    params = params_for_text(text, 64)
    assert params.lambda3 == reference_lambda3(1024, 1)
    assert params.as_dict()['tau'] == 64
    assert list(params.as_dict()) == ['n', 'tau', 'b', 'mode', 'lambda3', 'lambda4',
                                      'phase_count', 'shrink_slack']
