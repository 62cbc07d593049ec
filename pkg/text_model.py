"""
TauSet - Text and parameter model
The readonly input text and the size parameters shared by every stage.
"""

import logging
from dataclasses import dataclass

import numpy as np

import config
from errors import ParameterError, TextFormatError

logger = logging.getLogger(__name__)

SENTINEL = -1
FORMATS = ('bytes', 'u32le')
MODES = ('reference', 'desk')


def ceil_log2(x):
    """Smallest u with x <= 2^u (0 for x <= 1)."""
    return max(0, (x - 1).bit_length())


class Text:
    """
    Readonly symbol sequence.

    Reads past the end return SENTINEL, which is smaller than every real
    symbol. `w` is the bit width of one symbol and `code_width` the width of
    a shifted code (symbol + 1, sentinel -> 0) used by window encodings.
    """

    __slots__ = ('symbols', 'n', 'sigma_bound', 'w', 'code_width', '_array')

    def __init__(self, symbols, sigma_bound=None):
        self.symbols = [int(x) for x in symbols]
        self.n = len(self.symbols)
        top = max(self.symbols) + 1 if self.symbols else 1
        if sigma_bound is None:
            sigma_bound = top
        if sigma_bound < top:
            raise TextFormatError(f"symbol {top - 1} exceeds alphabet bound {sigma_bound}")
        if self.symbols and min(self.symbols) < 0:
            raise TextFormatError("symbols must be non-negative")
        self.sigma_bound = sigma_bound
        self.w = max(1, ceil_log2(sigma_bound))
        self.code_width = sigma_bound.bit_length()
        self._array = None

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Text(n={self.n}, sigma_bound={self.sigma_bound}, w={self.w})"

    @property
    def array(self):
        if self._array is None:
            self._array = np.asarray(self.symbols, dtype=np.int64)
        return self._array

    def read(self, i):
        return self.symbols[i] if i < self.n else SENTINEL

    def substring(self, start, length):
        """Symbols start..start+length-1, sentinel padded."""
        end = start + length
        if end <= self.n:
            return tuple(self.symbols[start:end])
        head = self.symbols[start:self.n] if start < self.n else []
        return tuple(head) + (SENTINEL,) * (length - len(head))

    def match_length(self, x, y, cap=None):
        """Length of the common prefix of the suffixes at x and y, at most cap."""
        if x == y:
            full = self.n - x
            return full if cap is None else min(cap, full)
        limit = self.n - max(x, y)
        if cap is not None:
            limit = min(limit, cap)
        s = self.symbols
        ell = 0
        while ell < limit and s[x + ell] == s[y + ell]:
            ell += 1
        return ell

    def window(self, start, end):
        """Sub-text [start, end) over the same alphabet bound."""
        return Text(self.symbols[start:end], self.sigma_bound)


def load_text(raw, format='bytes'):
    """
    Decode raw input into a Text.

    Args:
        raw: Input bytes
        format: 'bytes' (one symbol per byte) or 'u32le' (little-endian u32)

    Returns:
        Text with sigma_bound = max symbol + 1
    """
    if format not in FORMATS:
        raise TextFormatError(f"unknown format '{format}'")
    if len(raw) == 0:
        raise TextFormatError("input is empty")
    if format == 'u32le':
        if len(raw) % 4 != 0:
            raise TextFormatError(f"u32le input length {len(raw)} is not a multiple of 4")
        symbols = np.frombuffer(raw, dtype='<u4')
    else:
        symbols = np.frombuffer(raw, dtype=np.uint8)

    text = Text(symbols.tolist())
    limit = max(text.n, 256) ** config.ALPHABET_EXPONENT
    if text.sigma_bound > limit:
        raise TextFormatError(
            f"alphabet bound {text.sigma_bound} is not polynomial in n={text.n}")
    logger.debug("loaded %s text: n=%d sigma_bound=%d w=%d",
                 format, text.n, text.sigma_bound, text.w)
    return text


@dataclass(frozen=True)
class ParamEnv:
    n: int
    tau: int
    b: int
    lambda3: int
    lambda4: int
    mode: str
    phase_count: int
    shrink_slack: int = config.SHRINK_SLACK

    @property
    def distance_exponents(self):
        """Recompression exponents j, largest first."""
        top = self.lambda4
        if self.mode == 'desk':
            top = max(top, config.LOWEST_DISTANCE_EXPONENT)
        return range(top, config.LOWEST_DISTANCE_EXPONENT - 1, -1)

    @property
    def m_width(self):
        """Number of M columns per letter."""
        return max(self.lambda4, config.LOWEST_DISTANCE_EXPONENT, config.NEIGHBOUR_COLUMN) + 1

    def as_dict(self):
        return {
            'n': self.n,
            'tau': self.tau,
            'b': self.b,
            'mode': self.mode,
            'lambda3': self.lambda3,
            'lambda4': self.lambda4,
            'phase_count': self.phase_count,
            'shrink_slack': self.shrink_slack,
        }


def reference_lambda3(n, w):
    """
    Smallest L >= 2 such that three vbit rounds applied to values below
    2*n*w are guaranteed to land below 2L + 3.
    """
    bound = 2 * n * w
    for _ in range(3):
        bound = 2 * ceil_log2(bound)
    return max(2, -(-(bound - 3) // 2))


def phase_count_for(tau, lambda3):
    q = tau // (16 * lambda3)
    return q.bit_length() - 1 if q >= 1 else 0


def make_params(n, tau, mode=config.DEFAULT_MODE,
                lambda3=None, lambda4=None,
                symbol_bits=None,
                shrink_slack=None):
    """
    Resolve the size parameters for a text of length n.

    Args:
        n: Text length
        tau: Partitioning parameter, 4 <= tau <= n/2
        mode: 'reference' (computed lambdas, no overrides) or 'desk'
        lambda3: Desk-mode override of the vbit value-range stand-in
        lambda4: Desk-mode override of the top recompression exponent
        symbol_bits: Bits per symbol; defaults to the polynomial-alphabet bound
        shrink_slack: Desk-mode override of config.SHRINK_SLACK

    Returns:
        ParamEnv
    """
    if mode not in MODES:
        raise ParameterError(f"unknown mode '{mode}'")
    if tau < 4 or tau > n // 2:
        raise ParameterError(f"tau={tau} outside [4..{n // 2}] for n={n}")
    if symbol_bits is None:
        symbol_bits = config.ALPHABET_EXPONENT * max(1, max(n, 256).bit_length())

    computed3 = reference_lambda3(n, symbol_bits)
    if mode == 'reference':
        if lambda3 is not None or lambda4 is not None or shrink_slack is not None:
            raise ParameterError("reference mode does not accept lambda or slack overrides")
        lambda3 = computed3
        lambda4 = max(1, ceil_log2(lambda3))
        shrink_slack = config.SHRINK_SLACK
    else:
        lambda3 = computed3 if lambda3 is None else lambda3
        lambda4 = config.DEFAULT_LAMBDA4 if lambda4 is None else lambda4
        shrink_slack = config.SHRINK_SLACK if shrink_slack is None else shrink_slack
        if lambda3 < 2:
            raise ParameterError(f"lambda3={lambda3} must be at least 2")
        if lambda4 < 1:
            raise ParameterError(f"lambda4={lambda4} must be at least 1")

    params = ParamEnv(
        n=n,
        tau=tau,
        b=n // tau,
        lambda3=lambda3,
        lambda4=lambda4,
        mode=mode,
        phase_count=phase_count_for(tau, lambda3),
        shrink_slack=shrink_slack,
    )
    logger.debug("params: %s", params)
    return params


def params_from_b(n, b, mode=config.DEFAULT_MODE, **overrides):
    """make_params with tau derived from a target size b (tau = n // b)."""
    if b < 1:
        raise ParameterError(f"b={b} must be positive")
    return make_params(n, n // b, mode, **overrides)


def params_for_text(text, tau, mode=config.DEFAULT_MODE, **overrides):
    return make_params(text.n, tau, mode, symbol_bits=text.w, **overrides)
