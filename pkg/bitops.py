"""
TauSet - Bit primitives
lbit/vbit reductions and fixed-width tuple packing. Infinity is math.inf for
scalar values and an all-ones field inside packed chunks.
"""

import math
from dataclasses import dataclass

INF = math.inf


def _as_int(x):
    return x.bits if isinstance(x, Chunk) else x


def lbit(x, y):
    """Index of the lowest bit where x and y differ. x == y is a caller error."""
    diff = _as_int(x) ^ _as_int(y)
    if diff == 0:
        raise ValueError("lbit of equal values is undefined")
    return (diff & -diff).bit_length() - 1


def vbit(x, y):
    """2*lbit(x, y) plus the bit of x at that index; infinite if either side is."""
    if x == INF or y == INF:
        return INF
    xi = _as_int(x)
    i = lbit(xi, _as_int(y))
    return 2 * i + ((xi >> i) & 1)


def window_vbit(ell, a, b, code_width):
    """
    vbit of two packed windows whose first mismatch is at symbol offset ell,
    with a and b the mismatching symbols (sentinel allowed).
    """
    ca, cb = a + 1, b + 1
    low = lbit(ca, cb)
    return 2 * (code_width * ell + low) + ((ca >> low) & 1)


def field_width_for(max_finite):
    """Bits needed so that max_finite fits and all-ones stays free for infinity."""
    return (max_finite + 1).bit_length()


@dataclass(frozen=True)
class Chunk:
    """Bit string stored low bit first."""

    bits: int
    width: int

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("chunk width must be positive")
        if self.bits < 0 or self.bits >> self.width:
            raise ValueError(f"{self.bits} does not fit in {self.width} bits")

    def __str__(self):
        return format(self.bits, f'0{self.width}b')


def encode_tuple(values, field_width):
    """
    Pack values into consecutive fields, first value in the lowest field.

    Args:
        values: Integers or INF
        field_width: Bits per field

    Returns:
        Chunk of width len(values) * field_width
    """
    if field_width <= 0:
        raise ValueError("field width must be positive")
    ones = (1 << field_width) - 1
    bits = 0
    for i, value in enumerate(values):
        if value == INF:
            field = ones
        else:
            if value < 0 or value >= ones:
                raise ValueError(f"value {value} does not fit a {field_width}-bit field")
            field = value
        bits |= field << (i * field_width)
    return Chunk(bits, max(1, len(values)) * field_width)


def decode_tuple(chunk, field_width):
    ones = (1 << field_width) - 1
    out = []
    for i in range(chunk.width // field_width):
        field = (chunk.bits >> (i * field_width)) & ones
        out.append(INF if field == ones else field)
    return out
