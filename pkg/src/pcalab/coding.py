"""Cantor pairing and the finite-sequence coding built on it.

Used for K1 runtime data, the two-argument convention, stage numbers in the
Friedberg construction, and the K2 query coding.
"""

from math import isqrt

_UNPAIR_CACHE: dict = {}
_CACHE_LIMIT = 1 << 16


def pair(x: int, y: int) -> int:
    z = (x + y) * (x + y + 1) // 2 + y
    if z.bit_length() > 256:
        if len(_UNPAIR_CACHE) > _CACHE_LIMIT:
            _UNPAIR_CACHE.clear()
        _UNPAIR_CACHE[z] = (x, y)
    return z


def unpair(z: int):
    hit = _UNPAIR_CACHE.get(z) if z.bit_length() > 256 else None
    if hit is not None:
        return hit
    w = (isqrt(8 * z + 1) - 1) // 2
    y = z - w * (w + 1) // 2
    return w - y, y


def seq_code(seq) -> int:
    """Bijection between finite sequences of naturals and naturals."""
    code = 0
    for v in seq:
        code = 1 + pair(code, v)
    return code


def seq_decode(code: int) -> tuple:
    out = []
    while code:
        code, v = unpair(code - 1)
        out.append(v)
    return tuple(reversed(out))


def query_code(n: int, seq) -> int:
    """Code of the question "output coordinate n, given this input prefix"."""
    return pair(n, seq_code(seq))


def query_decode(m: int):
    n, c = unpair(m)
    return n, seq_decode(c)
