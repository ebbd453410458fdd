"""Dense integer polynomial products by Kronecker substitution.

Both operands are packed into a single big integer, multiplied once and
unpacked.  With gmpy2 available the multiplication runs through GMP, which
is what makes series of tens of thousands of terms cheap.
"""

from __future__ import annotations

from typing import List, Sequence

try:
    import gmpy2

    def _big(n: int):
        return gmpy2.mpz(n)

except ImportError:  # pragma: no cover
    gmpy2 = None

    def _big(n: int):
        return n


def _pack(coeffs: Sequence[int], nbytes: int):
    pos = [c if c > 0 else 0 for c in coeffs]
    neg = [-c if c < 0 else 0 for c in coeffs]
    if gmpy2 is not None:
        return gmpy2.pack(pos, 8 * nbytes) - gmpy2.pack(neg, 8 * nbytes)
    pos = b"".join(c.to_bytes(nbytes, "little") for c in pos)
    neg = b"".join(c.to_bytes(nbytes, "little") for c in neg)
    return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")


def _unpack(y, nbytes: int, length: int) -> List[int]:
    if gmpy2 is not None:
        digits = gmpy2.unpack(y, 8 * nbytes)[:length]
        digits += [0] * (length - len(digits))
        return [int(d) for d in digits]
    raw = int(y).to_bytes(nbytes * length + nbytes + 1, "little")
    return [int.from_bytes(raw[k * nbytes:(k + 1) * nbytes], "little") for k in range(length)]


def _maxbits(coeffs: Sequence[int]) -> int:
    return max((abs(c).bit_length() for c in coeffs), default=0)


def poly_mul(a: Sequence[int], b: Sequence[int], length: int | None = None) -> List[int]:
    """Product of two integer coefficient lists, optionally truncated."""
    if not a or not b:
        return []
    full = len(a) + len(b) - 1
    if length is None or length > full:
        length = full
    if length <= 0:
        return []
    a = a[:length]
    b = b[:length]
    full = len(a) + len(b) - 1
    if min(len(a), len(b)) < 24:
        return _schoolbook(a, b, length)
    bits = _maxbits(a) + _maxbits(b) + min(len(a), len(b)).bit_length() + 2
    nbytes = (bits + 7) // 8
    width = 8 * nbytes
    x = _big(_pack(a, nbytes)) * _big(_pack(b, nbytes))
    offset = 1 << (width - 1)
    # add 2^(width-1) to every digit so that each becomes non-negative
    if gmpy2 is not None:
        y = x + gmpy2.pack([offset] * full, width)
    else:
        y = x + offset * (((1 << (width * full)) - 1) // ((1 << width) - 1))
    return [d - offset for d in _unpack(y, nbytes, length)]


def _schoolbook(a: Sequence[int], b: Sequence[int], length: int) -> List[int]:
    out = [0] * length
    if len(a) < len(b):
        a, b = b, a
    for j, bj in enumerate(b):
        if not bj:
            continue
        for i in range(min(len(a), length - j)):
            ai = a[i]
            if ai:
                out[i + j] += ai * bj
    return out


def poly_inverse(a: Sequence[int], length: int) -> List[int]:
    """Power series inverse of an integer series with constant term +-1."""
    if a[0] not in (1, -1):
        raise ValueError("constant term must be a unit")
    w = [a[0]]
    n = 1
    while n < length:
        n = min(2 * n, length)
        aw = poly_mul(a[:n], w, n)
        # w <- w * (2 - a w)
        corr = [-c for c in aw]
        corr[0] += 2
        w = poly_mul(w, corr, n)
    return w[:length]
