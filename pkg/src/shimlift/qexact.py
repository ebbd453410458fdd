"""Exact truncated Laurent/Puiseux q-expansions with rational coefficients.

A series stores its exponents as integers scaled by a common denominator
``den``: the key ``e`` stands for ``q^(e/den)``.  ``prec`` (also scaled) is
the first exponent whose coefficient is unknown; ``math.inf`` marks an
exact finite sum.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, List, Mapping, Tuple

from ._bigmul import poly_inverse, poly_mul

__all__ = ["QExpansion", "PrecisionError", "q", "monomial", "linear_combination"]

INF = math.inf


class PrecisionError(ValueError):
    """Raised when a coefficient beyond the known precision is requested."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"exact rational expected, got {type(x).__name__}")


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


class QExpansion:
    __slots__ = ("den", "_prec", "_c")

    def __init__(self, coeffs: Mapping[int, object] | Iterable[Tuple[int, object]] = (),
                 den: int = 1, prec: float | int = INF):
        if not isinstance(den, int) or den < 1:
            raise ValueError("den must be a positive integer")
        if prec != INF and int(prec) != prec:
            raise ValueError("scaled precision must be an integer")
        self.den = den
        self._prec = prec if prec == INF else int(prec)
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c: Dict[int, Fraction] = {}
        for e, v in items:
            e = int(e)
            if e >= self._prec:
                continue
            v = _frac(v)
            if v:
                c[e] = c.get(e, 0) + v
        self._c = {e: v for e, v in c.items() if v}

    @classmethod
    def _raw(cls, c: Dict[int, Fraction], den: int, prec) -> "QExpansion":
        # trusted constructor: keys below prec, values non-zero Fractions
        obj = cls.__new__(cls)
        obj.den = den
        obj._prec = prec
        obj._c = c
        return obj

    # construction helpers

    @classmethod
    def from_exponents(cls, terms: Mapping[object, object], prec=INF) -> "QExpansion":
        """Build from a map true-exponent -> coefficient."""
        exps = {_frac(e): v for e, v in terms.items()}
        den = 1
        for e in exps:
            den = _lcm(den, e.denominator)
        if prec != INF:
            prec = _frac(prec)
            den = _lcm(den, prec.denominator)
            prec = int(prec * den)
        return cls({int(e * den): v for e, v in exps.items()}, den, prec)

    @classmethod
    def from_list(cls, coeffs: Iterable[object], start: int = 0, den: int = 1,
                  prec=None) -> "QExpansion":
        """Dense constructor: ``coeffs[i]`` is the coefficient of key ``start + i``."""
        coeffs = list(coeffs)
        if prec is None:
            prec = start + len(coeffs)
        return cls({start + i: c for i, c in enumerate(coeffs) if c}, den, prec)

    @classmethod
    def zero(cls, den: int = 1, prec=INF) -> "QExpansion":
        return cls({}, den, prec)

    # basic access

    @property
    def prec(self):
        """True-exponent precision bound (``math.inf`` if exact)."""
        return INF if self._prec == INF else Fraction(self._prec, self.den)

    @property
    def scaled_prec(self):
        return self._prec

    def is_exact(self) -> bool:
        return self._prec == INF

    def keys(self) -> List[int]:
        return sorted(self._c)

    def items(self) -> Iterator[Tuple[int, Fraction]]:
        for e in sorted(self._c):
            yield e, self._c[e]

    def terms(self) -> List[Tuple[Fraction, Fraction]]:
        return [(Fraction(e, self.den), v) for e, v in self.items()]

    def __len__(self) -> int:
        return len(self._c)

    def __bool__(self) -> bool:
        return bool(self._c)

    def scaled_coeff(self, e: int) -> Fraction:
        if e >= self._prec:
            raise PrecisionError(f"key {e} not below precision {self._prec}")
        return self._c.get(e, Fraction(0))

    def __getitem__(self, exponent) -> Fraction:
        exponent = _frac(exponent)
        scaled = exponent * self.den
        if exponent * self.den >= self._prec:
            raise PrecisionError(f"q^{exponent} is beyond the precision O(q^{self.prec})")
        if scaled.denominator != 1:
            return Fraction(0)
        return self._c.get(int(scaled), Fraction(0))

    def coefficient(self, exponent) -> Fraction:
        return self[exponent]

    def _lead_key(self):
        return min(self._c) if self._c else self._prec

    @property
    def valuation(self):
        """Smallest exponent with a non-zero coefficient (``prec`` if none)."""
        k = self._lead_key()
        return k if k == INF else Fraction(k, self.den)

    def leading_coefficient(self) -> Fraction:
        if not self._c:
            raise ValueError("series has no known non-zero coefficient")
        return self._c[min(self._c)]

    def principal_part(self) -> "QExpansion":
        return QExpansion({e: v for e, v in self._c.items() if e < 0}, self.den)

    # re-scaling of the exponent lattice

    def with_den(self, den: int) -> "QExpansion":
        if den % self.den:
            raise ValueError("new denominator must be a multiple of the old one")
        k = den // self.den
        prec = self._prec if self._prec == INF else self._prec * k
        return QExpansion({e * k: v for e, v in self._c.items()}, den, prec)

    def normalized(self) -> "QExpansion":
        """Same series over the smallest possible exponent denominator."""
        g = self.den
        for e in self._c:
            g = math.gcd(g, e)
        if self._prec != INF:
            g = math.gcd(g, self._prec)
        if g == 1:
            return self
        prec = self._prec if self._prec == INF else self._prec // g
        return QExpansion({e // g: v for e, v in self._c.items()}, self.den // g, prec)

    def _align(self, other: "QExpansion") -> Tuple["QExpansion", "QExpansion"]:
        if self.den == other.den:
            return self, other
        d = _lcm(self.den, other.den)
        return self.with_den(d), other.with_den(d)

    # ring operations

    def _coerce(self, other) -> "QExpansion":
        if isinstance(other, QExpansion):
            return other
        return QExpansion({0: _frac(other)}, self.den)

    def __add__(self, other) -> "QExpansion":
        other = self._coerce(other)
        a, b = self._align(other)
        p = min(a._prec, b._prec)
        c = {e: v for e, v in a._c.items() if e < p}
        for e, v in b._c.items():
            if e < p:
                x = c.get(e)
                if x is None:
                    c[e] = v
                else:
                    x += v
                    if x:
                        c[e] = x
                    else:
                        del c[e]
        return QExpansion._raw(c, a.den, p)

    __radd__ = __add__

    def __neg__(self) -> "QExpansion":
        return QExpansion._raw({e: -v for e, v in self._c.items()}, self.den, self._prec)

    def __sub__(self, other) -> "QExpansion":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "QExpansion":
        return self._coerce(other) - self

    def scale(self, c) -> "QExpansion":
        c = _frac(c)
        if not c:
            return QExpansion({}, self.den, self._prec)
        return QExpansion._raw({e: v * c for e, v in self._c.items()}, self.den, self._prec)

    def __mul__(self, other) -> "QExpansion":
        if not isinstance(other, QExpansion):
            return self.scale(other)
        a, b = self._align(other)
        la, lb = a._lead_key(), b._lead_key()
        prec = min(a._prec + lb, b._prec + la)
        if not a._c or not b._c:
            return QExpansion({}, a.den, prec)
        ka = [e for e in a._c if e + lb < prec]
        kb = [e for e in b._c if e + la < prec]
        if not ka or not kb:
            return QExpansion({}, a.den, prec)
        if len(ka) * len(kb) <= 4096 or min(len(ka), len(kb)) <= 8:
            return QExpansion(_sparse_mul(a._c, ka, b._c, kb, prec), a.den, prec)
        return QExpansion._raw(_dense_mul(a._c, ka, b._c, kb, prec), a.den, prec)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QExpansion":
        if isinstance(other, QExpansion):
            return self * other.invert()
        return self.scale(1 / _frac(other))

    def __pow__(self, n: int) -> "QExpansion":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** (-n)
        result = QExpansion({0: 1}, self.den)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def invert(self, prec=None) -> "QExpansion":
        """Multiplicative inverse.

        ``prec`` (a true exponent) is required when the input is an exact
        series that is not a monomial, since the inverse is then infinite.
        """
        if not self._c:
            raise ZeroDivisionError("series has no known non-zero coefficient")
        v = min(self._c)
        c0 = self._c[v]
        if len(self._c) == 1 and self._prec == INF:
            return QExpansion({-v: 1 / c0}, self.den)
        target = self._prec - 2 * v if self._prec != INF else INF
        if prec is not None:
            p = _frac(prec) * self.den
            if p.denominator != 1:
                raise ValueError("precision not on the exponent lattice")
            target = min(target, int(p))
        if target == INF:
            raise PrecisionError("exact non-monomial series needs an explicit precision")
        n = int(target + v)  # number of scaled steps of relative precision
        if n <= 0:
            return QExpansion({}, self.den, target)
        g = 0
        for e in self._c:
            g = math.gcd(g, e - v)
        g = math.gcd(g, n) if g else n
        unit = [Fraction(0)] * ((n + g - 1) // g)
        for e, x in self._c.items():
            k = e - v
            if k < n:
                unit[k // g] = x / c0
        inv = _unit_inverse(unit)
        out = {g * i - v: x / c0 for i, x in enumerate(inv) if x}
        return QExpansion(out, self.den, target)

    # analytic operations

    def q_derivative(self) -> "QExpansion":
        """Apply q d/dq."""
        return QExpansion({e: v * Fraction(e, self.den) for e, v in self._c.items()},
                          self.den, self._prec)

    def rescale(self, k: int) -> "QExpansion":
        """Substitute q -> q^k (tau -> k tau)."""
        if not isinstance(k, int) or k < 1:
            raise ValueError("rescale factor must be a positive integer")
        prec = self._prec if self._prec == INF else self._prec * k
        return QExpansion._raw({e * k: v for e, v in self._c.items()}, self.den, prec)

    def shift(self, exponent) -> "QExpansion":
        """Multiply by q^exponent."""
        e = _frac(exponent)
        d = _lcm(self.den, e.denominator)
        s = self.with_den(d)
        k = int(e * d)
        prec = s._prec if s._prec == INF else s._prec + k
        return QExpansion({x + k: v for x, v in s._c.items()}, d, prec)

    def truncate(self, prec) -> "QExpansion":
        """Forget everything from q^prec on."""
        p = _frac(prec) * self.den
        p = min(self._prec, math.ceil(p))
        return QExpansion._raw({e: v for e, v in self._c.items() if e < p}, self.den, p)

    def map_coefficients(self, fn) -> "QExpansion":
        return QExpansion({e: fn(v) for e, v in self._c.items()}, self.den, self._prec)

    def evaluate(self, qval: complex) -> complex:
        """Numerically sum the known terms at ``q^(1/den) = qval``."""
        total = 0j
        for e, v in self._c.items():
            total += float(v) * qval ** e
        return total

    # comparison and serialization

    def __eq__(self, other) -> bool:
        if not isinstance(other, QExpansion):
            return NotImplemented
        a, b = self._align(other)
        return a._prec == b._prec and a._c == b._c

    def __hash__(self):
        n = self.normalized()
        return hash((n.den, n._prec, tuple(sorted(n._c.items()))))

    def agrees_with(self, other: "QExpansion") -> bool:
        """Equality of all coefficients known to both series."""
        a, b = self._align(other)
        p = min(a._prec, b._prec)
        keys = set(a._c) | set(b._c)
        return all(a._c.get(e, 0) == b._c.get(e, 0) for e in keys if e < p)

    def to_json(self) -> dict:
        return {
            "den": self.den,
            "prec": None if self._prec == INF else self._prec,
            "terms": [[e, str(v)] for e, v in self.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "QExpansion":
        prec = data.get("prec")
        return cls({int(e): Fraction(v) for e, v in data["terms"]}, int(data["den"]),
                   INF if prec is None else int(prec))

    def __repr__(self) -> str:
        shown = []
        for e, v in list(self.items())[:8]:
            x = Fraction(e, self.den)
            shown.append(f"{v}*q^{x}")
        body = " + ".join(shown) if shown else "0"
        if len(self._c) > 8:
            body += " + ..."
        if self._prec != INF:
            body += f" + O(q^{self.prec})"
        return body


def _sparse_mul(ca, ka, cb, kb, prec) -> Dict[int, Fraction]:
    out: Dict[int, Fraction] = {}
    for i in ka:
        x = ca[i]
        for j in kb:
            e = i + j
            if e < prec:
                out[e] = out.get(e, 0) + x * cb[j]
    return out


def _as_integers(c, keys):
    d = 1
    for e in keys:
        d = _lcm(d, c[e].denominator)
    return d, {e: c[e].numerator * (d // c[e].denominator) for e in keys}


def _dense_mul(ca, ka, cb, kb, prec) -> Dict[int, Fraction]:
    da, ia = _as_integers(ca, ka)
    db, ib = _as_integers(cb, kb)
    sa, sb = min(ka), min(kb)
    ga = gb = 0
    for e in ka:
        ga = math.gcd(ga, e - sa)
    for e in kb:
        gb = math.gcd(gb, e - sb)
    g = math.gcd(ga, gb) or max(ga, gb) or 1
    la = [0] * ((max(ka) - sa) // g + 1)
    lb = [0] * ((max(kb) - sb) // g + 1)
    for e, v in ia.items():
        la[(e - sa) // g] = v
    for e, v in ib.items():
        lb[(e - sb) // g] = v
    length = prec - sa - sb
    length = len(la) + len(lb) - 1 if length == INF else min(len(la) + len(lb) - 1, (int(length) + g - 1) // g)
    prod = poly_mul(la, lb, length)
    d = da * db
    if d == 1:
        return {sa + sb + g * i: Fraction(v) for i, v in enumerate(prod) if v}
    return {sa + sb + g * i: Fraction(v, d) for i, v in enumerate(prod) if v}


def linear_combination(coeffs, series) -> QExpansion:
    """sum c_i s_i computed over a common denominator."""
    pairs = [(_frac(c), s) for c, s in zip(coeffs, series) if c]
    if not pairs:
        return QExpansion.zero(series[0].den, min(s._prec for s in series))
    den = 1
    for _, s in pairs:
        den = _lcm(den, s.den)
    pairs = [(c, s.with_den(den) if s.den != den else s) for c, s in pairs]
    prec = min(s._prec for _, s in pairs)
    total_den = 1
    scaled = []
    for c, s in pairs:
        d, ints = _as_integers(s._c, list(s._c))
        scaled.append((c / d, ints))
        total_den = _lcm(total_den, (c / d).denominator)
    acc: Dict[int, int] = {}
    for c, ints in scaled:
        k = c.numerator * (total_den // c.denominator)
        for e, v in ints.items():
            if e < prec:
                acc[e] = acc.get(e, 0) + k * v
    return QExpansion._raw({e: Fraction(v, total_den) for e, v in acc.items() if v}, den, prec)


def _unit_inverse(unit: List[Fraction]) -> List[Fraction]:
    """Inverse of 1 + u_1 x + ... truncated to len(unit) terms."""
    n = len(unit)
    d = 1
    for x in unit:
        d = _lcm(d, x.denominator)
    if d == 1:
        return [Fraction(v) for v in poly_inverse([int(x) for x in unit], n)]
    # substitute x -> x/d^j is not available for general denominators; fall back
    inv = [Fraction(0)] * n
    inv[0] = Fraction(1)
    nz = [(k, x) for k, x in enumerate(unit) if k and x]
    for i in range(1, n):
        s = Fraction(0)
        for k, x in nz:
            if k > i:
                break
            s += x * inv[i - k]
        inv[i] = -s
    return inv


def q(prec=INF) -> QExpansion:
    """The series ``q`` itself."""
    return QExpansion({1: 1}, 1, prec)


def monomial(coeff, exponent) -> QExpansion:
    return QExpansion.from_exponents({exponent: coeff})
