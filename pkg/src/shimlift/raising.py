"""Almost holomorphic series in (q, w) with w = 1/(4 pi y), and the operators on them.

A term c q^n w^k stands for c (4 pi)^-k q^n / y^k, so every coefficient the
raising, lowering and Laplace operators produce stays rational.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .qexact import QExpansion
from .weil import VVForm, WeightMismatch

__all__ = [
    "AHSeries", "delta_op", "delta_power", "lower_op", "laplacian",
    "delta_power_closed", "lowering_scalar", "alt_binomial_sum",
]

Terms = Dict[Tuple[int, int], Fraction]  # (scaled exponent, w-degree) -> coefficient


def _clean(terms: Mapping[Tuple[int, int], Fraction]) -> Terms:
    return {key: Fraction(v) for key, v in terms.items() if v}


@dataclass(frozen=True)
class AHSeries:
    """sum over components d of sum c(e, k) q^(e/den) w^k e_d, of a fixed weight.

    Exponents are stored scaled by ``den``.  A scalar series uses N = 0 and
    the single component 0.
    """

    N: int
    weight: Fraction
    comps: Mapping[int, Terms]
    den: int = 1
    rep: str = "rho"
    k_max: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "weight", Fraction(self.weight))
        comps = {d: _clean(t) for d, t in self.comps.items()}
        object.__setattr__(self, "comps", {d: t for d, t in sorted(comps.items()) if t})
        if self.k_max is not None and self.depth > self.k_max:
            raise ValueError(f"depth {self.depth} exceeds the bound {self.k_max}")

    @classmethod
    def from_series(cls, series: QExpansion, weight) -> "AHSeries":
        """A holomorphic scalar series as a depth-0 AHSeries."""
        return cls(0, Fraction(weight), {0: {(e, 0): v for e, v in series.items()}}, series.den)

    @classmethod
    def from_vv(cls, f: VVForm) -> "AHSeries":
        den = 4 * f.N
        comps = {}
        for d, s in f.components.items():
            s = s.with_den(den)
            comps[d] = {(e, 0): v for e, v in s.items()}
        return cls(f.N, f.weight, comps, den, f.rep)

    @property
    def depth(self) -> int:
        return max((k for t in self.comps.values() for (_, k) in t), default=0)

    def slice(self, k: int) -> Dict[int, Dict[Fraction, Fraction]]:
        """The coefficient of w^k, keyed by component and true exponent."""
        return {d: {Fraction(e, self.den): v for (e, kk), v in t.items() if kk == k}
                for d, t in self.comps.items()}

    def _like(self, comps, weight=None) -> "AHSeries":
        return AHSeries(self.N, self.weight if weight is None else weight, comps, self.den,
                        self.rep, self.k_max)

    def __add__(self, other: "AHSeries") -> "AHSeries":
        if self.weight != other.weight:
            raise WeightMismatch("cannot add series of different weights")
        if (self.N, self.den, self.rep) != (other.N, other.den, other.rep):
            raise ValueError("incompatible series")
        out: Dict[int, Terms] = {d: dict(t) for d, t in self.comps.items()}
        for d, t in other.comps.items():
            tgt = out.setdefault(d, {})
            for key, v in t.items():
                tgt[key] = tgt.get(key, Fraction(0)) + v
        return self._like(out)

    def scale(self, c) -> "AHSeries":
        c = Fraction(c)
        return self._like({d: {key: c * v for key, v in t.items()} for d, t in self.comps.items()})

    def __sub__(self, other: "AHSeries") -> "AHSeries":
        return self + other.scale(-1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AHSeries):
            return NotImplemented
        return (self.N, self.weight, self.den, self.rep, self.comps) == \
            (other.N, other.weight, other.den, other.rep, other.comps)

    def is_zero(self) -> bool:
        return not self.comps

    def to_json(self) -> dict:
        return {
            "N": self.N, "weight": str(self.weight), "rep": self.rep, "den": self.den,
            "components": {str(d): [{"e": e, "wdeg": k, "c": str(v)}
                                    for (e, k), v in sorted(t.items())]
                           for d, t in self.comps.items()},
        }

    @classmethod
    def from_json(cls, data: dict) -> "AHSeries":
        comps = {int(d): {(int(t["e"]), int(t["wdeg"])): Fraction(t["c"]) for t in terms}
                 for d, terms in data["components"].items()}
        return cls(int(data["N"]), Fraction(data["weight"]), comps, int(data["den"]), data["rep"])


def delta_op(l, F: AHSeries) -> AHSeries:
    """delta_l = d/(2 pi i d tau) - l/(4 pi y):  q^n w^k -> n q^n w^k + (k - l) q^n w^(k+1)."""
    l = Fraction(l)
    if l != F.weight:
        raise WeightMismatch(f"delta_{l} applied to a series of weight {F.weight}")
    out: Dict[int, Terms] = {}
    for d, t in F.comps.items():
        tgt: Terms = {}
        for (e, k), v in t.items():
            n = Fraction(e, F.den)
            if n:
                tgt[(e, k)] = tgt.get((e, k), Fraction(0)) + n * v
            if k != l:
                tgt[(e, k + 1)] = tgt.get((e, k + 1), Fraction(0)) + (k - l) * v
        out[d] = tgt
    return AHSeries(F.N, F.weight + 2, out, F.den, F.rep)


def delta_power(m: int, F: AHSeries) -> AHSeries:
    """m-fold iteration delta_(l+2m-2) o ... o delta_l."""
    for _ in range(m):
        F = delta_op(F.weight, F)
    return F


def lower_op(F: AHSeries) -> AHSeries:
    """L~ = -4 pi L with L = -2 i y^2 d/d(tau bar):  q^n w^k -> k q^n w^(k-1)."""
    out = {d: {(e, k - 1): k * v for (e, k), v in t.items() if k}
           for d, t in F.comps.items()}
    return AHSeries(F.N, F.weight - 2, out, F.den, F.rep)


def laplacian(k, F: AHSeries) -> AHSeries:
    """Delta_k = -R_(k-2) L_k, which equals -delta_(k-2) o L~ in these variables.

    Harmonic means Delta_k F = 0; delta^m of a holomorphic form of weight
    1 - b/2 - m has eigenvalue -m b/2.
    """
    k = Fraction(k)
    if k != F.weight:
        raise WeightMismatch(f"Laplacian of weight {k} applied to a series of weight {F.weight}")
    G = lower_op(F)
    return delta_op(k - 2, G).scale(-1)


def _rising(b_half: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for r in range(k):
        out *= r + b_half
    return out


def delta_power_closed(m: int, f, b_minus: int) -> AHSeries:
    """delta^m f in closed form: c q^n -> sum_k binom(m, k) n^(m-k) prod_(r<k)(r + b/2) c q^n w^k."""
    if m < 0:
        raise ValueError("m must be non-negative")
    F = AHSeries.from_vv(f) if isinstance(f, VVForm) else f
    expected = 1 - Fraction(b_minus, 2) - m
    if F.weight != expected:
        raise WeightMismatch(f"expected weight {expected}, got {F.weight}")
    if F.depth:
        raise ValueError("delta_power_closed takes a holomorphic input")
    bh = Fraction(b_minus, 2)
    weights = [comb(m, k) * _rising(bh, k) for k in range(m + 1)]
    out: Dict[int, Terms] = {}
    for d, t in F.comps.items():
        tgt: Terms = {}
        for (e, _), v in t.items():
            n = Fraction(e, F.den)
            for k in range(m + 1):
                c = weights[k] * n ** (m - k) * v
                if c:
                    tgt[(e, k)] = c
        out[d] = tgt
    return AHSeries(F.N, F.weight + 2 * m, out, F.den, F.rep)


def lowering_scalar(m: int, b_minus: int) -> Fraction:
    """L~ delta^m f = lowering_scalar * delta^(m-1) f for f holomorphic of weight 1 - b/2 - m."""
    return Fraction(m * b_minus, 2)


def alt_binomial_sum(p: Sequence[int], C: int) -> Fraction:
    """sum_(j=0)^C (-1)^j binom(C, j) p(j); p is given by coefficients, constant term first."""
    total = Fraction(0)
    for j in range(C + 1):
        pj = 0
        for c in reversed(p):
            pj = pj * j + c
        total += (-1) ** j * comb(C, j) * pj
    return total
