"""Weil representation of the lattice Z with form -N x^2, and vector-valued forms.

The discriminant group is Z/2N with quadratic form d -> d^2/(4N) mod 1.
Signature is (2, 1), so rho(S) carries the eighth root of unity e(-1/8).
For N = 1 the plus-space dictionary identifies scalar Kohnen plus forms
with vector-valued forms.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

import numpy as np

from .qexact import QExpansion

__all__ = [
    "qform", "rho_T", "rho_S", "rho_Z", "relation_residuals", "VVForm", "PlusForm",
    "plus_to_vv", "vv_to_plus", "WeightMismatch",
]


class WeightMismatch(ValueError):
    pass


def qform(d: int, N: int) -> Fraction:
    """d^2/(4N) mod 1."""
    return Fraction(d * d, 4 * N) % 1


def _e(x) -> complex:
    return cmath.exp(2j * math.pi * float(x))


def rho_T(N: int) -> np.ndarray:
    n = 2 * N
    return np.diag([_e(Fraction(d * d, 4 * N)) for d in range(n)])


def rho_S(N: int) -> np.ndarray:
    n = 2 * N
    d = np.arange(n)
    phase = np.exp(-2j * np.pi * np.outer(d, d) / n)
    return (_e(Fraction(-1, 8)) / math.sqrt(n)) * phase


def rho_Z(N: int) -> np.ndarray:
    return rho_S(N) @ rho_S(N)


def relation_residuals(N: int) -> Dict[str, float]:
    """Residuals of S^2 = (ST)^3, Z^4 = 1 and unitarity."""
    s, t = rho_S(N), rho_T(N)
    z = s @ s
    st = s @ t
    eye = np.eye(2 * N)
    return {
        "S2_eq_ST3": float(np.max(np.abs(z - st @ st @ st))),
        "Z4_eq_I": float(np.max(np.abs(np.linalg.matrix_power(z, 4) - eye))),
        "unitary": float(np.max(np.abs(s @ s.conj().T - eye))),
    }


def _parity_sign(weight: Fraction, rep: str) -> int:
    # f_{-d} = i^(1-2k) f_d for rho, i^(-1-2k) f_d for the dual
    e = (1 - 2 * weight) if rep == "rho" else (-1 - 2 * weight)
    if e.denominator != 1 or e % 2:
        raise WeightMismatch(f"weight {weight} is incompatible with the representation")
    return 1 if int(e) % 4 == 0 else -1


@dataclass
class VVForm:
    """A vector-valued q-expansion for rho_L (``rep='rho'``) or its dual."""

    N: int
    weight: Fraction
    components: Dict[int, QExpansion]
    rep: str = "rho"

    def __post_init__(self):
        self.weight = Fraction(self.weight)
        if self.rep not in ("rho", "dual"):
            raise ValueError("rep must be 'rho' or 'dual'")
        n = 2 * self.N
        self.components = {d % n: f for d, f in self.components.items()}
        sgn = 1 if self.rep == "rho" else -1
        for d, f in self.components.items():
            target = (sgn * Fraction(d * d, 4 * self.N)) % 1
            for e, _ in f.terms():
                if (e - target) % 1:
                    raise ValueError(f"component {d} has exponent {e}, expected {target} mod 1")

    @property
    def parity(self) -> int:
        return _parity_sign(self.weight, self.rep)

    def component(self, d: int) -> QExpansion:
        d %= 2 * self.N
        if d in self.components:
            return self.components[d]
        precs = [f.prec for f in self.components.values()]
        p = min(precs) if precs else math.inf
        return QExpansion.zero(4 * self.N, p if p == math.inf else int(p * 4 * self.N))

    def coefficient(self, d: int, n) -> Fraction:
        """c(d, n): coefficient of q^n e_d."""
        return self.component(d)[n]

    def check_symmetry(self) -> bool:
        s = self.parity
        for d in range(2 * self.N):
            a, b = self.component(d), self.component(-d)
            if not a.agrees_with(b.scale(s)):
                return False
        return True

    def principal_part(self) -> Dict[tuple, Fraction]:
        """{(d, n): c} for the terms q^(-n) e_d with n > 0."""
        out = {}
        for d, f in sorted(self.components.items()):
            for e, v in f.terms():
                if e < 0:
                    out[(d, -e)] = v
        return out

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "weight": str(self.weight),
            "rep": self.rep,
            "components": {str(d): f.to_json() for d, f in sorted(self.components.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "VVForm":
        comps = {int(d): QExpansion.from_json(v) for d, v in data["components"].items()}
        return cls(int(data["N"]), Fraction(data["weight"]), comps, data.get("rep", "rho"))


def _kohnen_ok(n: int, lam: int) -> bool:
    return (n if lam % 2 == 0 else -n) % 4 in (0, 1)


@dataclass
class PlusForm:
    """A scalar form of half-integral weight in Kohnen's plus space for Gamma0(4)."""

    weight: Fraction
    series: QExpansion
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.weight = Fraction(self.weight)
        if self.weight.denominator != 2:
            raise WeightMismatch("plus forms have half-integral weight")
        if self.series.den != 1:
            s = self.series.normalized()
            if s.den != 1:
                raise ValueError("plus forms have integral exponents")
            self.series = s
        lam = int(self.weight - Fraction(1, 2))
        for e, v in self.series.items():
            if not _kohnen_ok(e, lam):
                raise ValueError(f"coefficient at q^{e} violates the plus-space condition")

    @property
    def m(self) -> int:
        """For weight 1/2 - m this is m."""
        return int(Fraction(1, 2) - self.weight)

    def coefficient(self, n: int) -> Fraction:
        return self.series[n]

    def principal_part(self) -> Dict[int, Fraction]:
        return {-e: v for e, v in self.series.items() if e < 0}

    def to_json(self) -> dict:
        out = {"weight": str(self.weight), "series": self.series.to_json()}
        out.update({k: v for k, v in self.meta.items()})
        return out

    @classmethod
    def from_json(cls, data: dict) -> "PlusForm":
        meta = {k: v for k, v in data.items() if k not in ("weight", "series")}
        return cls(Fraction(data["weight"]), QExpansion.from_json(data["series"]), meta)


def plus_to_vv(g: PlusForm, rep: str | None = None) -> VVForm:
    """Coefficient c(n) of q^n goes to component n mod 2 at exponent n/4 (N = 1)."""
    if rep is None:
        rep = "rho" if _kohnen_sign(g.weight) == 1 else "dual"
    comps: Dict[int, Dict[int, Fraction]] = {0: {}, 1: {}}
    for e, v in g.series.items():
        comps[e % 2][e] = v
    p = g.series.scaled_prec
    return VVForm(1, g.weight, {d: QExpansion(c, 4, p) for d, c in comps.items()}, rep)


def _kohnen_sign(weight: Fraction) -> int:
    lam = int(weight - Fraction(1, 2))
    return 1 if lam % 2 == 0 else -1


def vv_to_plus(f: VVForm) -> PlusForm:
    if f.N != 1:
        raise ValueError("the plus-space dictionary is only set up for N = 1")
    total = f.component(0).with_den(4) + f.component(1).with_den(4)
    # q^(e/4) in the vector-valued picture is q^e in the scalar one
    return PlusForm(f.weight, QExpansion(dict(total.items()), 1, total.scaled_prec))
