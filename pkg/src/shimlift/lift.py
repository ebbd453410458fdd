"""The singular lift for signature (2, 1): Fourier expansion, poles, certificates.

A weakly holomorphic form f of weight 1/2 - m lifts to a meromorphic form
G of weight 2m + 2 on Gamma0(N).  Its Fourier coefficients are divisor sums
of the coefficients c(d, d^2/4N) of f; its poles sit at the CM points
attached to the negative exponents of f.

A lattice vector lambda in L* is written (A, B, C) with x2 = A,
x3 = B/2N, x1 = -C.  It has norm (B^2 - 4NAC)/2N and class B mod 2N; the
matching CM point is sigma = (B + i sqrt(4NAC - B^2)) / (2NA).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from ._linalg import rref
from .classical import (discriminant_form, divisors, eisenstein, eval_delta,
                        eval_eisenstein)
from .qexact import QExpansion
from .weil import VVForm, WeightMismatch

__all__ = [
    "lift_positive_part", "HeegnerPoint", "PoleData", "LiftResult", "lift",
    "reduced_forms", "enumerate_poles", "principal_part", "NotAPole",
    "ModularFormCertificate", "clear_poles_certificate", "IrrationalJ",
    "NotModular", "level_one_basis", "RepMismatch", "gamma0_equivalent",
]


class RepMismatch(ValueError):
    pass


class NotAPole(ValueError):
    pass


class IrrationalJ(ValueError):
    pass


class NotModular(ValueError):
    def __init__(self, exponent: int, expected: Fraction, found: Fraction):
        self.exponent = exponent
        super().__init__(f"coefficient of q^{exponent}: basis gives {expected}, series has {found}")


def _weight_m(f: VVForm) -> int:
    m = Fraction(1, 2) - f.weight
    if m.denominator != 1 or m < 0:
        raise WeightMismatch(f"expected weight 1/2 - m with m >= 0, got {f.weight}")
    return int(m)


def lift_positive_part(f: VVForm, prec: int, N: Optional[int] = None) -> QExpansion:
    """sum_{r=1}^{prec} (r/N)^m (sum_{d | r} d^(m+1) c(d, d^2/4N)) q^r."""
    if f.rep != "rho":
        raise RepMismatch("the lift takes forms for rho_L")
    N = f.N if N is None else N
    if N != f.N:
        raise ValueError("level datum does not match the form")
    m = _weight_m(f)
    cache: Dict[int, Fraction] = {}

    def c(d: int) -> Fraction:
        if d not in cache:
            cache[d] = f.coefficient(d, Fraction(d * d, 4 * N))
        return cache[d]

    out = {}
    for r in range(1, prec + 1):
        s = sum((d ** (m + 1) * c(d) for d in divisors(r)), Fraction(0))
        if s:
            out[r] = Fraction(r ** m, N ** m) * s
    return QExpansion(out, 1, prec + 1)


# CM points as binary quadratic forms

def reduced_forms(D: int) -> List[Tuple[int, int, int]]:
    """All SL2(Z)-reduced positive definite forms [a, b, c] of discriminant D < 0,
    primitive or not."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("need a negative discriminant")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a:
                continue
            if b < 0 and a == c:
                continue
            out.append((a, b, c))
        a += 1
    return out


def _act(Q: Tuple[int, int, int], g: Sequence[Sequence[int]]) -> Tuple[int, int, int]:
    """(Q o g)(x, y) = Q(p x + q y, r x + s y)."""
    a, b, c = Q
    (p, q), (r, s) = g
    return (a * p * p + b * p * r + c * r * r,
            2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            a * q * q + b * q * s + c * s * s)


def _mul(g, h):
    return ((g[0][0] * h[0][0] + g[0][1] * h[1][0], g[0][0] * h[0][1] + g[0][1] * h[1][1]),
            (g[1][0] * h[0][0] + g[1][1] * h[1][0], g[1][0] * h[0][1] + g[1][1] * h[1][1]))


def _inv(g):
    return ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))


def _automorphisms(R: Tuple[int, int, int]):
    out = []
    for p, q, r, s in product((-1, 0, 1), repeat=4):
        g = ((p, q), (r, s))
        if p * s - q * r == 1 and _act(R, g) == R:
            out.append(g)
    return out


def _reduce(Q: Tuple[int, int, int]):
    """Return (R, g) with R reduced and Q o g = R."""
    g = ((1, 0), (0, 1))
    a, b, c = Q
    while True:
        # translate b into (-a, a]
        k = (a - b) // (2 * a)
        if k:
            t = ((1, k), (0, 1))
            a, b, c = _act((a, b, c), t)
            g = _mul(g, t)
        if a > c or (a == c and b < 0):
            s = ((0, -1), (1, 0))
            a, b, c = _act((a, b, c), s)
            g = _mul(g, s)
            continue
        return (a, b, c), g


def _p1_reps(N: int):
    """First columns (p, r) of representatives of SL2(Z)/Gamma0(N)."""
    seen = set()
    out = []
    for r in range(N):
        for p in range(N):
            if math.gcd(math.gcd(p, r), N) != 1:
                continue
            key = None
            for u in range(1, N + 1):
                if math.gcd(u, N) == 1:
                    cand = ((u * p) % N, (u * r) % N)
                    key = cand if key is None or cand < key else key
            if N == 1:
                key = (0, 0)
            if key in seen:
                continue
            seen.add(key)
            out.append(_complete(p, r, N))
    return out


def _complete(p: int, r: int, N: int):
    """An SL2(Z) matrix with first column congruent to (p, r) mod N."""
    if N == 1:
        return ((1, 0), (0, 1))
    # lift to a coprime pair
    for k in range(0, N * N + 1):
        pp = p + k * N
        if math.gcd(pp, r) == 1:
            break
    else:
        raise AssertionError("no coprime lift")
    # solve pp s - q r = 1
    g, x, y = _egcd(pp, r)
    return ((pp, -y), (r, x))


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass(frozen=True)
class HeegnerPoint:
    """CM point attached to lambda = (A, B, C) in L*, sigma a root of N A X^2 - B X + C."""

    N: int
    n: Fraction
    A: int
    B: int
    C: int
    gamma: int
    coeff: Fraction

    @property
    def form(self) -> Tuple[int, int, int]:
        return (self.N * self.A, self.B, self.C)

    @property
    def x(self) -> Fraction:
        return Fraction(self.B, 2 * self.N * self.A)

    @property
    def ysq(self) -> Fraction:
        return Fraction(4 * self.N * self.A * self.C - self.B ** 2, (2 * self.N * self.A) ** 2)

    @property
    def sigma(self) -> complex:
        return complex(float(self.x), math.sqrt(float(self.ysq)))

    @property
    def primitive(self) -> Tuple[int, int, int, int]:
        """(k, A0, B0, C0) with (A, B, C) = k (A0, B0, C0)."""
        g = math.gcd(math.gcd(self.A, self.B), self.C)
        return g, self.A // g, self.B // g, self.C // g

    def to_json(self) -> dict:
        return {"N": self.N, "n": str(self.n), "form": list(self.form), "gamma": self.gamma,
                "coeff": str(self.coeff), "x": str(self.x), "ysq": str(self.ysq)}


def gamma0_equivalent(Q1: Tuple[int, int, int], Q2: Tuple[int, int, int], N: int) -> bool:
    """Is Q1 o x = Q2 for some x in Gamma0(N)?"""
    if Q1[1] ** 2 - 4 * Q1[0] * Q1[2] != Q2[1] ** 2 - 4 * Q2[0] * Q2[2]:
        return False
    R1, g1 = _reduce(Q1)
    R2, g2 = _reduce(Q2)
    if R1 != R2:
        return False
    # Q1 o g1 = R = Q2 o g2, so x = g1 u g2^-1 with u in Aut(R)
    for u in _automorphisms(R1):
        x = _mul(_mul(g1, u), _inv(g2))
        if x[1][0] % N == 0:
            return True
    return False


def _class_reps(N: int, disc: int):
    """Gamma0(N)-classes of forms [a, b, c] of discriminant disc with N | a."""
    reps = []
    for R in reduced_forms(disc):
        auts = _automorphisms(R)
        found = []
        for g in _p1_reps(N):
            Q = _act(R, g)
            if Q[0] % N:
                continue
            dup = False
            for h in found:
                # Q o x = R o h for x in Gamma0(N)?  x = g^-1 u h with u in Aut(R)
                for u in auts:
                    x = _mul(_mul(_inv(g), u), h)
                    if x[1][0] % N == 0:
                        dup = True
                        break
                if dup:
                    break
            if not dup:
                found.append(g)
                reps.append(_act(R, g))
    return reps


def enumerate_poles(f: VVForm, n, N: Optional[int] = None) -> List[HeegnerPoint]:
    """CM points for the exponent -n: one per Gamma0(N)-class of forms (N A, B, C)
    of discriminant -4Nn whose class B mod 2N carries a non-zero coefficient."""
    N = f.N if N is None else N
    n = Fraction(n)
    disc = -4 * N * n
    if disc.denominator != 1:
        raise ValueError("4Nn must be an integer")
    disc = int(disc)
    if disc % 4 not in (0, 1):
        return []
    coeffs = {}
    for d in range(2 * N):
        comp = f.component(d)
        if -n < comp.prec:
            c = comp[-n]
            if c:
                coeffs[d] = c
    if not coeffs:
        return []
    out = []
    for a, b, c in _class_reps(N, disc):
        gamma = b % (2 * N)
        if gamma in coeffs:
            out.append(HeegnerPoint(N, n, a // N, b, c, gamma, coeffs[gamma]))
    return out


@dataclass(frozen=True)
class PoleData:
    """lead = rat * sqrt(radicand) * pi^pi_power, times i when ``imaginary``.

    ``literal_rat`` is the same quantity under the uncorrected normalization
    (alpha^2 = n and (4 pi)^(m+1)); at level one the true lead is
    2^(2m+1) times it.  ``verified`` is False where that factor is unchecked.
    """

    point: HeegnerPoint
    order: int
    rat: Fraction
    radicand: int
    pi_power: int
    contributions: Tuple[Tuple[int, Fraction], ...]
    imaginary: bool = False
    literal_rat: Fraction = Fraction(0)
    verified: bool = True

    def value(self) -> complex:
        return self._val(self.rat)

    def literal_value(self) -> complex:
        return self._val(self.literal_rat)

    def _val(self, r: Fraction) -> complex:
        v = float(r) * math.sqrt(self.radicand) * math.pi ** self.pi_power
        return 1j * v if self.imaginary else complex(v)

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "order": self.order,
                "lead": {"rat": str(self.rat), "radicand": self.radicand,
                         "pi_power": self.pi_power, "imaginary": self.imaginary,
                         "verified": self.verified},
                "literal_lead_rat": str(self.literal_rat),
                "contributions": [[k, str(c)] for k, c in self.contributions]}


def _split_sqrt(x: Fraction) -> Tuple[Fraction, int]:
    """Write sqrt(x) = r sqrt(s) with r rational and s a squarefree integer."""
    if x < 0:
        raise ValueError("negative radicand")
    if x == 0:
        return Fraction(0), 1
    num = x.numerator * x.denominator
    s = 1
    r = 1
    from .classical import factorize
    for p, e in factorize(num).items():
        r *= p ** (e // 2)
        if e % 2:
            s *= p
    return Fraction(r, x.denominator), s


def principal_part(f: VVForm, m: int, N: int, point: HeegnerPoint) -> PoleData:
    """Leading coefficient lim (tau - sigma)^(m+1) (tau - conj sigma)^(m+1) G(tau).

    The literal closed form is

        i/(4 pi)^(m+1) sum_k c_k (alpha_k/beta)^m m! (2 i t)^(m+1)

    with alpha_k^2 = k^2 n0 the norm of k lambda_0, beta = sqrt(N), t = Im sigma.
    Against the closed-form evaluation at level one the true lead is
    2^(2m+1) times this, i.e. alpha^2 is the plus-space index 4 k^2 n0 and
    the denominator is (2 pi)^(m+1).  That factor is applied for N = 1 only.
    """
    if _weight_m(f) != m:
        raise WeightMismatch("m does not match the weight of f")
    g, A0, B0, C0 = point.primitive
    n0 = Fraction(4 * N * A0 * C0 - B0 * B0, 4 * N)
    pp = f.principal_part()
    deepest = max((n for (_, n) in pp), default=Fraction(0))
    contributions = []
    k = 1
    while k * k * n0 <= deepest:
        c = pp.get((k * B0 % (2 * N), k * k * n0), Fraction(0))
        if c:
            contributions.append((k, c))
        k += 1
    if not contributions:
        raise NotAPole("all contributions vanish")
    ysq = point.ysq
    # sum c_k (k^2 n0 / N)^(m/2)
    ratio = n0 / N
    if m % 2 == 0:
        S = sum((c * Fraction(k) ** m for k, c in contributions), Fraction(0)) * ratio ** (m // 2)
        # i * (2 i t)^(m+1) = i^(m+2) 2^(m+1) t^(m+1);  t^(m+1) = ysq^(m/2) sqrt(ysq)
        sign = 1 if (m + 2) % 4 == 0 else -1
        r0, rad = _split_sqrt(ysq)
        rat = sign * 2 ** (m + 1) * math.factorial(m) * S * ysq ** (m // 2) * r0 / 4 ** (m + 1)
        return _pole(point, m, rat, rad, contributions, False)
    S = sum((c * Fraction(k) ** m for k, c in contributions), Fraction(0)) * ratio ** ((m - 1) // 2)
    r0, rad = _split_sqrt(ratio)
    # i^(m+2) = +-i for odd m
    sign = 1 if (m + 2) % 4 == 1 else -1
    rat = sign * 2 ** (m + 1) * math.factorial(m) * S * r0 * ysq ** ((m + 1) // 2) / 4 ** (m + 1)
    return _pole(point, m, rat, rad, contributions, True)


def _pole(point, m, literal, rad, contributions, imaginary) -> PoleData:
    verified = point.N == 1
    rat = literal * 2 ** (2 * m + 1) if verified else literal
    return PoleData(point, m + 1, rat, rad, -(m + 1), tuple(contributions),
                    imaginary, literal, verified)


@dataclass
class LiftResult:
    m: int
    N: int
    positive_part: QExpansion
    poles: List[PoleData]
    constant: Optional[Fraction] = None
    constant_known: bool = True

    def to_json(self) -> dict:
        return {
            "m": self.m, "N": self.N,
            "positive_part": self.positive_part.to_json(),
            "constant": "UNKNOWN" if not self.constant_known else str(self.constant),
            "poles": [p.to_json() for p in self.poles],
        }


def lift(f: VVForm, prec: int) -> LiftResult:
    """Positive part together with the pole catalogue of every negative exponent."""
    m = _weight_m(f)
    N = f.N
    pos = lift_positive_part(f, prec)
    exps = sorted({n for (_, n) in f.principal_part()})
    poles = []
    seen = set()
    for n in exps:
        for pt in enumerate_poles(f, n, N):
            key = (pt.primitive[1:], )
            # fold the ladder: one pole per primitive lambda_0
            if key in seen:
                continue
            seen.add(key)
            poles.append(principal_part(f, m, N, pt))
    if m == 0:
        return LiftResult(m, N, pos, poles, None, False)
    return LiftResult(m, N, pos + QExpansion.zero(1, prec + 1), poles, Fraction(0), True)


# level-one modular forms and pole-clearing certificates

def level_one_basis(k: int, prec: int) -> List[Tuple[Tuple[int, int, int], QExpansion]]:
    """Monomials E4^a E6^b Delta^l (b in {0, 1}) spanning M_k, one per dimension."""
    out = []
    if k < 0 or k % 2:
        return out
    e4, e6, dl = eisenstein(4, prec), eisenstein(6, prec), discriminant_form(prec)
    l = 0
    while 12 * l <= k:
        rest = k - 12 * l
        for b in (0, 1):
            r = rest - 6 * b
            if r >= 0 and r % 4 == 0:
                a = r // 4
                out.append(((a, b, l), (e4 ** a) * (e6 ** b) * (dl ** l)))
                break
        l += 1
    return out


@dataclass
class ModularFormCertificate:
    """G * E4^a * E6^b = sum coords[label] * E4^i E6^j Delta^l in M_weight."""

    m: int
    a: int
    b: int
    weight: int
    coordinates: Dict[Tuple[int, int, int], Fraction]
    checked_to: int

    def evaluate(self, tau: complex) -> complex:
        """Numerical value of G at tau from the certified closed form."""
        e4, e6, dl = eval_eisenstein(4, tau), eval_eisenstein(6, tau), eval_delta(tau)
        num = sum(float(c) * e4 ** i * e6 ** j * dl ** l
                  for (i, j, l), c in self.coordinates.items())
        return num / (e4 ** self.a * e6 ** self.b)

    def to_json(self) -> dict:
        return {"multiplier": {"E4": self.a, "E6": self.b}, "weight": self.weight,
                "coordinates": [[list(k), str(v)] for k, v in sorted(self.coordinates.items())],
                "checked_to": self.checked_to}


def _j_class(pt: HeegnerPoint) -> int:
    g, A0, B0, C0 = pt.primitive
    a, b, c = pt.N * A0, B0, C0
    d0 = b * b - 4 * a * c
    gg = math.gcd(math.gcd(a, b), c)
    d0 //= gg * gg
    return d0


def clear_poles_certificate(G: QExpansion, poles: Sequence[PoleData], m: int,
                            prec: Optional[int] = None) -> ModularFormCertificate:
    """Multiply G by E4^a E6^b to clear the poles and certify the product in M_k."""
    a = b = 0
    for p in poles:
        if p.point.N != 1:
            raise IrrationalJ("certificates are implemented for level one only")
        d0 = _j_class(p.point)
        if d0 == -3:
            a += p.order
        elif d0 == -4:
            b += p.order
        else:
            raise IrrationalJ(f"pole of discriminant {d0} has irrational or unsupported j")
    weight = 2 * m + 2 + 4 * a + 6 * b
    if prec is None:
        prec = int(G.prec) if G.prec != math.inf else weight // 12 + 2
    sturm = weight // 12 + 1
    if prec < sturm + 1:
        raise ValueError(f"need at least {sturm + 1} coefficients, have {prec}")
    P = G * (eisenstein(4, prec) ** a) * (eisenstein(6, prec) ** b)
    P = P.truncate(prec)
    basis = level_one_basis(weight, prec)
    if P.valuation < 0:
        raise NotModular(int(P.valuation), Fraction(0), P[P.valuation])
    rows = [[s.scaled_coeff(e) for e in range(prec)] for _, s in basis]
    red, piv, trans = rref(rows, prec)
    # solve using pivot coefficients, then compare every coefficient
    coords_red = [P.scaled_coeff(c) for c in piv]
    combo = [Fraction(0)] * len(basis)
    for x, t in zip(coords_red, trans):
        for i, ti in enumerate(t):
            combo[i] += x * ti
    recon = [sum((combo[i] * rows[i][e] for i in range(len(basis))), Fraction(0))
             for e in range(prec)]
    for e in range(prec):
        if recon[e] != P.scaled_coeff(e):
            raise NotModular(e, recon[e], P.scaled_coeff(e))
    coords = {lab: c for (lab, _), c in zip(basis, combo) if c}
    return ModularFormCertificate(m, a, b, weight, coords, prec)
