"""Classical arithmetic and level-one q-expansions.

Bernoulli numbers, divisor sums, Kronecker symbols, generalized Bernoulli
numbers, the Cohen numbers H(2, n) and the standard q-series E_k, Delta,
theta and j, all exact.  A few float evaluators are provided for the
numerical pole checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, List, Tuple

from .qexact import QExpansion

__all__ = [
    "bernoulli", "bernoulli_poly", "factorize", "divisors", "sigma", "sigma_table",
    "mobius", "kronecker", "fundamental_discriminant", "Character",
    "generalized_bernoulli", "l_value_negative", "cohen_h2", "eisenstein",
    "discriminant_form", "jacobi_theta", "cohen_eisenstein_5_2", "j_invariant",
    "odd_sigma_series", "eval_eisenstein", "eval_delta",
]


@lru_cache(maxsize=None)
def _bernoulli_list(n: int) -> Tuple[Fraction, ...]:
    # Akiyama-Tanigawa, second convention (B_1 = +1/2)
    a = [Fraction(0)] * (n + 1)
    out = []
    for m in range(n + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return tuple(out)


def bernoulli(k: int) -> Fraction:
    """B_k with the convention B_1 = -1/2."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 1:
        return Fraction(-1, 2)
    return _bernoulli_list(k)[k]


def bernoulli_poly(k: int, x) -> Fraction:
    x = Fraction(x)
    return sum((comb(k, j) * bernoulli(j) * x ** (k - j) for j in range(k + 1)), Fraction(0))


def factorize(n: int) -> Dict[int, int]:
    if n == 0:
        raise ValueError("cannot factor 0")
    n = abs(n)
    out: Dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def divisors(n: int) -> List[int]:
    ds = [1]
    for p, e in factorize(n).items():
        ds = [d * p ** i for d in ds for i in range(e + 1)]
    return sorted(ds)


def sigma(n: int, k: int) -> int:
    return sum(d ** k for d in divisors(n))


def sigma_table(k: int, n: int) -> List[int]:
    """[sigma_k(0)=0, sigma_k(1), ..., sigma_k(n-1)] by a divisor sieve."""
    out = [0] * n
    for d in range(1, n):
        dk = d ** k
        for m in range(d, n, d):
            out[m] += dk
    return out


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def kronecker(a: int, n: int) -> int:
    """The Kronecker symbol (a/n)."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if a % 2 == 0 and n % 2 == 0:
        return 0
    s = 1
    if n < 0:
        n = -n
        if a < 0:
            s = -s
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2 and a % 8 in (3, 5):
        s = -s
    # Jacobi symbol (a/n) for odd n > 0
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                s = -s
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            s = -s
        a %= n
    return s if n == 1 else 0


def fundamental_discriminant(n: int) -> Tuple[int, int]:
    """Write a discriminant n = D f^2 with D fundamental (D = 1 for squares)."""
    if n == 0 or n % 4 not in (0, 1):
        raise ValueError(f"{n} is not a non-zero discriminant")
    core = 1 if n > 0 else -1
    for p, e in factorize(n).items():
        if e % 2:
            core *= p
    D = core if core % 4 == 1 else 4 * core
    f2 = n // D
    f = math.isqrt(f2)
    if f * f != f2:
        raise AssertionError("discriminant decomposition failed")
    return D, f


@dataclass(frozen=True)
class Character:
    """The quadratic character n -> (D/n) of a fundamental discriminant D."""

    D: int

    def __call__(self, n: int) -> int:
        return kronecker(self.D, n)

    @property
    def modulus(self) -> int:
        return abs(self.D)


@lru_cache(maxsize=None)
def generalized_bernoulli(k: int, D: int) -> Fraction:
    """B_{k,chi_D} = |D|^(k-1) sum_{a=1}^{|D|} chi_D(a) B_k(a/|D|)."""
    f = abs(D)
    chi = Character(D)
    s = sum((chi(a) * bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1)), Fraction(0))
    return f ** (k - 1) * s


def l_value_negative(k: int, D: int) -> Fraction:
    """L(1 - k, chi_D) = -B_{k,chi_D} / k."""
    return -generalized_bernoulli(k, D) / k


def cohen_h2(n: int) -> Fraction:
    """Cohen's number H(2, n)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return Fraction(1, 120)  # zeta(-3)
    if n % 4 in (2, 3):
        return Fraction(0)
    D, f = fundamental_discriminant(n)
    chi = Character(D)
    s = sum(mobius(d) * chi(d) * d * sigma(f // d, 3) for d in divisors(f))
    return l_value_negative(2, D) * s


def eisenstein(k: int, prec: int) -> QExpansion:
    """Normalized E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, known to O(q^prec)."""
    if k < 2 or k % 2:
        raise ValueError("weight must be even and at least 2")
    c = Fraction(-2 * k) / bernoulli(k)
    sig = sigma_table(k - 1, prec)
    coeffs = {n: c * sig[n] for n in range(1, prec)}
    coeffs[0] = 1
    return QExpansion(coeffs, 1, prec)


def discriminant_form(prec: int) -> QExpansion:
    """Delta = (E4^3 - E6^2) / 1728."""
    e4, e6 = eisenstein(4, prec), eisenstein(6, prec)
    return (e4 ** 3 - e6 * e6).scale(Fraction(1, 1728))


def jacobi_theta(prec: int) -> QExpansion:
    """theta = sum over n in Z of q^(n^2)."""
    c = {0: 1}
    n = 1
    while n * n < prec:
        c[n * n] = 2
        n += 1
    return QExpansion(c, 1, prec)


def odd_sigma_series(prec: int) -> QExpansion:
    """F = sum over odd n of sigma_1(n) q^n, weight 2 on Gamma0(4)."""
    sig = sigma_table(1, prec)
    return QExpansion({n: sig[n] for n in range(1, prec, 2)}, 1, prec)


def cohen_eisenstein_5_2(prec: int) -> QExpansion:
    """H_{5/2} = 120 sum H(2, n) q^n."""
    return QExpansion({n: 120 * cohen_h2(n) for n in range(prec)}, 1, prec)


def j_invariant(prec: int) -> QExpansion:
    """j = E4^3 / Delta, known to O(q^prec)."""
    e4 = eisenstein(4, prec + 1)
    return (e4 ** 3) * discriminant_form(prec + 2).invert()


# float evaluation, used only by the numerical checks

def _qnum(tau: complex) -> complex:
    return cmath.exp(2j * math.pi * tau)


def eval_eisenstein(k: int, tau: complex, terms: int | None = None) -> complex:
    qv = _qnum(tau)
    if terms is None:
        terms = _terms_for(abs(qv))
    c = -2 * k / float(bernoulli(k))
    sig = sigma_table(k - 1, terms)
    total = 0j
    qn = 1 + 0j
    for n in range(1, terms):
        qn *= qv
        total += sig[n] * qn
    return 1 + c * total


def eval_delta(tau: complex, terms: int | None = None) -> complex:
    """Delta via its product expansion q prod (1 - q^n)^24."""
    qv = _qnum(tau)
    if terms is None:
        terms = _terms_for(abs(qv))
    prod = 1 + 0j
    qn = 1 + 0j
    for _ in range(1, terms):
        qn *= qv
        prod *= (1 - qn)
    return qv * prod ** 24


def _terms_for(r: float) -> int:
    if r >= 1:
        raise ValueError("tau must lie in the upper half plane")
    return max(10, int(60 / max(-math.log(r), 1e-3)) + 10)
