"""Weakly holomorphic plus forms, obstructions and relations among Heegner classes.

Holomorphic forms of weight k + 1/2 on Gamma0(4) are spanned by
theta^(2k+1-4j) F^j with F = sum_{n odd} sigma_1(n) q^n.  The plus space is
cut out by vanishing of the coefficients in the wrong classes mod 4.
Weakly holomorphic plus forms of weight 1/2 - m with poles of order at
most 4K are M^+_{1/2-m+12K} / Delta(4 tau)^K.  The obstruction space is
the cuspidal plus space of weight 3/2 + m; a principal part occurs iff it
pairs to zero against all of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Mapping, Sequence, Tuple

from ._linalg import rank, rref
from .classical import (cohen_eisenstein_5_2, discriminant_form, eisenstein,
                        jacobi_theta, odd_sigma_series)
from .qexact import QExpansion, linear_combination
from .weil import PlusForm, VVForm, plus_to_vv

__all__ = [
    "dim_modular", "dim_cusp", "gamma0_4_generators", "plus_space_basis",
    "plus_space_basis_kohnen", "cusp_plus_basis", "basis_weakly_holomorphic",
    "form_with_pole", "Obstructed", "PrincipalPartSpec", "serre_pairing",
    "obstruction_test", "relation_lattice", "RelationSystem", "admissible_poles",
]


class Obstructed(ValueError):
    """No weakly holomorphic form with the requested principal part exists."""

    def __init__(self, n: int, pairings: List[Fraction]):
        self.n = n
        self.pairings = pairings
        super().__init__(f"q^-{n} is obstructed: pairings {[str(p) for p in pairings]}")


def dim_modular(k: int) -> int:
    """dim M_k(SL2(Z))."""
    if k < 0 or k % 2:
        return 0
    if k % 12 == 2:
        return k // 12
    return k // 12 + 1


def dim_cusp(k: int) -> int:
    if k < 0 or k % 2:
        return 0
    if k == 0:
        return 0
    return max(dim_modular(k) - 1, 0)


def _kohnen_bad(n: int, k: int) -> bool:
    return (n if k % 2 == 0 else -n) % 4 in (2, 3)


def admissible_poles(m: int, n_max: int) -> List[int]:
    """Plus-space pole orders n (principal part q^-n) for weight 1/2 - m, m even."""
    if m % 2:
        raise ValueError("m must be even for N = 1")
    return [n for n in range(1, n_max + 1) if (-n) % 4 in (0, 1)]


def gamma0_4_generators(k: int, prec: int) -> List[QExpansion]:
    """theta^(2k+1-4j) F^j, j = 0 .. floor(k/2): a basis of M_{k+1/2}(Gamma0(4))."""
    if k < 0:
        return []
    th = jacobi_theta(prec)
    f = odd_sigma_series(prec)
    th4 = th ** 4
    jmax = k // 2
    fp = [QExpansion({0: 1}, 1, prec)]
    for _ in range(jmax):
        fp.append(fp[-1] * f)
    # walk down from the largest F power so that theta powers grow by theta^4
    out = []
    tpow = th ** (2 * k + 1 - 4 * jmax)
    for j in range(jmax, -1, -1):
        out.append(tpow * fp[j])
        tpow = tpow * th4
    out.reverse()
    return out


def _sturm_plus(k: int) -> int:
    # Sturm bound on Gamma0(16), where the residue-class projections live
    return 2 * k + 3


def _echelon_series(series: List[QExpansion]) -> List[QExpansion]:
    """Row reduce a list of series (by increasing exponent) and drop zeros."""
    if not series:
        return []
    keys = sorted({e for s in series for e, _ in s.items()})
    rows = [[s.scaled_coeff(e) if e < s.scaled_prec else Fraction(0) for e in keys] for s in series]
    red, piv, _ = rref(rows, len(keys))
    prec = min(s.scaled_prec for s in series)
    den = series[0].den
    return [QExpansion({e: v for e, v in zip(keys, r) if v}, den, prec) for r in red]


@lru_cache(maxsize=64)
def _plus_combinations(k: int) -> Tuple[Tuple[Fraction, ...], ...]:
    """Coefficient vectors (over the theta/F generators) of an echelon plus basis."""
    bound = _sturm_plus(k)
    gens = gamma0_4_generators(k, bound)
    bad = [n for n in range(bound) if _kohnen_bad(n, k)]
    # nullspace of the condition matrix: columns = generators
    cond = [[g.scaled_coeff(n) for g in gens] for n in bad]
    ncols = len(gens)
    red, piv, _ = rref(cond, ncols) if cond else ([], [], [])
    free = [c for c in range(ncols) if c not in piv]
    vecs = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in zip(red, piv):
            v[pc] = -r[fc]
        vecs.append(v)
    # echelonize by q-expansion so the result does not depend on generator order
    expans = [[sum((x * g.scaled_coeff(n) for x, g in zip(v, gens)), Fraction(0))
               for n in range(bound)] for v in vecs]
    if not vecs:
        return ()
    red2, _, trans = rref(expans, bound)
    out = []
    for t in trans:
        out.append(tuple(sum((t[i] * vecs[i][c] for i in range(len(vecs))), Fraction(0))
                         for c in range(ncols)))
    return tuple(out)


def _combine(coeffs: Sequence[Fraction], gens: Sequence[QExpansion]) -> QExpansion:
    return linear_combination(coeffs, gens)


def plus_space_basis(k: int, prec: int) -> List[QExpansion]:
    """Echelon basis of M^+_{k+1/2}(Gamma0(4)) known to O(q^prec)."""
    combos = _plus_combinations(k)
    if not combos:
        return []
    gens = gamma0_4_generators(k, prec)
    return [_combine(c, gens) for c in combos]


def plus_space_basis_kohnen(k: int, prec: int) -> List[QExpansion]:
    """Independent construction: M_*(4 tau) theta + M_*(4 tau) H_{5/2} (k even)."""
    if k % 2:
        raise ValueError("this construction covers even k")
    th = jacobi_theta(prec)
    h = cohen_eisenstein_5_2(prec)
    p4 = (prec + 3) // 4 + 1
    e4 = eisenstein(4, p4).rescale(4).truncate(prec)
    e6 = eisenstein(6, p4).rescale(4).truncate(prec)
    out = []
    for base, w in ((th, 0), (h, 2)):
        rest = k - w
        if rest < 0 or rest % 2:
            continue
        for a in range(rest // 4 + 1):
            r = rest - 4 * a
            if r % 6 == 0:
                out.append(base * (e4 ** a) * (e6 ** (r // 6)))
    return _echelon_series(out)


def cusp_plus_basis(k: int, prec: int) -> List[QExpansion]:
    """Echelon basis of the cuspidal plus space of weight k + 1/2."""
    full = plus_space_basis(k, max(prec, _sturm_plus(k)))
    cusp = [f for f in full if f.valuation > 0]
    non = [f for f in full if f.valuation == 0]
    if len(non) > 1:
        raise AssertionError("echelon basis has two forms with constant term")
    return [f.truncate(prec) for f in cusp]


@dataclass
class _WHData:
    m: int
    K: int
    k: int
    poles: Tuple[int, ...]              # leading pole order of each echelon form
    principal: Tuple[Tuple[Tuple[int, Fraction], ...], ...]
    combos: Tuple[Tuple[Fraction, ...], ...]


@lru_cache(maxsize=32)
def _wh_data(m: int, K: int) -> _WHData:
    k = 12 * K - m
    if k < 0:
        return _WHData(m, K, k, (), (), ())
    plus = _plus_combinations(k)
    low = 4 * K + 1
    gens = gamma0_4_generators(k, low)
    inv = _delta4_inverse_power(K, 1)
    forms = [_combine(c, gens) * inv for c in plus]
    # columns: exponents -4K .. 0 of the quotient
    rows = [[f.scaled_coeff(n - 4 * K) for n in range(low)] for f in forms]
    if not rows:
        return _WHData(m, K, k, (), (), ())
    red, piv, trans = rref(rows, low)
    combos = []
    principal = []
    poles = []
    for r, p, t in zip(red, piv, trans):
        c = tuple(sum((t[i] * plus[i][j] for i in range(len(plus))), Fraction(0))
                  for j in range(len(gens)))
        combos.append(c)
        poles.append(4 * K - p)
        principal.append(tuple((4 * K - n, r[n]) for n in range(low) if r[n] and n < 4 * K))
    return _WHData(m, K, k, tuple(poles), tuple(principal), tuple(combos))


def _K_for(m: int, max_pole: int) -> int:
    return max(math.ceil(max_pole / 4), math.ceil(m / 12), 1)


def _delta4_inverse_power(K: int, prec: int) -> QExpansion:
    """Delta(4 tau)^-K known to O(q^prec)."""
    p = -(-prec // 4)
    d = discriminant_form(p + K + 1)
    inv = d.invert() ** K
    return inv.truncate(p).rescale(4).truncate(prec)


def _evaluate(m: int, K: int, combo: Sequence[Fraction], prec: int) -> QExpansion:
    k = 12 * K - m
    gens = gamma0_4_generators(k, prec + 4 * K)
    num = _combine(combo, gens)
    return (num * _delta4_inverse_power(K, prec)).truncate(prec)


def basis_weakly_holomorphic(m: int, max_pole: int, prec: int = 20, N: int = 1) -> List[PlusForm]:
    """Echelon basis of weakly holomorphic plus forms of weight 1/2 - m.

    Forms are ordered by pole order; each has a distinct leading term
    q^-n and is reduced against the others' leading terms.
    """
    if N != 1:
        raise NotImplementedError("only N = 1 is implemented")
    if m % 2 or m < 0:
        raise ValueError("m must be even and non-negative for N = 1")
    K = _K_for(m, max_pole)
    data = _wh_data(m, K)
    out = []
    for n, pp, c in zip(data.poles, data.principal, data.combos):
        if n > max_pole:
            continue
        s = _evaluate(m, K, c, prec)
        out.append(PlusForm(Fraction(1, 2) - m, s, {"m": m, "pole": n}))
    out.sort(key=lambda f: f.meta["pole"])
    return out


def _obstruction_pairings(m: int, n: int, basis: List[QExpansion]) -> List[Fraction]:
    return [b.scaled_coeff(n) for b in basis]


def form_with_pole(m: int, n: int, prec: int = 20) -> PlusForm:
    """The unique form q^-n + O(1) of weight 1/2 - m, or raise Obstructed."""
    K = _K_for(m, n)
    data = _wh_data(m, K)
    # e_n is in the row space iff it reduces to zero against the echelon rows
    for pole, pp, c in zip(data.poles, data.principal, data.combos):
        if pole == n:
            if dict(pp) == {n: Fraction(1)}:
                s = _evaluate(m, K, c, prec)
                return PlusForm(Fraction(1, 2) - m, s, {"m": m, "pole": n})
            break
    obs = cusp_plus_basis(m + 1, n + 1)
    raise Obstructed(n, _obstruction_pairings(m, n, obs))


# principal parts and the Serre pairing

@dataclass(frozen=True)
class PrincipalPartSpec:
    """Multiplicities of q^(-n) e_gamma, keyed by (gamma, n) with n > 0."""

    N: int
    terms: Tuple[Tuple[Tuple[int, Fraction], Fraction], ...]

    @classmethod
    def from_dict(cls, N: int, d: Mapping[Tuple[int, object], object]) -> "PrincipalPartSpec":
        items = []
        for (g, n), c in sorted(d.items(), key=lambda kv: (kv[0][0], Fraction(kv[0][1]))):
            g %= 2 * N
            n = Fraction(n)
            if n <= 0:
                raise ValueError("principal part exponents must be positive")
            if (-n - Fraction(g * g, 4 * N)) % 1:
                raise ValueError(f"q^-{n} e_{g} is not on the exponent lattice")
            if Fraction(c):
                items.append(((g, n), Fraction(c)))
        return cls(N, tuple(items))

    @classmethod
    def from_plus(cls, d: Mapping[int, object]) -> "PrincipalPartSpec":
        """From a scalar principal part {n: c} meaning c q^-n (N = 1)."""
        return cls.from_dict(1, {(n % 2, Fraction(n, 4)): c for n, c in d.items()})

    def as_dict(self) -> Dict[Tuple[int, Fraction], Fraction]:
        return dict(self.terms)


def serre_pairing(a: PrincipalPartSpec, b) -> Fraction:
    """sum over (gamma, n) of a(gamma, n) b(gamma, n) for b of dual type."""
    if isinstance(b, PlusForm):
        b = plus_to_vv(b)
    if not isinstance(b, VVForm):
        raise TypeError("pairing needs a vector-valued or plus form")
    if b.N != a.N:
        raise ValueError("lattice mismatch")
    return sum((c * b.coefficient(g, n) for (g, n), c in a.terms), Fraction(0))


def obstruction_test(a: PrincipalPartSpec, m: int) -> Tuple[bool, List[Fraction]]:
    """Return (unobstructed, pairings against a basis of the cusp plus space)."""
    top = max((n for (_, n), _ in a.terms), default=Fraction(0))
    prec = int(top * 4) + 1
    basis = [PlusForm(Fraction(3, 2) + m, f) for f in cusp_plus_basis(m + 1, prec)]
    pairings = [serre_pairing(a, b) for b in basis]
    return all(p == 0 for p in pairings), pairings


# relations among generators y_n

@dataclass
class RelationSystem:
    m: int
    n_max: int
    generators: List[int]
    relations: List[List[int]]
    rank: int
    quotient_rank: int
    obstruction_dim: int
    dim_cusp_2m_plus_2: int
    dim_cusp_alternative: int
    meta: Dict[str, object] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "m": self.m, "n_max": self.n_max, "generators": self.generators,
            "relation_rows": self.relations, "rank": self.rank,
            "quotient_rank": self.quotient_rank,
            "obstruction_dim": self.obstruction_dim,
            "dim_S_2m_plus_2": self.dim_cusp_2m_plus_2,
            "dim_S_m_minus_2_plus_S_m_minus_4": self.dim_cusp_alternative,
        }


def _primitive(row: List[Fraction]) -> List[int]:
    d = 1
    for x in row:
        d = d * x.denominator // math.gcd(d, x.denominator)
    ints = [int(x * d) for x in row]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    g = g or 1
    lead = next((x for x in ints if x), 1)
    s = -1 if lead < 0 else 1
    return [s * x // g for x in ints]


def relation_lattice(m: int, n_max: int) -> RelationSystem:
    """Relations among the generators y_n (n <= n_max) coming from principal parts."""
    gens = admissible_poles(m, n_max)
    K = _K_for(m, n_max)
    data = _wh_data(m, K)
    rows = []
    for pole, pp in zip(data.poles, data.principal):
        if pole > n_max:
            continue
        d = dict(pp)
        rows.append(_primitive([Fraction(d.get(n, 0)) for n in gens]))
    r = rank(rows) if rows else 0
    obs = len(cusp_plus_basis(m + 1, 1))
    return RelationSystem(m, n_max, gens, rows, r, len(gens) - r, obs,
                          dim_cusp(2 * m + 2), dim_cusp(m - 2) + dim_cusp(m - 4))
