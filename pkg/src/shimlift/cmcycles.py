"""Fundamental classes of generic and CM cycles on Abelian surfaces with QM, split case exact.

Coordinates: a point of C^2 is M (tau, 1)^T for M = (a b; c d) in M2(R), so
a, b, c, d are real 1-forms and dz1 = a tau + b, dz2 = c tau + d.  2-forms are
6-vectors over the ordered basis (a^b, a^c, a^d, b^c, b^d, c^d).  The split
Eichler order of level N is {(a b; c d) in M2(Z) : N | c}, with disc N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from ._linalg import integer_kernel
from .classical import factorize

__all__ = [
    "QuadElem", "WedgeForm", "FundamentalClass", "iota", "itilde", "cup",
    "fundamental_class", "cycform_class", "line_lattice", "is_cm_point",
    "classify_slope", "find_gamma", "j_factor", "mobius", "J_matrix",
    "NotTraceless", "SlopeMismatch", "DegenerateGamma", "UnsupportedAlgebra",
    "NoSolution", "INF", "WEDGE_BASIS",
]

WEDGE_BASIS = ("ab", "ac", "ad", "bc", "bd", "cd")
INF = "inf"


class NotTraceless(ValueError):
    pass


class SlopeMismatch(ValueError):
    pass


class DegenerateGamma(ValueError):
    pass


class UnsupportedAlgebra(ValueError):
    pass


class NoSolution(ValueError):
    pass


def _squarefree(d: int) -> Tuple[int, int]:
    """d = f^2 d0 with d0 squarefree; returns (d0, f)."""
    if d == 0:
        raise ValueError("d must be non-zero")
    sgn = -1 if d < 0 else 1
    d0, f = 1, 1
    for p, e in factorize(abs(d)).items():
        f *= p ** (e // 2)
        if e % 2:
            d0 *= p
    return sgn * d0, f


class QuadElem:
    """u + v sqrt(d) with u, v rational and d squarefree (d = 1 means v = 0)."""

    __slots__ = ("u", "v", "d")

    def __init__(self, u=0, v=0, d: int = 1):
        u, v = Fraction(u), Fraction(v)
        d0, f = _squarefree(d)
        v *= f
        if d0 == 1:
            u, v = u + v, Fraction(0)
        self.u, self.v, self.d = u, v, d0

    @staticmethod
    def coerce(x, d: int = 1) -> "QuadElem":
        if isinstance(x, QuadElem):
            return x
        return QuadElem(x, 0, d)

    def _field(self, other: "QuadElem") -> int:
        if self.v == 0:
            return other.d
        if other.v == 0 or other.d == self.d:
            return self.d
        raise ValueError(f"elements of Q(sqrt {self.d}) and Q(sqrt {other.d}) do not mix")

    def __add__(self, other):
        other = QuadElem.coerce(other)
        return QuadElem(self.u + other.u, self.v + other.v, self._field(other))

    __radd__ = __add__

    def __neg__(self):
        return QuadElem(-self.u, -self.v, self.d)

    def __sub__(self, other):
        return self + (-QuadElem.coerce(other))

    def __rsub__(self, other):
        return QuadElem.coerce(other) - self

    def __mul__(self, other):
        other = QuadElem.coerce(other)
        d = self._field(other)
        return QuadElem(self.u * other.u + self.v * other.v * d,
                        self.u * other.v + self.v * other.u, d)

    __rmul__ = __mul__

    def conj(self) -> "QuadElem":
        return QuadElem(self.u, -self.v, self.d)

    def norm(self) -> Fraction:
        return self.u * self.u - self.d * self.v * self.v

    def inverse(self) -> "QuadElem":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in a quadratic field")
        c = self.conj()
        return QuadElem(c.u / n, c.v / n, self.d)

    def __truediv__(self, other):
        return self * QuadElem.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QuadElem.coerce(other) * self.inverse()

    def __eq__(self, other) -> bool:
        try:
            other = QuadElem.coerce(other)
        except TypeError:
            return NotImplemented
        if self.v == 0 and other.v == 0:
            return self.u == other.u
        return (self.u, self.v, self.d) == (other.u, other.v, other.d)

    def __hash__(self):
        return hash((self.u, self.v, self.d if self.v else 1))

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    def real(self) -> "QuadElem":
        """Real part of an element of an imaginary quadratic field."""
        return QuadElem(self.u) if self.d < 0 else self

    def imag(self) -> "QuadElem":
        """Imaginary part v sqrt|d|, an element of the real field Q(sqrt |d|)."""
        if self.d > 0 or self.v == 0:
            if self.d > 0 and self.v:
                raise ValueError("real-field element has no imaginary part")
            return QuadElem(0)
        return QuadElem(0, self.v, -self.d)

    def abs2(self) -> Fraction:
        """|z|^2 for z in an imaginary quadratic field."""
        if self.d > 0 and self.v:
            raise ValueError("not an element of an imaginary quadratic field")
        return self.norm()

    def __float__(self):
        if self.d < 0 and self.v:
            raise TypeError("complex element")
        return float(self.u) + float(self.v) * math.sqrt(self.d)

    def __complex__(self):
        if self.d < 0:
            return complex(float(self.u), float(self.v) * math.sqrt(-self.d))
        return complex(float(self))

    def sign(self) -> int:
        """Exact sign of a real element."""
        if self.d < 0 and self.v:
            raise ValueError("complex element has no sign")
        su = (self.u > 0) - (self.u < 0)
        sv = (self.v > 0) - (self.v < 0)
        if sv == 0 or su == sv:
            return su if su else sv
        if su == 0:
            return sv
        return su if self.u * self.u > self.v * self.v * self.d else sv

    def __repr__(self):
        if self.v == 0:
            return str(self.u)
        return f"{self.u} + {self.v}*sqrt({self.d})"

    def to_json(self):
        if self.v == 0:
            return str(self.u)
        return {"u": str(self.u), "v": str(self.v), "d": self.d}


Mat = Tuple[Tuple[QuadElem, QuadElem], Tuple[QuadElem, QuadElem]]


def _mat(m) -> Mat:
    return tuple(tuple(QuadElem.coerce(x) for x in row) for row in m)  # type: ignore


def _mat_mul(a, b) -> Mat:
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def _det(m) -> QuadElem:
    return m[0][0] * m[1][1] - m[0][1] * m[1][0]


def _mat_inv(m) -> Mat:
    dt = _det(m)
    return ((m[1][1] / dt, -m[0][1] / dt), (-m[1][0] / dt, m[0][0] / dt))


def j_factor(M, tau: QuadElem) -> QuadElem:
    M = _mat(M)
    return M[1][0] * tau + M[1][1]


def mobius(M, tau: QuadElem) -> QuadElem:
    M = _mat(M)
    return (M[0][0] * tau + M[0][1]) / (M[1][0] * tau + M[1][1])


def J_matrix(tau: QuadElem) -> Mat:
    """J_tau = (1/y) (x, -|tau|^2; 1, -x), entries in Q(sqrt |d|)."""
    x, y = tau.real(), tau.imag()
    if y == 0:
        raise ValueError("tau must be non-real")
    iy = 1 / y
    return ((x * iy, -tau.abs2() * iy), (iy, -x * iy))


@dataclass(frozen=True)
class WedgeForm:
    """Coefficients over (a^b, a^c, a^d, b^c, b^d, c^d)."""

    coeffs: Tuple[QuadElem, ...]

    @classmethod
    def make(cls, **terms) -> "WedgeForm":
        """WedgeForm.make(ab=1, dc=2) with any ordering of letters; swapped pairs flip sign."""
        v = [QuadElem(0)] * 6
        for key, c in terms.items():
            i, s = _wedge_index(key)
            v[i] = v[i] + s * QuadElem.coerce(c)
        return cls(tuple(v))

    def __add__(self, other: "WedgeForm") -> "WedgeForm":
        return WedgeForm(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "WedgeForm") -> "WedgeForm":
        return WedgeForm(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def scale(self, c) -> "WedgeForm":
        c = QuadElem.coerce(c)
        return WedgeForm(tuple(c * a for a in self.coeffs))

    def __getitem__(self, key: str) -> QuadElem:
        i, s = _wedge_index(key)
        return s * self.coeffs[i]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def to_json(self) -> dict:
        return {k: c.to_json() for k, c in zip(WEDGE_BASIS, self.coeffs)}


def _wedge_index(key: str) -> Tuple[int, int]:
    if len(key) != 2 or key[0] == key[1]:
        raise ValueError(f"bad wedge key {key!r}")
    s = 1
    if key[0] > key[1]:
        key, s = key[::-1], -1
    return WEDGE_BASIS.index(key), s


def _traceless(b) -> Tuple[QuadElem, QuadElem, QuadElem]:
    b = _mat(b)
    if b[0][0] + b[1][1] != 0:
        raise NotTraceless("argument must have trace zero")
    return b[0][0], b[0][1], b[1][0]


def iota(b) -> WedgeForm:
    """iota(p, q; r, -p) = p (a^d - b^c) + q c^d + r b^a."""
    p, q, r = _traceless(b)
    z = QuadElem(0)
    return WedgeForm((-r, z, p, -p, z, q))


def itilde(b) -> WedgeForm:
    """itilde(p, q; r, -p) = p (d^a + c^b) + q a^c + r d^b."""
    p, q, r = _traceless(b)
    z = QuadElem(0)
    return WedgeForm((z, q, -p, -p, -r, z))


def cup(w1: WedgeForm, w2: WedgeForm, discI) -> QuadElem:
    """discI times the coefficient of a^b^c^d in w1 ^ w2."""
    a1 = dict(zip(WEDGE_BASIS, w1.coeffs))
    a2 = dict(zip(WEDGE_BASIS, w2.coeffs))
    top = (a1["ab"] * a2["cd"] + a1["cd"] * a2["ab"] - a1["ac"] * a2["bd"] - a1["bd"] * a2["ac"]
           + a1["ad"] * a2["bc"] + a1["bc"] * a2["ad"])
    return top * QuadElem.coerce(discI)


@dataclass(frozen=True)
class FundamentalClass:
    """scale * (iota(iota_arg) + itilde(itilde_arg))."""

    scale: QuadElem
    iota_arg: Mat
    itilde_arg: Optional[Mat]
    kind: str

    def form(self) -> WedgeForm:
        w = iota(self.iota_arg)
        if self.itilde_arg is not None:
            w = w + itilde(self.itilde_arg)
        return w.scale(self.scale)

    def normalized(self) -> Optional[WedgeForm]:
        """The transversal itilde part alone."""
        if self.itilde_arg is None:
            return None
        return itilde(self.itilde_arg).scale(self.scale)

    def to_json(self) -> dict:
        def m(a):
            return None if a is None else [[x.to_json() for x in row] for row in a]
        return {"kind": self.kind, "scale": self.scale.to_json(), "iota_arg": m(self.iota_arg),
                "itilde_arg": m(self.itilde_arg), "form": self.form().to_json()}


Slope = Union[QuadElem, Fraction, int, str]


def _is_inf(x) -> bool:
    return isinstance(x, str) and x == INF


def cycform_class(T: Mat, I_dc, discI) -> WedgeForm:
    """Class of a cycle on which (a b) = (c d) T, given the integral of d^c over it."""
    T = _mat(T)
    c = QuadElem.coerce(I_dc) / QuadElem.coerce(discI)
    return WedgeForm.make(ba=1, dc=_det(T), ca=-T[0][1], db=T[1][0],
                          da=-T[1][1], cb=T[0][0]).scale(c)


def line_lattice(tau0: Slope, tau: QuadElem, N: int) -> List[Tuple[QuadElem, QuadElem]]:
    """Basis of the intersection of the level-N Eichler lattice I (tau, 1) with the line C (tau0, 1)."""
    d = tau.d
    if _is_inf(tau0):
        # second coordinate N c tau + d = 0 forces c = d = 0
        vecs = [(QuadElem(1), QuadElem(0)), (tau, QuadElem(0))]
        return vecs
    t0 = QuadElem.coerce(tau0, d)
    # unknowns (a, b, c', dd) with c = N c': a tau + b - t0 (N c' tau + dd) = 0
    cols = [tau, QuadElem(1, 0, d), -(t0 * tau) * N, -t0]
    rows = [[x.u for x in cols], [x.v for x in cols]]
    den = 1
    for r in rows:
        for x in r:
            den = den * x.denominator // math.gcd(den, x.denominator)
    irows = [[int(x * den) for x in r] for r in rows]
    ker = integer_kernel(irows, 4)
    out = []
    for a, b, c1, dd in ker:
        out.append((QuadElem(a) * tau + b, QuadElem(N * c1) * tau + dd))
    return out


def _covolume(ws: Sequence[QuadElem]) -> QuadElem:
    """Covolume of the lattice spanned by complex numbers ws (in an imaginary quadratic field)."""
    if len(ws) != 2:
        raise DegenerateGamma("the line does not meet the lattice in a rank-2 lattice")
    w1, w2 = ws
    # Im(conj(w1) w2)
    z = w1.conj() * w2
    im = z.imag()
    return im if im.sign() >= 0 else -im


def find_gamma(tau: QuadElem, tau0: QuadElem) -> Tuple[Tuple[int, int], Tuple[int, int]]:
    """A primitive integral (a b; 0 d) with gamma tau = tau0; det < 0 when tau0 is in the lower half-plane."""
    if tau.d != tau0.d or tau.d > 0 or tau.v == 0 or tau0.v == 0:
        raise NoSolution("tau and tau0 must be non-real points of one imaginary quadratic field")
    a = tau0.v / tau.v
    b = tau0.u - a * tau.u
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    A, B, D = int(a * den), int(b * den), den
    g = math.gcd(math.gcd(A, B), D)
    return ((A // g, B // g), (0, D // g))


def fundamental_class(tau0: Slope, tau: QuadElem, gamma=None, tau_tilde: Optional[QuadElem] = None,
                      discI=None, N: Optional[int] = None) -> FundamentalClass:
    """Class of the image of the line C (tau0, 1) in A_tau.

    Non-real tau0: scale = det(gamma) Im(tau_tilde) / disc(I), iota_arg = J_(tau0),
    itilde_arg = J_tau; for tau0 in the lower half-plane this is rewritten with
    J_(conj tau0) and -J_tau so that the scale is positive.
    Real or infinite tau0: scale = |j(gamma, tau)|^2 Im(tau_tilde) / (y disc(I)) and
    iota_arg = (x0, -x0^2; 1, -x0), or (0, -1; 0, 0) with |tau0|^2 folded into
    the scale at infinity.

    In the split case (``N`` given) missing gamma, tau_tilde and disc(I) are computed.
    """
    if tau.d >= 0 or tau.v <= 0:
        raise ValueError("tau must lie in the upper half-plane of an imaginary quadratic field")
    if discI is None:
        if N is None:
            raise ValueError("give disc(I) or the Eichler level N")
        discI = N
    discI = QuadElem.coerce(discI)
    y = tau.imag()
    real_slope = _is_inf(tau0) or not isinstance(tau0, QuadElem) or tau0.v == 0
    if gamma is not None:
        g = _mat(gamma)
        if all(x == 0 for row in g for x in row):
            raise DegenerateGamma("gamma is zero")
        _check_slope(g, tau, tau0, real_slope)
    if real_slope:
        return _generic_class(tau0, tau, gamma, tau_tilde, discI, N, y)
    if gamma is None:
        gamma = find_gamma(tau, tau0)
    g = _mat(gamma)
    dg = _det(g)
    if dg == 0:
        raise DegenerateGamma("gamma must be invertible for a non-real slope")
    jv = j_factor(g, tau)
    if tau_tilde is None:
        if N is None:
            raise ValueError("tau_tilde is required outside the split case")
        covol = _covolume([w for _, w in line_lattice(tau0, tau, N)])
        im_tt = covol / jv.abs2()
    else:
        im_tt = tau_tilde.imag()
    scale = dg * im_tt / discI
    if dg.sign() > 0:
        return FundamentalClass(scale, J_matrix(tau0), J_matrix(tau), "cm")
    # tau0 in the lower half-plane: J_(tau0) = -J_(conj tau0)
    return FundamentalClass(-scale, J_matrix(tau0.conj()), _neg(J_matrix(tau)), "cm")


def _neg(m: Mat) -> Mat:
    return tuple(tuple(-x for x in row) for row in m)  # type: ignore


def _check_slope(g: Mat, tau: QuadElem, tau0: Slope, real_slope: bool) -> None:
    num = g[0][0] * tau + g[0][1]
    den = g[1][0] * tau + g[1][1]
    if _is_inf(tau0):
        ok = den == 0 and num != 0
    else:
        ok = den != 0 and num / den == QuadElem.coerce(tau0, tau.d)
    if not ok:
        raise SlopeMismatch("gamma does not take tau to tau0")


def _generic_class(tau0, tau, gamma, tau_tilde, discI, N, y) -> FundamentalClass:
    if gamma is not None and tau_tilde is not None:
        g = _mat(gamma)
        jv = j_factor(g, tau)
        if _is_inf(tau0):
            # |tau0|^2 |j|^2 -> |a tau + b|^2 as tau0 -> infinity
            weight = (g[0][0] * tau + g[0][1]).abs2()
        else:
            weight = jv.abs2()
        scale = weight * tau_tilde.imag() / (y * discI)
    else:
        if N is None:
            raise ValueError("gamma and tau_tilde are required outside the split case")
        lat = line_lattice(tau0, tau, N)
        if _is_inf(tau0):
            scale = _covolume([w for w, _ in lat]) / (y * discI)
        else:
            scale = _covolume([w for _, w in lat]) / (y * discI)
    if _is_inf(tau0):
        arg = _mat(((0, -1), (0, 0)))
    else:
        x0 = QuadElem.coerce(tau0)
        arg = _mat(((x0, -x0 * x0), (1, -x0)))
    return FundamentalClass(QuadElem.coerce(scale), arg, None, "generic")


def is_cm_point(tau, algebra: str = "split") -> bool:
    """tau is a CM point iff x and y^2 are rational.

    ``tau`` is a QuadElem in an imaginary quadratic field or a pair (x, y^2)
    whose entries may be real QuadElems.
    """
    if algebra != "split":
        raise UnsupportedAlgebra("only the split algebra M2(Q) is supported")
    if isinstance(tau, QuadElem):
        if tau.d > 0 and tau.v:
            return False
        return tau.d < 0 and tau.v != 0
    x, ysq = (QuadElem.coerce(v) for v in tau)
    if ysq.is_rational and ysq.u <= 0:
        raise ValueError("y^2 must be positive")
    return x.is_rational and ysq.is_rational


def classify_slope(tau0: Slope, tau: QuadElem, algebra: str = "split") -> str:
    """'generic' for slopes in P^1(Q), 'cm' for non-real slopes in the field of tau, else 'none'."""
    if algebra != "split":
        raise UnsupportedAlgebra("only the split algebra M2(Q) is supported")
    if _is_inf(tau0) or isinstance(tau0, (int, Fraction)):
        return "generic"
    if not isinstance(tau0, QuadElem):
        raise TypeError("slope must be rational, 'inf' or a QuadElem")
    if tau0.v == 0:
        return "generic"
    if tau0.d > 0:
        return "none"
    if isinstance(tau, QuadElem) and tau.d == tau0.d and tau.v != 0:
        return "cm"
    return "none"
