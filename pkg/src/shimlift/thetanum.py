"""Floating-point Siegel theta functions of signature (2, 1) with polynomials P_{r,s,t}.

The lattice L sits in traceless 2x2 matrices as x1 z + x2 zeta + x3 kappa with
z = (0, 1/sqrt N; 0, 0), zeta = (0, 0; sqrt N, 0), kappa = diag(sqrt N, -sqrt N).
Vectors of L* have x1, x2 integral and x3 = j/2N; the class of lambda is j mod 2N.
A point tau_G of the upper half-plane gives Z = sqrt(N) (tau_G, -tau_G^2; 1, -tau_G),
whose real and imaginary parts span the positive plane v+.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .classical import eval_delta, eval_eisenstein
from .weil import rho_S, rho_T

__all__ = [
    "LorentzModel", "GrassmannPoint", "poly_prst", "gaussian_correction",
    "gaussian_correction_explicit", "theta", "theta_naive", "CutoffTooSmall",
    "verify_modularity", "verify_deltatauZ", "verify_modOVTheta",
    "verify_example_pole", "laplacian_rs",
]

TAIL_TARGET = 1e-13


class CutoffTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class LorentzModel:
    N: int

    def matrix(self, x1, x2, x3) -> np.ndarray:
        r = math.sqrt(self.N)
        return np.array([[r * x3, x1 / r], [r * x2, -r * x3]], dtype=complex)

    def pair(self, a: np.ndarray, b: np.ndarray) -> complex:
        """(a, b) = Tr(a b)."""
        return complex(np.trace(a @ b))

    def gram(self) -> np.ndarray:
        """Gram matrix in the coordinates (x1, x2, x3)."""
        return np.array([[0, 1, 0], [1, 0, 0], [0, 0, 2 * self.N]], dtype=float)


@dataclass(frozen=True)
class GrassmannPoint:
    N: int
    tau: complex

    @property
    def beta(self) -> float:
        return math.sqrt(self.N)

    @property
    def Z(self) -> np.ndarray:
        t = self.tau
        return self.beta * np.array([[t, -t * t], [1, -t]], dtype=complex)

    @property
    def J(self) -> np.ndarray:
        x, y = self.tau.real, self.tau.imag
        return np.array([[x, -abs(self.tau) ** 2], [1, -x]], dtype=complex) / y

    @property
    def Ysq(self) -> float:
        return 2 * self.N * self.tau.imag ** 2


def _pair_Z(N: int, tau_G: complex, x1, x2, j):
    """(lambda, Z) for lambda with coordinates (x1, x2, j/2N)."""
    return j * tau_G + x1 - N * x2 * tau_G * tau_G


def poly_prst(lam_Z: complex, Ysq: float, r: int, s: int, t: int) -> complex:
    """P_{r,s,t} = (lambda, Z)^r (lambda, conj Z)^t / (Y^2)^s, from the value of (lambda, Z)."""
    return lam_Z ** r * np.conj(lam_Z) ** t / Ysq ** s


def _correction_coeffs(y: float, r: int, t: int):
    out = []
    for j in range(min(r, t) + 1):
        c = (-1 / (8 * math.pi * y)) ** j / math.factorial(j) * 4 ** j
        c *= math.factorial(r) * math.factorial(t) / (math.factorial(r - j) * math.factorial(t - j))
        out.append(c)
    return out


def gaussian_correction(lam_Z, Ysq: float, y: float, r: int, s: int, t: int):
    """exp(-Delta_v / 8 pi y) P_{r,s,t}, using Delta_v P_{r,s,t} = 4 r t P_{r-1,s-1,t-1}."""
    total = 0
    for j, c in enumerate(_correction_coeffs(y, r, t)):
        total = total + c * poly_prst(lam_Z, Ysq, r - j, s - j, t - j)
    return total


def gaussian_correction_explicit(lam_Z, Ysq: float, y: float, r: int, s: int, t: int):
    """The same operator written as sum_j j! binom(r,j) binom(t,j) (-1/(2 pi y))^j P_{r-j,s-j,t-j}."""
    total = 0
    for j in range(min(r, t) + 1):
        c = math.factorial(j) * math.comb(r, j) * math.comb(t, j) * (-1 / (2 * math.pi * y)) ** j
        total = total + c * poly_prst(lam_Z, Ysq, r - j, s - j, t - j)
    return total


def _maj_gram(N: int, tau_G: complex) -> np.ndarray:
    Ysq = 2 * N * tau_G.imag ** 2
    a = np.array([1, -N * tau_G * tau_G, tau_G], dtype=complex)
    plus = np.real(np.outer(a, np.conj(a))) / Ysq  # lambda+^2 = |(lambda,Z)|^2 / Y^2
    norm = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1 / (2 * N)]], dtype=float)
    return 2 * plus - norm


def _tail_bound(R: float, y: float, G: np.ndarray, deg: int, pref: float) -> float:
    """Bound for sum over maj > R^2 of pref maj^(deg/2) exp(-pi y maj)."""
    lam_min = float(np.linalg.eigvalsh(G)[0])
    det = float(np.linalg.det(G))
    # lattice points in the shell: volume growth 4 pi rho^2 / sqrt(det), padded by lam_min
    pad = 1 / math.sqrt(lam_min)
    rho = R
    total = 0.0
    step = 0.05
    while True:
        dens = 4 * math.pi * (rho + 2 * pad) ** 2 / math.sqrt(det)
        v = dens * pref * max(1.0, rho) ** deg * math.exp(-math.pi * y * rho * rho)
        total += v * step
        if v < 1e-30 and rho > R + 1:
            break
        rho += step
    return 4 * total


def _adaptive_radius(y: float, G: np.ndarray, deg: int, pref: float) -> float:
    R = 1.0
    while _tail_bound(R, y, G, deg, pref) > TAIL_TARGET:
        R *= 1.15
    return R


def _prefactor(N: int, tau_G: complex, y: float, r: int, s: int, t: int) -> float:
    Ysq = 2 * N * tau_G.imag ** 2
    # |(lambda, Z)| <= Y sqrt(maj)
    coeffs = _correction_coeffs(y, r, t)
    return sum(abs(c) * math.sqrt(Ysq) ** (r + t - 2 * j) / Ysq ** (s - j)
               for j, c in enumerate(coeffs)) + 1.0


def theta(tau: complex, tau_G: complex, r: int, s: int, t: int, N: int = 1,
          cutoff: Optional[float] = None, threads: int = 1) -> np.ndarray:
    """Theta_gamma(tau, tau_G) for gamma in Z/2N, summed over maj(lambda) <= cutoff^2."""
    x, y = tau.real, tau.imag
    G = _maj_gram(N, tau_G)
    deg = r + t
    pref = _prefactor(N, tau_G, y, r, s, t)
    if cutoff is None:
        cutoff = _adaptive_radius(y, G, deg, pref)
    elif _tail_bound(cutoff, y, G, deg, pref) > TAIL_TARGET:
        raise CutoffTooSmall(f"tail bound at radius {cutoff} exceeds {TAIL_TARGET}")
    R2 = cutoff * cutoff
    Ginv = np.linalg.inv(G)
    b = [int(math.floor(cutoff * math.sqrt(Ginv[i, i]))) + 1 for i in range(3)]
    Ysq = 2 * N * tau_G.imag ** 2
    x2s = np.arange(-b[1], b[1] + 1)
    js = np.arange(-b[2], b[2] + 1)
    X2, J = np.meshgrid(x2s, js, indexing="ij")
    X2 = X2.ravel().astype(float)
    J = J.ravel()
    Jf = J.astype(float)
    gam = np.mod(J, 2 * N)

    def slab(x1: int) -> np.ndarray:
        maj = (G[0, 0] * x1 * x1 + G[1, 1] * X2 * X2 + G[2, 2] * Jf * Jf
               + 2 * G[0, 1] * x1 * X2 + 2 * G[0, 2] * x1 * Jf + 2 * G[1, 2] * X2 * Jf)
        mask = maj <= R2
        lz = _pair_Z(N, tau_G, x1, X2[mask], Jf[mask])
        nrm = Jf[mask] ** 2 / (2 * N) + 2 * x1 * X2[mask]
        term = np.exp(1j * math.pi * x * nrm) * np.exp(-math.pi * y * maj[mask])
        term = term * gaussian_correction(lz, Ysq, y, r, s, t)
        out = np.zeros(2 * N, dtype=complex)
        np.add.at(out, gam[mask], term)
        return out

    rows = list(range(-b[0], b[0] + 1))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(slab, rows))
    else:
        parts = [slab(x1) for x1 in rows]
    total = np.zeros(2 * N, dtype=complex)
    for p in parts:  # fixed order
        total += p
    return total


def theta_naive(tau: complex, tau_G: complex, r: int, s: int, t: int, N: int = 1,
                box: int = 12) -> np.ndarray:
    """Plain triple loop over a box, straight from the matrix model (a reference oracle)."""
    model = LorentzModel(N)
    gp = GrassmannPoint(N, tau_G)
    Z = gp.Z
    Ysq = gp.Ysq
    out = np.zeros(2 * N, dtype=complex)
    for x1 in range(-box, box + 1):
        for x2 in range(-box, box + 1):
            for j in range(-2 * N * box, 2 * N * box + 1):
                lam = model.matrix(x1, x2, j / (2 * N))
                lz = model.pair(lam, Z)
                plus = abs(lz) ** 2 / Ysq
                nrm = model.pair(lam, lam).real
                minus = nrm - plus
                ph = cmath.exp(2j * math.pi * (tau * plus / 2 + tau.conjugate() * minus / 2))
                out[j % (2 * N)] += ph * gaussian_correction(lz, Ysq, tau.imag, r, s, t)
    return out


def verify_modularity(tau: complex, tau_G: complex, r: int, s: int, t: int, N: int = 1,
                      threads: int = 1) -> Dict[str, float]:
    """Residuals of Theta(M tau) = j^(1+r+t) conj(j)^(1/2) rho(M) Theta(tau) for M = T, S."""
    th = theta(tau, tau_G, r, s, t, N, threads=threads)
    thT = theta(tau + 1, tau_G, r, s, t, N, threads=threads)
    thS = theta(-1 / tau, tau_G, r, s, t, N, threads=threads)
    resT = np.max(np.abs(rho_T(N) @ th - thT))
    jS = tau
    factor = jS ** (1 + r + t) * np.conj(np.sqrt(complex(jS)))
    resS = np.max(np.abs(factor * (rho_S(N) @ th) - thS))
    scale = max(1.0, float(np.max(np.abs(th))))
    return {"T": float(resT) / scale, "S": float(resS) / scale}


def laplacian_rs(f: Callable[[complex], complex], z: complex, a: float, b: float, h: float) -> complex:
    """Delta_{a,b} = y^2 (d_x^2 + d_y^2) - i y (a - b) d_x + y (a + b) d_y + (a - 1) b.

    Derivatives are second-order central differences.  The constant term is
    what makes Delta_{a,b} y^c = y^c Delta_{a+c,b+c}.
    """
    y = z.imag
    f0 = f(z)
    fxp, fxm = f(z + h), f(z - h)
    fyp, fym = f(z + 1j * h), f(z - 1j * h)
    lap = (fxp + fxm + fyp + fym - 4 * f0) / (h * h)
    dx = (fxp - fxm) / (2 * h)
    dy = (fyp - fym) / (2 * h)
    return y * y * lap - 1j * y * (a - b) * dx + y * (a + b) * dy + (a - 1) * b * f0


def verify_deltatauZ(tau: complex, tau_G: complex, r: int, s: int, t: int, h: float = 1e-3,
                     N: int = 1, include_constant: bool = True, threads: int = 1) -> float:
    """max_gamma |4 Delta_k(y^(1/2) Theta) - (Delta^G + 2r(1-2t)) y^(1/2) Theta|.

    y^(1/2) Theta has weight k = 1/2 + r + t in tau and Delta_k acts as
    Delta_{k,0}; Delta^G acts on tau_G as Delta_{2(s-r), 2(s-t)}.
    """
    k = 0.5 + r + t
    cache: Dict[Tuple[complex, complex], np.ndarray] = {}

    def F(tt: complex, tg: complex) -> np.ndarray:
        key = (tt, tg)
        if key not in cache:
            cache[key] = math.sqrt(tt.imag) * theta(tt, tg, r, s, t, N, threads=threads)
        return cache[key]

    lhs = 4 * laplacian_rs(lambda z: F(z, tau_G), tau, k, 0, h)
    rhs = laplacian_rs(lambda z: F(tau, z), tau_G, 2 * (s - r), 2 * (s - t), h)
    if include_constant:
        rhs = rhs + 2 * r * (1 - 2 * t) * F(tau, tau_G)
    scale = max(1.0, float(np.max(np.abs(F(tau, tau_G)))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def verify_modOVTheta(tau: complex, tau_G: complex, g: Sequence[Sequence[int]], r: int, s: int,
                      t: int, N: int = 1) -> float:
    """|Theta(tau, g tau_G) - J^(s-r) conj(J)^(s-t) Theta(tau, tau_G)| for g in Gamma0(N).

    J = (c tau_G + d)^2 is the automorphy factor of Z, since Z(g tau_G) is
    conjugate to Z(tau_G) / (c tau_G + d)^2.
    """
    (a, b), (c, d) = g
    if c % N or a * d - b * c != 1:
        raise ValueError("g must lie in Gamma0(N)")
    gt = (a * tau_G + b) / (c * tau_G + d)
    jv = (c * tau_G + d) ** 2
    lhs = theta(tau, gt, r, s, t, N)
    rhs = jv ** (s - r) * np.conj(jv) ** (s - t) * theta(tau, tau_G, r, s, t, N)
    scale = max(1.0, float(np.max(np.abs(rhs))))
    return float(np.max(np.abs(lhs - rhs))) / scale


def _example_G(tau: complex) -> complex:
    e4, e6, dl = eval_eisenstein(4, tau), eval_eisenstein(6, tau), eval_delta(tau)
    return 384 * e6 * dl / e4 ** 3


def verify_example_pole(sigma: complex, expected: complex, order: int = 3,
                        G: Callable[[complex], complex] = _example_G,
                        eps: Sequence[float] = (1e-2, 1e-3), theta_dir: float = 0.0) -> Dict[str, float]:
    """Richardson-extrapolated (tau - sigma)^k (tau - conj sigma)^k G(tau) as tau -> sigma.

    The default G is 384 E6 Delta / E4^3.  Returns the extrapolated lead and
    its residual relative to ``expected``.
    """
    e1, e2 = eps
    direction = cmath.exp(1j * theta_dir)

    def val(e: float) -> complex:
        tau = sigma + e * direction
        return (tau - sigma) ** order * (tau - sigma.conjugate()) ** order * G(tau)

    v1, v2 = val(e1), val(e2)
    q = e1 / e2
    lead = (q * v2 - v1) / (q - 1)
    return {"lead_re": lead.real, "lead_im": lead.imag,
            "residual": abs(lead - expected) / abs(expected)}
