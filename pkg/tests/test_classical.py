import cmath
import math
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from shimlift import classical as c
from shimlift.gkz import plus_space_basis
from shimlift.qexact import QExpansion


def test_bernoulli_values():
    assert [c.bernoulli(k) for k in (0, 1, 2, 4, 6, 12)] == \
        [1, Fraction(-1, 2), Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-691, 2730)]
    assert c.bernoulli(7) == 0


def test_eisenstein_heads():
    assert c.eisenstein(4, 3).keys() == [0, 1, 2]
    assert (c.eisenstein(4, 3)[1], c.eisenstein(4, 3)[2]) == (240, 2160)
    assert (c.eisenstein(6, 3)[1], c.eisenstein(6, 3)[2]) == (-504, -16632)
    assert c.eisenstein(10, 2)[1] == -264


def test_eisenstein_relations():
    # E4^2 = E8 and E4 E6 = E10 since the spaces are one-dimensional
    p = 40
    assert c.eisenstein(4, p) ** 2 == c.eisenstein(8, p)
    assert c.eisenstein(4, p) * c.eisenstein(6, p) == c.eisenstein(10, p)


def test_delta_against_product():
    p = 30
    prod = QExpansion({1: 1}, 1, p)
    for n in range(1, p):
        factor = QExpansion({0: 1, n: -1}, 1, p)
        prod = prod * factor ** 24
    assert c.discriminant_form(p) == prod
    d = c.discriminant_form(5)
    assert (d[0], d[1], d[2], d[3]) == (0, 1, -24, 252)


def test_theta_and_j():
    th = c.jacobi_theta(20)
    assert (th[0], th[1], th[2], th[16]) == (1, 2, 0, 2)
    j = c.j_invariant(3)
    assert (j[-1], j[0], j[1], j[2]) == (1, 744, 196884, 21493760)


def test_numeric_evaluation():
    rho = cmath.exp(2j * math.pi / 3)
    assert abs(c.eval_eisenstein(4, rho)) < 1e-12
    assert abs(c.eval_eisenstein(6, 1j)) < 1e-12
    tau = 0.1 + 1.2j
    qv = cmath.exp(2j * math.pi * tau)
    assert abs(c.eval_delta(tau) - c.discriminant_form(40).evaluate(qv)) < 1e-12


def test_cohen_numbers():
    assert c.cohen_h2(0) == Fraction(1, 120)
    assert c.cohen_h2(1) == Fraction(-1, 12)
    assert c.cohen_h2(5) == Fraction(-2, 5)
    assert c.cohen_h2(4) == Fraction(-7, 12)
    assert c.cohen_h2(2) == c.cohen_h2(3) == 0
    assert c.generalized_bernoulli(2, 5) == Fraction(4, 5)


def test_cohen_series_is_the_plus_space_generator():
    # weight 5/2 plus space is one-dimensional; built here from theta and F only
    p = 80
    (basis,) = plus_space_basis(2, p)
    assert basis.scale(1 / basis[0]) == c.cohen_eisenstein_5_2(p)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3000))
def test_sigma_and_factorization(n):
    f = c.factorize(n)
    assert math.prod(p ** e for p, e in f.items()) == n
    assert c.sigma(n, 0) == math.prod(e + 1 for e in f.values())
    assert c.sigma(n, 1) == sum(d for d in range(1, n + 1) if n % d == 0)
