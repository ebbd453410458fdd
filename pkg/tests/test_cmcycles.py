from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from shimlift import cmcycles as cm
from shimlift.cmcycles import INF, QuadElem, WedgeForm, iota, itilde

rats = st.fractions(min_value=-20, max_value=20, max_denominator=12)
traceless = st.tuples(rats, rats, rats).map(lambda t: ((t[0], t[1]), (t[2], -t[0])))


def tr(b, c):
    return sum(F(b[i][k]) * F(c[k][i]) for i in range(2) for k in range(2))


def test_embedding_tables():
    assert iota(((0, -1), (0, 0))) == WedgeForm.make(dc=1)
    assert itilde(((1, 0), (0, -1))) == WedgeForm.make(da=1, cb=1)
    assert iota(((0, 0), (0, 0))).is_zero()
    with pytest.raises(cm.NotTraceless):
        iota(((1, 0), (0, 0)))


def test_wedge_make_orientation():
    w = WedgeForm.make(ba=2, dc=3)
    assert w["ab"] == -2 and w["ba"] == 2 and w["cd"] == -3
    with pytest.raises(ValueError):
        WedgeForm.make(aa=1)


@settings(max_examples=50, deadline=None)
@given(traceless, traceless, st.integers(1, 7))
def test_cup_products(b, c, discI):
    assert cm.cup(iota(b), itilde(c), discI) == 0
    assert cm.cup(iota(b), iota(c), discI) == -discI * tr(b, c)
    assert cm.cup(itilde(b), itilde(c), discI) == discI * tr(b, c)


quad = st.builds(QuadElem, rats, rats, st.sampled_from([-1, -2, -3, -5, -7, -15, 2, 3, 5]))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([-1, -3, -7, 2, 5]), rats, rats, rats, rats)
def test_quadratic_field_arithmetic(d, a, b, c, e):
    x, y = QuadElem(a, b, d), QuadElem(c, e, d)
    assert (x * y).norm() == x.norm() * y.norm()
    assert x * y == y * x and x + y - y == x
    if x != 0:
        assert x * x.inverse() == 1
        assert (y / x) * x == y
    if d > 0:
        assert x.sign() == (float(x) > 0) - (float(x) < 0) or abs(float(x)) < 1e-12


def test_squarefree_normalization():
    assert QuadElem(0, 1, -12) == QuadElem(0, 2, -3)
    assert QuadElem(1, 3, 4) == QuadElem(7)
    with pytest.raises(ValueError):
        QuadElem(0, 1, -3) + QuadElem(0, 1, 2)


@settings(max_examples=50, deadline=None)
@given(rats, st.fractions(min_value=F(1, 10), max_value=10, max_denominator=12),
       st.sampled_from([-1, -2, -3, -7]))
def test_complex_structure(x, v, d):
    tau = QuadElem(x, v, d)
    J = cm.J_matrix(tau)
    sq = cm._mat_mul(J, J)
    assert sq == cm._mat(((-1, 0), (0, -1)))
    # J_(g tau) = g J_tau g^-1 for g of positive determinant
    g = cm._mat(((2, 1), (1, 1)))
    lhs = cm.J_matrix(cm.mobius(g, tau))
    rhs = cm._mat_mul(cm._mat_mul(g, J), cm._mat_inv(g))
    assert lhs == rhs


def _isogeny_tau(N, D):
    """(sqrt(-D) - h)/N with N | D + h^2, or None when -D is not a square mod N."""
    for h in range(N):
        if (D + h * h) % N == 0:
            return QuadElem(F(-h, N), F(1, N), -D)
    return None


ISOGENY_GRID = [(N, D) for N in (1, 2, 3, 5, 7) for D in (1, 2, 3, 5, 6, 7, 11)
                if _isogeny_tau(N, D) is not None]


def _sqrtD_J(tau, D):
    return tuple(tuple(QuadElem(0, 1, D) * x for x in row) for row in cm.J_matrix(tau))


@pytest.mark.parametrize("N,D", ISOGENY_GRID)
def test_cm_isogeny_table(N, D):
    tau = _isogeny_tau(N, D)
    t0 = QuadElem(0, 1, -D)
    fc = cm.fundamental_class(t0, tau, N=N)
    assert fc.kind == "cm"
    assert fc.form() == WedgeForm.make(ba=1, dc=D) + itilde(_sqrtD_J(tau, D))
    # the same class from the slope relation (a b) = (c d) T and the d^c integral
    x0, y0 = t0.real(), t0.imag()
    J = cm.J_matrix(tau)
    T = ((x0 + y0 * J[0][0], y0 * J[0][1]), (y0 * J[1][0], x0 + y0 * J[1][1]))
    idc = cm._covolume([w for _, w in cm.line_lattice(t0, tau, N)]) / tau.imag()
    assert cm.cycform_class(T, idc, N) == fc.form()
    # slope in the lower half-plane flips the transversal part
    low = cm.fundamental_class(1 / QuadElem(0, N, -D), tau, N=N)
    assert low.scale.sign() > 0
    assert low.form() == WedgeForm.make(dc=F(1, N), ba=N * D) - itilde(_sqrtD_J(tau, D))


TAU7 = QuadElem(F(1, 3), F(1, 2), -7)


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("L", [-2, 0, 1, 3])
def test_graph_of_psi(N, L):
    fc = cm.fundamental_class(F(L), TAU7, N=N)
    assert fc.kind == "generic"
    assert fc.form() == iota(((L, -L * L), (1, -L)))


@pytest.mark.parametrize("N", [1, 2, 3])
@pytest.mark.parametrize("k", [-1, 1, 2])
def test_graph_of_phi(N, k):
    M = N * k
    fc = cm.fundamental_class(F(1, M), TAU7, N=N)
    assert fc.form() == iota(((F(M, N), F(-1, N)), (F(M * M, N), F(-M, N))))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_slope_at_infinity(N):
    assert cm.fundamental_class(INF, TAU7, N=N).form() == iota(((0, F(-1, N)), (0, 0)))


def test_explicit_gamma_agrees():
    tau = _isogeny_tau(2, 5)
    t0 = QuadElem(0, 1, -5)
    auto = cm.fundamental_class(t0, tau, N=2)
    g = cm.find_gamma(tau, t0)
    explicit = cm.fundamental_class(t0, tau, gamma=g, N=2)
    assert explicit.form() == auto.form()


def test_bad_gamma():
    t0 = QuadElem(0, 1, -5)
    with pytest.raises(cm.SlopeMismatch):
        cm.fundamental_class(t0, QuadElem(0, 1, -5), gamma=((2, 0), (0, 1)), N=1)
    with pytest.raises(cm.DegenerateGamma):
        cm.fundamental_class(t0, QuadElem(0, 1, -5), gamma=((0, 0), (0, 0)), N=1)


def test_find_gamma_examples():
    t = QuadElem(F(1, 2), F(1, 2), -3)
    assert cm.find_gamma(t, t) == ((1, 0), (0, 1))
    s3 = QuadElem(0, 1, -3)
    g = cm.find_gamma(s3, t)
    assert cm.mobius(g, s3) == t
    low = cm.find_gamma(QuadElem(F(-1, 2), F(1, 2), -7), 1 / QuadElem(0, 2, -7))
    assert low[0][0] * low[1][1] < 0
    with pytest.raises(cm.NoSolution):
        cm.find_gamma(s3, QuadElem(0, 1, -1))


def test_is_cm_point():
    assert cm.is_cm_point(QuadElem(F(1, 2), F(1, 2), -3))
    assert cm.is_cm_point((QuadElem(0), QuadElem(2)))  # i sqrt 2: y^2 = 2
    assert not cm.is_cm_point((QuadElem(0, 1, 2), QuadElem(3)))
    with pytest.raises(cm.UnsupportedAlgebra):
        cm.is_cm_point(QuadElem(0, 1, -1), algebra="definite")


def test_classify_slope():
    t = QuadElem(F(1, 2), F(1, 2), -3)
    assert cm.classify_slope(F(5, 3), t) == "generic"
    assert cm.classify_slope(INF, t) == "generic"
    assert cm.classify_slope(QuadElem(0, 1, -3), t) == "cm"
    assert cm.classify_slope(QuadElem(0, 1, 2), t) == "none"
    assert cm.classify_slope(QuadElem(0, 1, -7), t) == "none"
