import math
from fractions import Fraction
from itertools import product

import pytest

from shimlift import lift as L
from shimlift.classical import discriminant_form, eisenstein
from shimlift.gkz import form_with_pole
from shimlift.qexact import PrecisionError, QExpansion
from shimlift.weil import VVForm, plus_to_vv


def vv(m, n, prec):
    return plus_to_vv(form_with_pole(m, n, prec))


@pytest.fixture(scope="module")
def g3():
    return vv(2, 3, 50)


def test_positive_part_example(g3):
    G = L.lift_positive_part(g3, 5)
    assert [G[r] for r in range(1, 6)] == [384, -479232, 274558464, -118219210752, 43867326009600]
    # r = 2 by hand: 2^2 (1^3 c(1/4) + 2^3 c(1)) in plus-space indices 1 and 4
    assert G[2] == 4 * (384 + 8 * -15024)


def test_positive_part_needs_precision():
    with pytest.raises(PrecisionError):
        L.lift_positive_part(vv(2, 3, 10), 5)


def test_zero_form_lifts_to_zero():
    z = VVForm(1, Fraction(-3, 2), {0: QExpansion({}, 4, 200), 1: QExpansion({}, 4, 200)})
    assert L.lift_positive_part(z, 6).keys() == []


def test_closed_form(g3):
    p = 7
    G = L.lift_positive_part(g3, p - 1)
    e4, e6, d = eisenstein(4, p), eisenstein(6, p), discriminant_form(p)
    ref = (e6 * d * (e4 ** 3).invert()).scale(384).truncate(p)
    assert G == ref.truncate(p) - QExpansion({0: ref[0]}, 1, p)


def test_rejects_dual_and_bad_weight(g3):
    dual = VVForm(1, g3.weight, {}, "dual")
    with pytest.raises(L.RepMismatch):
        L.lift_positive_part(dual, 3)
    with pytest.raises(Exception):
        L.lift_positive_part(VVForm(1, Fraction(3, 2), {}), 3)


# CM points

def test_example_pole_point(g3):
    (pt,) = L.enumerate_poles(g3, Fraction(3, 4))
    assert pt.form == (1, 1, 1)
    assert abs(pt.sigma - complex(0.5, math.sqrt(3) / 2)) < 1e-15


def test_nonprimitive_classes():
    f = vv(2, 16, 2)
    pts = L.enumerate_poles(f, 4)
    assert sorted(p.form for p in pts) == [(1, 0, 4), (2, 0, 2)]
    assert sorted(p.primitive[0] for p in pts) == [1, 2]


def test_no_pole_without_coefficient(g3):
    assert L.enumerate_poles(g3, 1) == []


def test_reduced_forms_class_numbers():
    h = {-3: 1, -4: 1, -7: 1, -15: 2, -20: 2, -23: 3, -47: 5, -71: 7}
    for D, c in h.items():
        prim = [Q for Q in L.reduced_forms(D) if math.gcd(*Q) == 1]
        assert len(prim) == c


def _synthetic(N, n):
    """A form whose principal part has q^-n on every admissible component."""
    comps = {}
    for d in range(2 * N):
        if (-n - Fraction(d * d, 4 * N)) % 1 == 0:
            comps[d] = QExpansion.from_exponents({-n: 1}, prec=1)
    return VVForm(N, Fraction(-3, 2), comps)


def _box_classes(N, n, box=60):
    disc = int(-4 * N * n)
    reps = []
    for a, b in product(range(N, box + 1, N), range(-box, box + 1)):
        if (b * b - disc) % (4 * a):
            continue
        Q = (a, b, (b * b - disc) // (4 * a))
        if not any(L.gamma0_equivalent(Q, R, N) for R in reps):
            reps.append(Q)
    return reps


@pytest.mark.parametrize("N", [1, 2, 3])
def test_enumeration_against_box_search(N):
    for num in range(1, 4 * N * 10 + 1):
        n = Fraction(num, 4 * N)
        if n > 10 or (-num) % 4 not in (0, 1):
            continue
        f = _synthetic(N, n)
        if not f.components:
            continue
        pts = L.enumerate_poles(f, n)
        box = _box_classes(N, n)
        assert len(pts) == len(box), (N, n)
        for p in pts:
            assert sum(L.gamma0_equivalent(p.form, Q, N) for Q in box) == 1


def test_gamma0_equivalence_basic():
    assert L.gamma0_equivalent((1, 1, 1), (1, -1, 1), 1)
    assert L.gamma0_equivalent((2, 1, 3), (2, 5, 6), 2)  # shift by T
    assert not L.gamma0_equivalent((2, 1, 3), (3, 1, 2), 2)
    assert not L.gamma0_equivalent((1, 1, 1), (1, 0, 1), 1)


# principal parts

def _lead_numeric(cert, sigma, order, eps=1e-4):
    tau = sigma + eps * 1j
    return cert.evaluate(tau) * (tau - sigma) ** order * (tau - sigma.conjugate()) ** order


@pytest.mark.parametrize("m,n", [(2, 3), (2, 4), (4, 3), (4, 4)])
def test_lead_matches_closed_form(m, n):
    res = L.lift(vv(m, n, 65), 8)
    (pole,) = res.poles
    cert = L.clear_poles_certificate(res.positive_part, res.poles, m)
    lead = pole.value()
    approx = _lead_numeric(cert, pole.point.sigma, pole.order)
    assert abs(approx - lead) / abs(lead) < 1e-3


def test_lead_example_values(g3):
    res = L.lift(g3, 5)
    (pole,) = res.poles
    assert pole.order == 3 and pole.rat > 0 and not pole.imaginary
    assert abs(pole.value() - 144 * math.sqrt(3) / (4 * math.pi) ** 3) < 1e-15
    # doubling the form doubles the lead
    f2 = VVForm(1, g3.weight, {d: s.scale(2) for d, s in g3.components.items()})
    assert L.principal_part(f2, 2, 1, L.enumerate_poles(f2, Fraction(3, 4))[0]).rat == 2 * pole.rat


def test_odd_m_is_imaginary():
    comps = {1: QExpansion.from_exponents({Fraction(-7, 8): 1}, prec=1),
             3: QExpansion.from_exponents({Fraction(-7, 8): -1}, prec=1)}
    f = VVForm(2, Fraction(-1, 2), comps)
    pts = L.enumerate_poles(f, Fraction(7, 8))
    assert pts
    assert all(L.principal_part(f, 1, 2, p).imaginary for p in pts)


def test_ladder_collects_multiples():
    # q^-3 and q^-12 both sit over the point of discriminant -3
    f = plus_to_vv(form_with_pole(2, 12, 2))
    g = plus_to_vv(form_with_pole(2, 3, 2))
    h = VVForm(1, f.weight, {d: f.component(d) + g.component(d) for d in (0, 1)})
    poles = L.lift(h, 1).poles
    rho = [p for p in poles if p.point.primitive[1:] == (1, 1, 1)]
    assert len(rho) == 1 and dict(rho[0].contributions) == {1: 1, 2: 1}


# certificates

def test_certificate_example(g3):
    res = L.lift(g3, 6)
    cert = L.clear_poles_certificate(res.positive_part, res.poles, 2)
    assert (cert.a, cert.b, cert.weight) == (3, 0, 18)
    assert cert.coordinates == {(0, 1, 1): 384}


def test_certificate_holomorphic():
    cert = L.clear_poles_certificate(eisenstein(6, 5), [], 2)
    assert cert.weight == 6 and cert.coordinates == {(0, 1, 0): 1}


def test_certificate_pole_at_i():
    res = L.lift(vv(2, 4, 26), 5)
    cert = L.clear_poles_certificate(res.positive_part, res.poles, 2)
    assert (cert.a, cert.b, cert.weight) == (0, 3, 24)


def test_certificate_irrational_j():
    res = L.lift(vv(2, 7, 2), 1)
    with pytest.raises(L.IrrationalJ):
        L.clear_poles_certificate(res.positive_part, res.poles, 2)


def test_certificate_rejects_non_modular(g3):
    G = L.lift_positive_part(g3, 6)
    bad = G + QExpansion({3: 1}, 1, 7)
    with pytest.raises(L.NotModular):
        L.clear_poles_certificate(bad, L.lift(g3, 1).poles, 2)


def test_m0_constant_unknown():
    f = vv(0, 3, 2)
    res = L.lift(f, 1)
    assert not res.constant_known and res.constant is None
