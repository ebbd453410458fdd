import cmath
from fractions import Fraction

import numpy as np
import pytest

from shimlift.gkz import form_with_pole
from shimlift.qexact import QExpansion
from shimlift.weil import (PlusForm, VVForm, plus_to_vv, qform, relation_residuals, rho_S,
                           rho_T, rho_Z, vv_to_plus)


def test_rho_T_small():
    assert np.allclose(rho_T(1), np.diag([1, 1j]))
    e8 = cmath.exp(2j * cmath.pi / 8)
    assert np.allclose(rho_T(2), np.diag([1, e8, -1, e8]))


def test_rho_S_level_one():
    s = rho_S(1)
    assert np.allclose(s, (1 - 1j) / 2 * np.array([[1, 1], [1, -1]]))
    assert np.allclose(s @ s, -1j * np.eye(2))


@pytest.mark.parametrize("N", range(1, 13))
def test_relations(N):
    r = relation_residuals(N)
    assert max(r.values()) < 1e-12


def test_rho_Z_is_a_signed_permutation():
    for N in (2, 5):
        z = rho_Z(N)
        perm = np.zeros((2 * N, 2 * N))
        for d in range(2 * N):
            perm[(-d) % (2 * N), d] = 1
        assert np.allclose(z, -1j * perm)


def test_qform_symmetric():
    for N in range(1, 8):
        for d in range(2 * N):
            assert qform(d, N) == qform(-d, N)


def test_plus_to_vv_examples():
    g = form_with_pole(2, 3, 12)
    f = plus_to_vv(g)
    assert f.coefficient(1, Fraction(-3, 4)) == 1
    assert f.coefficient(1, Fraction(1, 4)) == 384
    assert f.coefficient(0, 0) == -56
    assert f.check_symmetry()
    assert vv_to_plus(f).series == g.series


def test_constant_and_zero_forms():
    one = PlusForm(Fraction(-3, 2), QExpansion({0: 1}, 1, 8))
    f = plus_to_vv(one)
    assert f.coefficient(0, 0) == 1 and f.component(1).keys() == []
    zero = PlusForm(Fraction(-3, 2), QExpansion({}, 1, 8))
    assert vv_to_plus(plus_to_vv(zero)).series == zero.series


def test_vv_single_term_maps_to_q4():
    f = VVForm(1, Fraction(-3, 2), {0: QExpansion.from_exponents({1: 5}, prec=3)})
    assert vv_to_plus(f).series[4] == 5


def test_plus_condition_enforced():
    with pytest.raises(ValueError):
        PlusForm(Fraction(-3, 2), QExpansion({2: 1}, 1, 5))


def test_exponent_residue_enforced():
    with pytest.raises(ValueError):
        VVForm(1, Fraction(-3, 2), {1: QExpansion.from_exponents({0: 1})})


def test_json_roundtrip():
    f = plus_to_vv(form_with_pole(2, 4, 10))
    assert VVForm.from_json(f.to_json()).components == f.components
    g = form_with_pole(2, 3, 10)
    assert PlusForm.from_json(g.to_json()).series == g.series
