import cmath

import numpy as np
import pytest

from solitonforge.fields import ExplicitFields, vacuum
from solitonforge.laxpair import (
    PropagatedG,
    VacuumG,
    g_jet,
    propagate_g,
    ratio_F,
    riccati_residual,
    unitarity_defect,
    ut_matrix,
    ux_matrix,
    zero_curvature_residual,
)
from solitonforge.numkit import CJet, JetOrderError
from solitonforge.soliton_engine import SolitonSpec, nsoliton

ONE_SOLITON = nsoliton(SolitonSpec([(1j, 1.0)]))


def test_ux_examples():
    np.testing.assert_allclose(ux_matrix(1, 0, 0), 1j * np.diag([1, -1]))
    np.testing.assert_allclose(ux_matrix(0, 1, 1), 1j * np.array([[0, 1], [1, 0]]))
    np.testing.assert_allclose(ux_matrix(1j, 2, -2), [[-1, 2j], [-2j, 1]])


def test_ut_examples():
    zero = CJet.const(0.0, 1, 0)
    np.testing.assert_allclose(ut_matrix(1, zero, zero), 1j * np.diag([1, -1]))
    two = CJet.const(2.0, 1, 0)
    np.testing.assert_allclose(ut_matrix(0, two, two), 1j * np.diag([-2, 2]))
    with pytest.raises(JetOrderError):
        ut_matrix(1, CJet.const(0.0), CJet.const(0.0))


def test_ut_matches_finite_difference_assembly():
    lam, x, t, h = 0.4 + 0.1j, 0.3, 0.2, 1e-5
    u, v = ONE_SOLITON.jets(x, t, 1, 0)
    ux = (ONE_SOLITON.values(x + h, t)[0] - ONE_SOLITON.values(x - h, t)[0]) / (2 * h)
    vx = (ONE_SOLITON.values(x + h, t)[1] - ONE_SOLITON.values(x - h, t)[1]) / (2 * h)
    uu, vv = u.value, v.value
    fd = 1j * np.array([[lam**2 - uu * vv / 2, lam * uu - 0.5j * ux],
                        [lam * vv + 0.5j * vx, -lam**2 + uu * vv / 2]])
    np.testing.assert_allclose(ut_matrix(lam, u, v), fd, atol=1e-8)


def test_connection_is_traceless():
    u, v = ONE_SOLITON.jets(0.1, 0.4, 1, 0)
    for lam in (0.3, 1 + 1j):
        assert abs(np.trace(ux_matrix(lam, u.value, v.value))) < 1e-15
        assert abs(np.trace(ut_matrix(lam, u, v))) < 1e-15


def test_zero_curvature():
    assert np.abs(zero_curvature_residual(vacuum(), 0.9 - 0.2j, (0.5, 0.5))).max() == 0
    assert np.abs(zero_curvature_residual(ONE_SOLITON, 0.7, (0.3, 0.1))).max() <= 1e-8
    # u = x with v = 0 still solves the system; x^2 does not
    not_a_solution = ExplicitFields(lambda X, T: (X * X, 0.0))
    assert np.abs(zero_curvature_residual(not_a_solution, 1.0, (0.3, 0.1))).max() > 0.1


@pytest.mark.parametrize("end", [(1.0, 0.0), (0.0, 1.0)])
def test_vacuum_propagation(end):
    g = propagate_g(vacuum(), 1.0, (0.0, 0.0), end)
    np.testing.assert_allclose(g.g, np.diag([cmath.exp(1j), cmath.exp(-1j)]), atol=1e-9)


def test_vacuum_propagation_matches_closed_form():
    lam, end = 0.6 - 0.3j, (0.7, -0.4)
    g = propagate_g(vacuum(), lam, (0.0, 0.0), end)
    ref = np.array([[e.value for e in row] for row in VacuumG()(lam, *end, 0, 0)])
    np.testing.assert_allclose(g.g, ref, rtol=1e-9)


def test_one_soliton_propagation_properties():
    lam = 0.5
    g = propagate_g(ONE_SOLITON, lam, (0.0, 0.0), (0.8, 0.6))
    assert g.path_defect <= 1e-6
    assert unitarity_defect(g) <= 1e-8
    m = g.g
    assert abs(np.linalg.det(m) - 1) <= 1e-8
    assert abs(m[1, 1] - np.conj(m[0, 0])) <= 1e-8
    assert abs(m[0, 1] + np.conj(m[1, 0])) <= 1e-8


def test_analytic_continuation_relation():
    lam, end = 0.4 + 0.5j, (0.6, 0.3)
    g = propagate_g(ONE_SOLITON, lam, (0.0, 0.0), end).g
    gs = propagate_g(ONE_SOLITON, np.conj(lam), (0.0, 0.0), end).g
    assert abs(np.conj(g[0, 0]) - gs[1, 1]) <= 1e-6


def test_unitarity_defect_examples():
    assert unitarity_defect(np.eye(2)) == 0
    assert unitarity_defect(np.diag([cmath.exp(0.4j), cmath.exp(-0.4j)])) < 1e-15


def test_vacuum_riccati_both_forms():
    lam, alpha, p = 0.8, 2.0 + 1j, (0.2, -0.3)
    g = VacuumG()(lam, *p, 2, 1)
    F = ratio_F(g, lam, alpha)
    X, T = CJet.var_x(p[0], 2, 1), CJet.var_t(p[1], 2, 1)
    expected = (2j * (lam * X + lam * lam * T)).exp() / alpha
    assert F.jet.is_close(expected, rtol=1e-13)
    for which in ("x", "t"):
        for form in ("F", "inverse"):
            assert abs(riccati_residual(vacuum(), F, lam, p, which, form)) < 1e-13


def test_riccati_on_one_soliton_with_propagated_g():
    lam, p = -1j, (0.4, 0.2)
    ge = propagate_g(ONE_SOLITON, lam, (0.0, 0.0), p)
    gj = g_jet(ONE_SOLITON, lam, ge.g, p, 2, 1)
    F = ratio_F(gj, lam, 0.5)
    for which in ("x", "t"):
        for form in ("F", "inverse"):
            assert abs(riccati_residual(ONE_SOLITON, F, lam, p, which, form)) <= 1e-8


def test_propagated_provider_agrees_with_vacuum_closed_form():
    lam, p = 0.3 + 0.2j, (0.5, 0.25)
    a = PropagatedG(vacuum())(lam, *p, 2, 1)
    b = VacuumG()(lam, *p, 2, 1)
    for i in range(2):
        for j in range(2):
            assert np.abs(a[i][j].c - b[i][j].c).max() <= 1e-8
