import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from solitonforge.fields import ExplicitFields, SampleGrid, scnl_residual
from solitonforge.numkit import CJet, align
from solitonforge.sigma2 import (
    ExplicitSigma2,
    Sigma2ParameterError,
    Sigma2Spec,
    admissible_nu,
    backlund_constraint_scan,
    from_sigma2,
    resolve_convention,
    s2_residual,
    schl1_residual,
    sigma2_nsoliton,
    to_sigma2,
    triangular_gauge_state,
    triangular_vacuum_defect,
    triangular_vacuum_g,
    triangular_vacuum_jets,
    unwrap_rows,
)

PTS = [(0.1, 0.2), (-1.0, 0.5), (2.0, -0.3)]
ONE = Sigma2Spec.admissible([1.0, 2.0, 3.0], [0.0, 0.3, 0.6])
MIXED = Sigma2Spec.admissible([0.5, 1 + 0.6j, 1 - 0.6j], [0.2, 0.5, 0.0], pair_scale=1.3)


def both(s, p):
    return max(map(abs, schl1_residual(s, p))), abs(s2_residual(s, p))


# -- change of variables ---------------------------------------------------------

def test_plane_phase_example():
    f = ExplicitFields(lambda X, T: (0 * X, (1j * X).exp()))
    th, R = to_sigma2(f).jets(0.4, 0.1, 2, 1)
    assert th.value == pytest.approx(0.4)
    assert th.deriv(1, 0) == pytest.approx(1)
    assert abs(R.value) < 1e-15


def test_constant_phase_and_amplitude():
    s = ExplicitSigma2(lambda X, T: (0 * X + 0.3, 0 * X + 1.5))
    u, v = from_sigma2(s).values(0.2, 0.1)
    assert u == pytest.approx(1.5 * np.exp(-0.3j))
    assert v == pytest.approx(np.exp(0.3j))


@given(st.lists(st.floats(-0.5, 0.5), min_size=6, max_size=6))
def test_round_trip_on_random_jets(cs):
    a = np.array(cs)

    def fn(X, T):
        th = a[0] + a[1] * X + a[2] * X * X * T + 0.3j * (a[3] * X).exp()
        R = a[4] + a[5] * X * T + 0.2 * X * X
        return th, R

    s = ExplicitSigma2(fn)
    back = to_sigma2(from_sigma2(s))
    for p in [(0.2, 0.1), (-0.4, 0.3)]:
        th0, R0 = s.jets(*p, 2, 1)
        th1, R1 = back.jets(*p, 2, 1)
        assert th1.is_close(th0, rtol=1e-11, atol=1e-11)
        assert R1.is_close(R0, rtol=1e-11, atol=1e-11)


def test_identity_shortcuts():
    s = ExplicitSigma2(lambda X, T: (X, 0 * X))
    assert to_sigma2(from_sigma2(s)) is s


def test_zero_v_rejected():
    f = ExplicitFields(lambda X, T: (X, 0 * X))
    with pytest.raises(ZeroDivisionError):
        to_sigma2(f).jets(0.0, 0.0, 2, 1)


def test_unwrap_reports_crossings():
    grid = SampleGrid(0, 12, 61, 0, 1, 2)
    raw = np.angle(np.exp(1j * grid.xs))[None, :].repeat(2, axis=0)
    theta, crossings = unwrap_rows(raw, grid)
    assert np.allclose(theta.real, grid.xs[None, :])
    assert len(crossings) == 4
    assert crossings[0][0] == pytest.approx(np.pi, abs=0.2)


# -- residuals --------------------------------------------------------------------

@pytest.mark.parametrize("lam0", [0.0, 0.7, -1.3])
def test_linear_background_is_exact(lam0):
    s = ExplicitSigma2(lambda X, T: (-2 * (lam0**2 * T + lam0 * X), 0 * X))
    for p in PTS:
        assert both(s, p) == (0, 0)


def test_printed_second_equation_differs():
    # x-dependent R exposes the sign of the flux terms
    sol = sigma2_nsoliton(ONE)
    p = (0.1, 0.2)
    assert max(map(abs, schl1_residual(sol, p))) <= 1e-8
    assert abs(schl1_residual(sol, p, form="printed")[1]) > 1e-3
    th = sol.jets(*p, 4, 2)[0]
    assert abs(s2_residual(th, form="printed")) > 1e-3


def test_s2_is_twice_the_reduced_second_equation():
    def theta(X, T):
        return 0.3 * X * X * T + (0.2j * X - 0.1 * T).exp() + X * T * T

    X, T = CJet.var_x(0.3, 6, 3), CJet.var_t(-0.2, 6, 3)
    th = theta(X, T)
    tx, tt = align(th.dx(), th.dt())
    R = tt + 0.5 * tx * tx
    first, second = schl1_residual((th.truncate(4, 2), R.truncate(4, 2)), None)
    assert abs(first) < 1e-13
    assert second == pytest.approx(2 * s2_residual(th.truncate(4, 2)), rel=1e-12)


def test_insufficient_order_raises():
    from solitonforge.numkit import JetOrderError

    with pytest.raises(JetOrderError):
        s2_residual(CJet.var_x(0.0, 3, 2))


# -- parameters ------------------------------------------------------------------

def test_validator_example_and_rejections():
    assert abs(ONE.cs[0]) ** 2 == pytest.approx(4, rel=1e-14)
    Sigma2Spec([1.0, 2.0, 3.0], [2.0, 1.0, 2.0])
    with pytest.raises(Sigma2ParameterError):
        Sigma2Spec([1.0, 2.0, 3.0], [2.0 * (1 + 1e-9), 1.0, 2.0])
    with pytest.raises(Sigma2ParameterError):
        Sigma2Spec([1.0, 2.0], [1.0, 1.0])
    with pytest.raises(Sigma2ParameterError):
        Sigma2Spec([0.5, 1 + 0.6j, 2 - 0.6j], [1.0, 1.0, 1.0])
    with pytest.raises(Sigma2ParameterError):
        Sigma2Spec([0.7], [1.0], convention="3L")


def test_pair_constraint():
    lams = MIXED.lambdas
    target = (lams[2] - lams[0]) ** 2 * (lams[2] - lams[1]) ** 2
    assert np.conj(MIXED.cs[1]) * MIXED.cs[2] == pytest.approx(target, rel=1e-12)


# -- solutions -------------------------------------------------------------------

def test_n0_is_linear_phase():
    sol = sigma2_nsoliton(Sigma2Spec([0.7], [1.0]))
    for p in PTS:
        th, R = sol.jets(*p, 4, 2)
        assert th.deriv(1, 0) == pytest.approx(-1.4)
        assert th.deriv(0, 1) == pytest.approx(-2 * 0.49)
        assert abs(R.value) < 1e-14
        assert both(sol, p) == pytest.approx((0, 0), abs=1e-13)


@pytest.mark.parametrize("spec", [ONE, MIXED], ids=["real", "pair"])
def test_n1_residuals_and_reality(spec):
    sol = sigma2_nsoliton(spec)
    for p in PTS:
        assert max(both(sol, p)) <= 1e-8
        th, R = sol.values(*p)
        assert abs(th.imag) <= 1e-10
        assert abs(R.imag) <= 1e-10
        assert sol.balance_defect(*p) <= 1e-10


def test_solution_gives_system_solution():
    f = from_sigma2(sigma2_nsoliton(MIXED))
    for p in PTS:
        assert max(map(abs, scnl_residual(f, *p))) <= 1e-8


def test_resolve_convention():
    rep = resolve_convention()
    assert rep.flag == "2L"
    assert rep.residuals["2L"] <= 1e-8
    assert rep.residuals["L"] > 1e-3
    n0 = resolve_convention([Sigma2Spec([0.7], [1.0])])
    assert n0.flag == rep.flag
    assert n0.residuals["L"] > 1e-3


# -- triangular vacuum --------------------------------------------------------------

def test_triangular_vacuum_at_origin():
    np.testing.assert_allclose(triangular_vacuum_g(2.0, 1.0, (0.0, 0.0)), [[1, 0], [0.5, 1]])


def test_triangular_vacuum_solves_linear_problem():
    for lam in (2.0, 0.3 + 0.4j, -1.5):
        for p in PTS:
            assert triangular_vacuum_defect(lam, 0.4, p) <= 1e-10


def test_triangular_vacuum_log_derivative():
    lam, p = 0.8 - 0.2j, (0.3, 0.4)
    g = triangular_vacuum_jets(lam, 0.4, p, 1, 0)
    val = np.array([[e.value for e in row] for row in g])
    gx = np.array([[e.deriv(1, 0) for e in row] for row in g])
    m = gx @ np.linalg.inv(val)
    assert m[0, 0] == pytest.approx(1j * lam)
    assert m[1, 1] == pytest.approx(-1j * lam)
    assert abs(m[0, 1]) < 1e-14


def test_triangular_vacuum_decays_for_large_lambda():
    off = [abs(triangular_vacuum_g(lam, 1.0, (0.0, 0.0))[1, 0]) for lam in (10.0, 100.0, 1000.0)]
    assert off[0] > off[1] > off[2]
    assert off[2] < 1e-3


def test_triangular_vacuum_pole():
    with pytest.raises(ZeroDivisionError):
        triangular_vacuum_g(1.0, 1.0, (0.0, 0.0))


# -- constraints ----------------------------------------------------------------------

L0 = 0.3
BPTS = [(0.4, 0.2), (-0.7, 0.5), (1.3, -0.4)]


def test_gauge_state_constants():
    s = triangular_gauge_state(1.2, L0, 0.0, BPTS[0])
    assert s.c1.value == pytest.approx(2 * (1.2 - L0))
    assert abs(s.c0.value) < 1e-13
    g = np.array([[e.value for e in row] for row in s.g()])
    assert np.linalg.det(g) == pytest.approx(1)
    np.testing.assert_allclose(g, triangular_vacuum_g(1.2, L0, BPTS[0]), atol=1e-13)


def _check_scan(reports, branch):
    assert all(r is not None for r in reports)
    for r in reports:
        assert r.branch == branch
        assert max(r.cc_defect, r.vic_defect, r.extra_defect) <= 1e-8
        assert r.identity_defect <= 1e-8
        assert r.iv_defect <= 1e-10
        if abs(r.C) <= 1:
            assert r.V_modulus_defect <= 1e-12


def test_real_branch():
    s1 = triangular_gauge_state(1.2, L0, 0, BPTS[0])
    s2 = triangular_gauge_state(-0.8, L0, 0, BPTS[0])
    nu1, nu2 = admissible_nu(s1, phase=0.7), admissible_nu(s2, phase=2.1)
    _check_scan(backlund_constraint_scan(1.2, nu1, -0.8, nu2, L0, BPTS), 1)


def test_conjugate_branch():
    lam, nu1 = 0.5 + 0.4j, 0.9 + 0.2j
    s1 = triangular_gauge_state(lam, L0, nu1, BPTS[0])
    s2 = triangular_gauge_state(lam.conjugate(), L0, 0, BPTS[0])
    nu2 = admissible_nu(s1, partner=s2)
    _check_scan(backlund_constraint_scan(lam, nu1, lam.conjugate(), nu2, L0, BPTS), 2)


def test_negative_control():
    for r in backlund_constraint_scan(1.2, 0.3 + 0.1j, -0.8, 1.7, L0, BPTS):
        assert r.branch is None
        assert r.cc_defect >= 1e-3


def test_singular_point_is_reported_not_fatal():
    # for real lambda and |nu| = |beta| the denominator beta + nu can vanish
    s = triangular_gauge_state(1.2, L0, 0, (0.0, 0.0))
    nu = -s.beta.value
    reps = backlund_constraint_scan(1.2, nu, -0.8, admissible_nu(triangular_gauge_state(-0.8, L0, 0, (0, 0))),
                                    L0, [(0.0, 0.0), (0.5, 0.1)])
    assert reps[0] is None
    assert reps[1] is not None


def test_non_unimodular_background_rejected():
    from solitonforge.sigma2 import sigma2_backlund_constraints

    s1 = triangular_gauge_state(1.2, L0, 0.5, BPTS[0])
    s2 = triangular_gauge_state(-0.8, L0, 0.5, BPTS[0])
    with pytest.raises(ValueError):
        sigma2_backlund_constraints(s1, s2, CJet.const(1.5, 4, 2))
