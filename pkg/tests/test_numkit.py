import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from solitonforge.numkit import (
    CJet,
    JetOrderError,
    JetZeroDivision,
    SingularMatrixError,
    determinant,
    jet_arith,
    jet_det,
    jet_exp_log,
    jet_solve,
    lu_factor,
    lu_solve,
)

coef = st.floats(-2, 2, allow_nan=False)
cplx = st.builds(complex, coef, coef)


def analytic_jet(fn, x0, t0, ox, ot):
    """Jet of fn(X, T) at (x0, t0) together with a sampler for finite differences."""
    X, T = CJet.var_x(x0, ox, ot), CJet.var_t(t0, ox, ot)
    return fn(X, T)


def fd_x(f, x, t, h=1e-5):
    return (f(x + h, t) - f(x - h, t)) / (2 * h)


def fd_xx(f, x, t, h=1e-4):
    return (f(x + h, t) - 2 * f(x, t) + f(x - h, t)) / h**2


def fd_t(f, x, t, h=1e-5):
    return (f(x, t + h) - f(x, t - h)) / (2 * h)


def cofactor_det(M):
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if n == 1:
        return M[0, 0]
    return sum((-1) ** j * M[0, j] * cofactor_det(np.delete(M[1:], j, axis=1)) for j in range(n))


# -- jets ---------------------------------------------------------------------------

def test_constant_product():
    assert jet_arith(CJet.const(2.0, 2, 1), "*", CJet.const(3.0, 2, 1)).is_close(CJet.const(6.0, 2, 1))


def test_x_squared_coefficients():
    X = CJet.var_x(0.0, 2, 0)
    np.testing.assert_allclose((X * X).c[:, 0], [0, 0, 1])


def test_log_of_exp_is_x():
    X = CJet.var_x(0.0, 2, 0)
    np.testing.assert_allclose(jet_exp_log(X.exp(), "log").c[:, 0], [0, 1, 0], atol=1e-15)
    assert jet_exp_log(CJet.const(2.0), "log").value == pytest.approx(math.log(2))


def test_deriv_extracts_factorials():
    X, T = CJet.var_x(0.3, 4, 2), CJet.var_t(0.0, 4, 2)
    f = X**4 * T * T
    assert f.deriv(4, 2) == pytest.approx(24 * 2)
    assert f.deriv(3, 2) == pytest.approx(24 * 0.3 * 2)


def test_order_mismatch_and_zero_division():
    with pytest.raises(JetOrderError):
        CJet.const(1.0, 2, 1) + CJet.const(1.0, 3, 1)
    with pytest.raises(JetZeroDivision):
        CJet.const(1.0, 2, 1) / CJet.var_x(0.0, 2, 1)
    with pytest.raises(JetZeroDivision):
        CJet.var_x(0.0, 2, 1).log()


@given(st.lists(cplx, min_size=6, max_size=6), cplx)
def test_division_inverts_multiplication(cs, b0):
    a = CJet(np.array(cs).reshape(3, 2))
    b = CJet(np.array([[b0 + 3, 0.2], [0.5j, 0.1], [0.3, -0.2j]]))
    assert ((a * b) / b).is_close(a, rtol=1e-13, atol=1e-13)


@given(st.lists(cplx, min_size=4, max_size=4), cplx)
def test_exp_log_roundtrip(cs, v0):
    c = np.zeros((3, 2), dtype=complex)
    c[0, 0] = v0 + 2.5
    c[1:, :] = np.array(cs).reshape(2, 2) * 0.5
    a = CJet(c)
    assert a.log().exp().is_close(a, rtol=1e-12, atol=1e-13)
    s = a.sqrt()
    assert (s * s).is_close(a, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize(
    "name, fn, npfn",
    [
        ("log", lambda X, T: (X * X + 1.5 + 0.5j * T).log(), lambda x, t: np.log(x * x + 1.5 + 0.5j * t)),
        ("exp", lambda X, T: (0.7j * X - 0.3 * T * X).exp(), lambda x, t: np.exp(0.7j * x - 0.3 * t * x)),
        ("sqrt", lambda X, T: (2 + X + 1j * T).sqrt(), lambda x, t: np.sqrt(2 + x + 1j * t)),
        ("recip", lambda X, T: 1 / (3 + X * T + 1j * X), lambda x, t: 1 / (3 + x * t + 1j * x)),
    ],
)
def test_jet_derivatives_match_finite_differences(name, fn, npfn, rng):
    for x0, t0 in rng.uniform(-1, 1, size=(25, 2)):
        j = analytic_jet(fn, x0, t0, 3, 2)
        assert j.value == pytest.approx(npfn(x0, t0), rel=1e-13)
        assert abs(j.deriv(1, 0) - fd_x(npfn, x0, t0)) <= 1e-7 * max(1, abs(j.deriv(1, 0)))
        assert abs(j.deriv(0, 1) - fd_t(npfn, x0, t0)) <= 1e-7 * max(1, abs(j.deriv(0, 1)))
        assert abs(j.deriv(2, 0) - fd_xx(npfn, x0, t0)) <= 1e-5 * max(1, abs(j.deriv(2, 0)))


# -- linear algebra ----------------------------------------------------------------------

def test_lu_solve_examples():
    np.testing.assert_allclose(lu_solve(np.eye(3), [1, 2j, 3]), [1, 2j, 3])
    np.testing.assert_allclose(lu_solve([[0, 1], [1, 0]], [1, 2]), [2, 1])


def test_lu_solve_random_residual(rng):
    for _ in range(20):
        M = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        b = rng.normal(size=8) + 1j * rng.normal(size=8)
        x = lu_solve(M, b)
        assert np.linalg.norm(M @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_singular_matrix_reports_pivot():
    with pytest.raises(SingularMatrixError) as err:
        lu_factor([[1, 2, 3], [2, 4, 6], [0, 0, 1]])
    assert err.value.pivot_index == 1


def test_determinant_examples():
    assert determinant(np.eye(4)) == pytest.approx(1)
    assert determinant([[0, 1], [1, 0]]) == pytest.approx(-1)
    assert determinant([[1, 2], [2, 4]]) == 0


def test_determinant_matches_cofactor_expansion(rng):
    for _ in range(10):
        M = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        ref = cofactor_det(M)
        assert abs(determinant(M) - ref) <= 1e-11 * abs(ref)


@given(st.integers(0, 10_000))
def test_determinant_is_multiplicative(seed):
    r = np.random.default_rng(seed)
    M = r.normal(size=(5, 5)) + 1j * r.normal(size=(5, 5))
    N = r.normal(size=(5, 5)) + 1j * r.normal(size=(5, 5))
    lhs, rhs = determinant(M @ N), determinant(M) * determinant(N)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


def _jet_matrix(n, x0, t0, ox=3, ot=1):
    X, T = CJet.var_x(x0, ox, ot), CJet.var_t(t0, ox, ot)
    return [[(X * (i + 1) + T * j).exp() + (i == j) * 3 for j in range(n)] for i in range(n)]


def _value_fn(n):
    def f(x, t):
        return np.array([[np.exp(x * (i + 1) + t * j) + (i == j) * 3 for j in range(n)] for i in range(n)])
    return f


def test_jet_det_and_solve_derivatives():
    n, x0, t0 = 3, 0.2, -0.1
    D = jet_det(_jet_matrix(n, x0, t0))
    f = _value_fn(n)
    dfun = lambda x, t: np.linalg.det(f(x, t))
    assert D.value == pytest.approx(dfun(x0, t0), rel=1e-12)
    assert D.deriv(1, 0) == pytest.approx(fd_x(dfun, x0, t0), rel=1e-7)
    assert D.deriv(0, 1) == pytest.approx(fd_t(dfun, x0, t0), rel=1e-7)

    b = [CJet.const(1.0 + k, 3, 1) for k in range(n)]
    sol = jet_solve(_jet_matrix(n, x0, t0), b)
    sfun = lambda x, t: np.linalg.solve(f(x, t), np.arange(1.0, n + 1))
    for k in range(n):
        assert sol[k].value == pytest.approx(sfun(x0, t0)[k], rel=1e-12)
        assert sol[k].deriv(1, 0) == pytest.approx(fd_x(lambda x, t: sfun(x, t)[k], x0, t0), rel=1e-6)


def test_jet_det_handles_zero_value_pivot():
    X = CJet.var_x(0.0, 2, 0)
    one = CJet.const(1.0, 2, 0)
    M = [[X, one], [one, X]]  # det = x^2 - 1, first pivot value 0
    np.testing.assert_allclose(jet_det(M).c[:, 0], [-1, 0, 1], atol=1e-15)


def test_small_determinants_exact_against_permutation_sum(rng):
    for n in (1, 2, 3):
        M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ref = sum(
            np.prod([M[i, p[i]] for i in range(n)]) * np.linalg.det(np.eye(n)[list(p)])
            for p in itertools.permutations(range(n))
        )
        assert abs(determinant(M) - ref) <= 1e-14 * max(1, abs(ref))
