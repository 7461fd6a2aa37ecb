import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

import curvlab.jet as J
from curvlab._tables import multi_indices, ncoef, tables
from curvlab.errors import OrderExceeded, SingularDivisor
from curvlab.jet import Jet, extract_partial, jet_arith, jet_elementary, jet_var, jet_vars

from conftest import fd_partial

ORIGIN = (0.0, 0.0, 0.0, 0.0)


def coef(j, alpha):
    return j.coeffs[..., tables(j.order).index[tuple(alpha)]]


def test_ncoef():
    assert [ncoef(k) for k in range(5)] == [1, 5, 15, 35, 70]
    assert len(multi_indices(4)) == 70
    # graded: degree never decreases along the storage order
    degs = [sum(a) for a in multi_indices(4)]
    assert degs == sorted(degs)


def test_jet_var():
    j = jet_var(2, (0, 5, 0, 0), 4)
    assert j.value == 5
    assert coef(j, (0, 1, 0, 0)) == 1
    assert np.count_nonzero(j.coeffs) == 2


@pytest.mark.parametrize("i", [0, 5, 1.5])
def test_jet_var_bad_index(i):
    with pytest.raises(ValueError):
        jet_var(i, ORIGIN, 4)


def test_square():
    x = jet_var(1, (3, 0, 0, 0), 4)
    y = x * x
    assert y.value == 9
    assert extract_partial(y, (1, 0, 0, 0)) == 6
    assert coef(y, (2, 0, 0, 0)) == 1
    assert extract_partial(y, (2, 0, 0, 0)) == 2


def test_bilinear():
    x1, x2, x3, x4 = jet_vars((0, 1, 0, 2), 4)
    y = x2 * x4
    assert y.value == 2
    assert extract_partial(y, (0, 1, 0, 0)) == 2
    assert extract_partial(y, (0, 0, 0, 1)) == 1
    assert coef(y, (0, 1, 0, 1)) == 1


def test_division_identity():
    x = jet_var(1, ORIGIN, 4)
    q = (1 + x) / (1 + x)
    expected = np.zeros(70)
    expected[0] = 1
    np.testing.assert_allclose(q.coeffs, expected, atol=1e-15)


def test_singular_divisor():
    x = jet_var(1, ORIGIN, 4)
    with pytest.raises(SingularDivisor, match="singular divisor"):
        1.0 / x


def test_polynomial_exact():
    x1, x2, _, _ = jet_vars((0.5, -1.5, 0, 0), 4)
    p = (x1 * x1) * (x2 * x2)
    # naive oracle: d^a (x1^2 x2^2) = d^a1 x1^2 * d^a2 x2^2
    def d(k, t):
        return [t * t, 2 * t, 2.0, 0.0, 0.0][k]
    for alpha in multi_indices(4):
        if alpha[2] or alpha[3]:
            want = 0.0
        else:
            want = d(alpha[0], 0.5) * d(alpha[1], -1.5)
        assert extract_partial(p, alpha) == want


def test_exp_series():
    e = J.exp(jet_var(1, ORIGIN, 4) * 1.0)
    for k in range(5):
        assert coef(e, (k, 0, 0, 0)) == pytest.approx(1 / math.factorial(k), rel=1e-15)


def test_cos_series():
    c = J.cos(jet_var(4, ORIGIN, 4))
    assert c.value == 1
    assert coef(c, (0, 0, 0, 1)) == 0
    assert coef(c, (0, 0, 0, 2)) == -0.5


def test_exp_fourth_partial():
    e = J.exp(jet_var(4, ORIGIN, 4) * 2)
    assert extract_partial(e, (0, 0, 0, 4)) == pytest.approx(16, rel=1e-14)


def test_cos_squared():
    c = J.cos(jet_var(4, ORIGIN, 4))
    assert extract_partial(c * c, (0, 0, 0, 2)) == pytest.approx(-2, rel=1e-14)


def test_order_exceeded():
    j = jet_var(1, ORIGIN, 2)
    with pytest.raises(OrderExceeded, match="order exceeded"):
        extract_partial(j, (1, 1, 1, 0))


def test_log_nonpositive():
    with pytest.raises(ValueError):
        J.log(jet_var(1, (-1, 0, 0, 0), 3))


def test_jet_arith_checks():
    a = jet_var(1, ORIGIN, 3)
    b = jet_var(2, ORIGIN, 4)
    with pytest.raises(ValueError):
        jet_arith(a, b, "add")
    with pytest.raises(ValueError):
        jet_arith(a, jet_var(2, (1, 0, 0, 0), 3), "mul")
    with pytest.raises(ValueError):
        jet_arith(a, a, "pow")
    c = jet_var(2, ORIGIN, 3)
    np.testing.assert_array_equal(jet_arith(a, c, "sub").coeffs, (a - c).coeffs)


def test_elementary_dispatch():
    x = jet_var(3, (0, 0, 0.2, 0), 3)
    np.testing.assert_allclose(jet_elementary(x, "pow_int", 3).coeffs, (x * x * x).coeffs, rtol=1e-15)
    np.testing.assert_allclose(jet_elementary(x, "sinh").coeffs, J.sinh(x).coeffs)
    with pytest.raises(ValueError):
        jet_elementary(x, "tan")
    with pytest.raises(ValueError):
        jet_elementary(x, "pow_int")


def test_prefix_truncation():
    # an order-k jet is a prefix of an order-K jet of the same function
    x = (0.3, -0.2, 0.1, 0.4)
    f4 = J.exp(jet_var(1, x, 4) * jet_var(3, x, 4)) / (2 + J.cos(jet_var(2, x, 4)))
    f2 = J.exp(jet_var(1, x, 2) * jet_var(3, x, 2)) / (2 + J.cos(jet_var(2, x, 2)))
    np.testing.assert_allclose(f4.truncate(2).coeffs, f2.coeffs, rtol=1e-14)


def test_div_vs_finite_differences():
    j = 1.0 / (1 + jet_var(1, ORIGIN, 4))
    f = lambda t: 1 / (1 + t[0])
    for alpha in [(1, 0, 0, 0), (2, 0, 0, 0)]:
        assert extract_partial(j, alpha) == pytest.approx(fd_partial(f, ORIGIN, alpha, 1e-4), rel=1e-6)


def test_exp_vs_finite_differences():
    x = (0, 0, 0, 0.3)
    j = J.exp(jet_var(4, x, 4) * 2)
    f = lambda t: math.exp(2 * t[3])
    assert extract_partial(j, (0, 0, 0, 1)) == pytest.approx(fd_partial(f, x, (0, 0, 0, 1), 1e-5), rel=1e-6)
    assert extract_partial(j, (0, 0, 0, 2)) == pytest.approx(fd_partial(f, x, (0, 0, 0, 2), 1e-4), rel=1e-6)


def leibniz(a, b, alpha):
    total = 0.0
    for beta in product(*(range(k + 1) for k in alpha)):
        gamma = tuple(k - m for k, m in zip(alpha, beta))
        w = math.prod(math.comb(k, m) for k, m in zip(alpha, beta))
        total += w * extract_partial(a, beta) * extract_partial(b, gamma)
    return total


def test_leibniz_random_pairs(rng):
    for _ in range(100):
        a = Jet(rng.normal(size=70), 4)
        b = Jet(rng.normal(size=70), 4)
        p = a * b
        for alpha in multi_indices(4)[::7]:
            want = leibniz(a, b, alpha)
            assert extract_partial(p, alpha) == pytest.approx(want, rel=1e-12, abs=1e-12)


def _composite(x, lib):
    x1, x2, x3, x4 = x
    return lib.exp(x1 * x2) * lib.cos(x3 - x4 * 0.5) + lib.cosh(x2 * x3) / (2 + x1 * x1) + lib.log(3 + x4)


def test_composition_vs_finite_differences(rng):
    # 50 random basepoints, all partials up to order 2
    for _ in range(50):
        x = tuple(rng.uniform(-1, 1, size=4))
        j = _composite(jet_vars(x, 2), J)
        f = lambda t: _composite(t, np)
        for alpha in multi_indices(2)[1:]:
            fd = fd_partial(f, x, alpha, 1e-4)
            assert extract_partial(j, alpha) == pytest.approx(fd, rel=1e-6, abs=1e-6)


finite = st.floats(-2, 2, allow_nan=False)


@given(st.tuples(finite, finite, finite, finite))
def test_exp_log_roundtrip(x):
    v = jet_vars(x, 3)
    f = 2.5 + J.sin(v[0] + v[1] * v[2]) + v[3] * 0.1
    np.testing.assert_allclose(J.exp(J.log(f)).coeffs, f.coeffs, rtol=1e-12, atol=1e-12)


@given(st.tuples(finite, finite, finite, finite))
def test_pythagoras(x):
    v = jet_vars(x, 4)
    t = v[0] * v[1] - v[3]
    s, c = J.sin(t), J.cos(t)
    one = s * s + c * c
    assert one.value == pytest.approx(1, abs=1e-14)
    np.testing.assert_allclose(one.coeffs[1:], 0, atol=1e-11)
    sh, ch = J.sinh(t * 0.5), J.cosh(t * 0.5)
    np.testing.assert_allclose((ch * ch - sh * sh).coeffs[1:], 0, atol=1e-10)


@given(st.tuples(finite, finite, finite, finite), st.integers(-3, 5))
def test_pow_int_matches_repeated_product(x, n):
    v = jet_vars(x, 3)
    f = 1.5 + v[0] * 0.3 + v[2] * v[3] * 0.1
    ref = J.jet_const(1.0, x, 3)
    for _ in range(abs(n)):
        ref = ref * f
    if n < 0:
        ref = 1.0 / ref
    np.testing.assert_allclose((f ** n).coeffs, ref.coeffs, rtol=1e-11, atol=1e-12)


def test_deriv_lowers_order():
    x = (0.1, 0.2, 0.3, 0.4)
    v = jet_vars(x, 4)
    f = J.exp(v[0]) * v[1] * v[1]
    d = f.deriv(1)
    assert d.order == 3
    assert d.value == pytest.approx(2 * 0.2 * math.exp(0.1))
    assert extract_partial(d, (1, 0, 0, 0)) == pytest.approx(extract_partial(f, (1, 1, 0, 0)))
    with pytest.raises(OrderExceeded):
        jet_var(1, x, 1).deriv(0).deriv(0)


def test_contract_matches_einsum(rng):
    a = Jet(rng.normal(size=(4, 4, 35)), 3)
    b = Jet(rng.normal(size=(4, 4, 4, 35)), 3)
    c = J.contract("kl,ijl->kij", a, b)
    # value part is an ordinary einsum
    np.testing.assert_allclose(c.coeffs[..., 0], np.einsum("kl,ijl->kij", a.coeffs[..., 0], b.coeffs[..., 0]))
    # and each entry is a sum of jet products
    want = sum((a[1, l] * b[2, 3, l] for l in range(4)), a[0, 0] * 0.0)
    np.testing.assert_allclose(c[1, 2, 3].coeffs, want.coeffs, rtol=1e-12)


def test_mixed_orders_truncate():
    a = jet_var(1, ORIGIN, 4)
    b = jet_var(2, ORIGIN, 2)
    assert (a * b).order == 2
