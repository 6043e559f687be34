import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tailkit import jet as J
from tailkit.errors import DivisionByZeroJet, DomainError, OrderExhausted
from tailkit.jet import Jet, jet_arith, jet_const, jet_elementary, jet_shift_derivative, jet_var


def close(a, b, rel=1e-12, abso=1e-12):
    return abs(a - b) <= max(abso, rel * max(abs(a), abs(b)))


def jets_close(a: Jet, b: Jet, rel=1e-12):
    assert a.order == b.order
    for x, y in zip(a.coeffs, b.coeffs):
        assert close(x, y, rel=rel), (a.coeffs, b.coeffs)


class TestConstructors:
    def test_const(self):
        j = jet_const(5.0, 2.0, 3)
        assert j.coeffs == (5.0, 0.0, 0.0, 0.0)
        assert jet_const(0.0, 0.0, 0).coeffs == (0.0,)
        assert jet_const(1.0, -3.0, 2).coeffs == (1.0, 0.0, 0.0)

    def test_var(self):
        assert jet_var(2.0, 2).coeffs == (2.0, 1.0, 0.0)
        assert jet_var(0.0, 1).coeffs == (0.0, 1.0)
        assert jet_var(-1.7, 4).coeffs == (-1.7, 1.0, 0.0, 0.0, 0.0)

    def test_order_cap(self):
        with pytest.raises(DomainError):
            jet_var(0.0, 17)

    def test_nonfinite_rejected(self):
        with pytest.raises(DomainError):
            Jet(0.0, (1.0, math.inf))


class TestArith:
    def test_square_of_x(self):
        x = jet_var(3.0, 2)
        sq = jet_arith(x, x, "mul")
        assert sq.coeffs == (9.0, 6.0, 1.0)

    def test_self_division_identity(self):
        a = Jet(1.0, (2.0, -0.3, 0.7, 0.1))
        one = jet_arith(a, a, "div")
        jets_close(one, jet_const(1.0, 1.0, 3))

    def test_one_plus_x_over_x_at_1(self):
        # hand expansion: (1+x)/x = 2 - (x-1) + (x-1)^2 - ... at x=1
        x = jet_var(1.0, 2)
        num = 1.0 + x
        q = jet_arith(num, x, "div")
        jets_close(q, Jet(1.0, (2.0, -1.0, 1.0)))

    def test_division_by_zero_floor(self):
        x = jet_var(0.0, 2)
        with pytest.raises(DivisionByZeroJet):
            jet_arith(jet_const(1.0, 0.0, 2), x, "div")

    def test_anchor_mismatch(self):
        with pytest.raises(DomainError):
            jet_arith(jet_var(0.0, 1), jet_var(1.0, 1), "add")


class TestElementary:
    def test_exp_of_zero(self):
        e = jet_elementary(jet_const(0.0, 5.0, 3), "exp")
        assert e.coeffs == (1.0, 0.0, 0.0, 0.0)

    def test_ln_exp_roundtrip(self):
        x = jet_var(1.0, 3)
        back = jet_elementary(jet_elementary(x, "exp"), "ln")
        jets_close(back, x)

    def test_sqrt_at_4(self):
        # Taylor of sqrt(x) at 4: 2 + (x-4)/4 - (x-4)^2/64
        s = jet_elementary(jet_var(4.0, 2), "sqrt")
        jets_close(s, Jet(4.0, (2.0, 0.25, -0.015625)))

    def test_pow_matches_exp_ln(self):
        a = Jet(2.0, (2.0, 1.0, -0.5, 0.25))
        p = jet_elementary(a, "pow", 1.7)
        via = jet_elementary(1.7 * jet_elementary(a, "ln"), "exp")
        jets_close(p, via)

    def test_domain_errors(self):
        neg = jet_const(-1.0, 0.0, 2)
        for fn in ("ln", "sqrt"):
            with pytest.raises(DomainError):
                jet_elementary(neg, fn)


class TestShiftDerivative:
    def test_x_squared(self):
        sq = Jet(3.0, (9.0, 6.0, 1.0))
        assert jet_shift_derivative(sq).coeffs == (6.0, 2.0)

    def test_constant(self):
        d = jet_shift_derivative(jet_const(4.0, 0.0, 3))
        assert d.coeffs == (0.0, 0.0, 0.0)

    def test_exp_derivative_matches_itself(self):
        e4 = jet_elementary(jet_var(0.0, 4), "exp")
        dd = jet_shift_derivative(jet_shift_derivative(e4))
        e2 = jet_elementary(jet_var(0.0, 2), "exp")
        jets_close(dd, e2)

    def test_order_exhausted(self):
        with pytest.raises(OrderExhausted):
            jet_shift_derivative(jet_const(1.0, 0.0, 0))


finite_coeff = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


@st.composite
def smooth_jets(draw, min_order=2, max_order=6):
    order = draw(st.integers(min_value=min_order, max_value=max_order))
    anchor = draw(st.floats(min_value=-3, max_value=3, allow_nan=False))
    coeffs = tuple(draw(finite_coeff) for _ in range(order + 1))
    return Jet(anchor, coeffs)


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(smooth_jets(), st.data())
    def test_product_rule(self, a, data):
        b = Jet(a.anchor, tuple(data.draw(finite_coeff) for _ in range(a.order + 1)))
        lhs = jet_shift_derivative(a * b)
        rhs = jet_shift_derivative(a) * Jet(b.anchor, b.coeffs[:-1]) + Jet(
            a.anchor, a.coeffs[:-1]
        ) * jet_shift_derivative(b)
        for x, y in zip(lhs.coeffs, rhs.coeffs):
            assert close(x, y, rel=1e-12, abso=1e-9)

    @settings(max_examples=100, deadline=None)
    @given(smooth_jets(), st.data())
    def test_division_round_trip(self, a, data):
        # round-trip error is measured against the backward scale (the
        # largest product magnitude per coefficient): a divisor with a
        # tiny leading coefficient conditions the quotient by
        # (|b_k|/|b_0|)^order and a plain relative test would only
        # measure that amplification
        b_coeffs = tuple(data.draw(finite_coeff) for _ in range(a.order + 1))
        if abs(b_coeffs[0]) < 1e-6:
            b_coeffs = (1.0,) + b_coeffs[1:]
        b = Jet(a.anchor, b_coeffs)
        c = a / b
        back = c * b
        for k in range(a.order + 1):
            scale = max(
                abs(a.coeffs[k]),
                max(abs(c.coeffs[j] * b.coeffs[k - j]) for j in range(k + 1)),
                1.0,
            )
            assert abs(back.coeffs[k] - a.coeffs[k]) / scale < 1e-12

    def test_finite_difference_consistency(self):
        # order-1 coefficient vs central finite difference for two test
        # functions at 20 anchors in [-5, 5]
        def gauss_jet(x0):
            x = jet_var(x0, 1)
            return jet_elementary(-0.5 * x * x, "exp")

        def rational_jet(x0):
            x = jet_var(x0, 1)
            return 1.0 / (1.0 + x * x)

        def gauss(x):
            return math.exp(-0.5 * x * x)

        def rational(x):
            return 1.0 / (1.0 + x * x)

        h = 1e-5
        anchors = [-5 + 10 * i / 19 for i in range(20)]
        for build, f in ((gauss_jet, gauss), (rational_jet, rational)):
            for x0 in anchors:
                fd = (f(x0 + h) - f(x0 - h)) / (2 * h)
                d1 = build(x0).coeffs[1]
                assert close(d1, fd, rel=1e-6, abso=1e-9)


def test_backend_reported():
    assert J.KERNEL_BACKEND in ("c", "python")
