"""Truncated-series operators: phi, psi, deriv, Gamma, and the solver."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iwk import oracle
from iwk.padic_core import Qp, cyclo_ring
from iwk.series import (
    NonconvergentError,
    TruncSeries,
    deriv,
    ell_apply,
    gamma_action,
    log1p_t,
    one,
    one_plus_pi_power,
    phi,
    pi,
    psi,
    solve_one_minus_phi,
)

R = Qp(5, 14)
D = 16


def ints(f_coeffs):
    return TruncSeries.from_ints(R, f_coeffs, D)


small_series = st.lists(
    st.integers(min_value=-50, max_value=50), min_size=1, max_size=5
)


class TestRingStructure:
    def test_mul_matches_manual_convolution(self):
        f = ints([1, 2, 3])
        g = ints([4, 0, 5])
        h = f * g
        want = ints([4, 8, 17, 10, 15])
        assert h.agrees_to(want, 14)

    def test_truncation_drops_overflow(self):
        f = TruncSeries.monomial(R, D, D)
        assert (f * pi(R, D)).is_zero_to(14)

    def test_evaluate_cross_ring(self):
        C = cyclo_ring(5, 1, 14)
        f = ints([0, 1, 1])  # pi + pi^2
        z = C.zeta()
        got = f.evaluate(z - C.one())
        want = (z - C.one()) + (z - C.one()) * (z - C.one())
        assert got.agrees_to(want, 14)

    def test_compose_requires_zero_constant(self):
        f = ints([1, 1])
        with pytest.raises(ValueError):
            f.compose(ints([1, 1]))
        f.compose(ints([1, 1]), allow_constant=True)

    def test_compose_linear_shift_is_exact_on_polynomials(self):
        f = ints([2, 0, 1])  # 2 + pi^2
        s = ints([3, 1])  # 3 + pi
        got = f.compose(s, allow_constant=True)
        want = ints([11, 6, 1])  # 2 + (3+pi)^2
        assert got.agrees_to(want, 14)


class TestOnePlusPiPower:
    def test_small_positive_exponent(self):
        e7 = one_plus_pi_power(R, 7, D)
        acc = one(R, D)
        base = ints([1, 1])
        for _ in range(7):
            acc = acc * base
        assert e7.agrees_to(acc, 14)

    def test_negative_exponent_inverts(self):
        em1 = one_plus_pi_power(R, -1, D)
        assert (em1 * ints([1, 1])).agrees_to(one(R, D), 14)

    def test_huge_exponent_congruence(self):
        # (1+pi)^(p^k) = 1 + pi^(p^k) mod p, coefficientwise
        f = one_plus_pi_power(R, 5**3, D)
        for d in range(1, D + 1):
            assert f.coeffs[d].is_zero_to(1) or d == 5**3


class TestPhi:
    def test_phi_one(self):
        assert phi(one(R, D)).agrees_to(one(R, D), 14)

    def test_phi_pi_definition(self):
        want = TruncSeries.from_ints(R, [0, 5, 10, 10, 5, 1], D)
        assert phi(pi(R, D)).agrees_to(want, 14)

    def test_phi_t_is_p_t(self):
        t = log1p_t(R, D)
        assert phi(t).agrees_to(t.scale(5), 14)

    def test_phi_is_ring_hom(self):
        f = ints([1, 2, 0, 1])
        g = ints([0, 3, 1])
        assert phi(f * g).agrees_to(phi(f) * phi(g), 14)

    def test_phi_binomial_basis_rule(self):
        # phi((1+pi)^k) = (1+pi)^(pk)
        f = one_plus_pi_power(R, 3, D)
        assert phi(f).agrees_to(one_plus_pi_power(R, 15, D), 14)


class TestPsi:
    def test_psi_one(self):
        assert psi(one(R, D)).agrees_to(one(R, D), 14)

    def test_psi_basis_rule(self):
        f = one_plus_pi_power(R, 5, D)
        assert psi(f).agrees_to(one_plus_pi_power(R, 1, D), 14)
        g = one_plus_pi_power(R, 7, D)
        assert psi(g).is_zero_to(14)

    def test_psi_pi_is_minus_one(self):
        got = psi(pi(R, D))
        want = one(R, D).scale(-1)
        assert got.agrees_to(want, 14)

    @settings(max_examples=40, deadline=None)
    @given(small_series)
    def test_psi_matches_mu_p_average_oracle(self, coeffs):
        p = 5
        got = psi(ints(coeffs))
        want = oracle.brute_psi(coeffs, p)
        for d in range(D + 1):
            w = want[d] if d < len(want) else Fraction(0)
            assert got.coeffs[d].agrees_to(R.from_fraction(w), 14)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.integers(min_value=-50, max_value=50), min_size=1, max_size=4))
    def test_psi_phi_is_identity(self, coeffs):
        f = ints(coeffs)  # degree <= 3 = D//p, so phi does not truncate
        assert psi(phi(f)).agrees_to(f, 14)

    @settings(max_examples=30, deadline=None)
    @given(small_series, st.lists(st.integers(-9, 9), min_size=1, max_size=3))
    def test_projection_formula(self, fc, gc):
        # psi(f * phi(g)) = psi(f) * g, exact for small-degree polynomials
        f, g = ints(fc), ints(gc)
        lhs = psi(f * phi(g))
        rhs = psi(f) * g
        assert lhs.agrees_to(rhs, 14)


class TestDeriv:
    def test_deriv_pi(self):
        assert deriv(pi(R, D)).agrees_to(ints([1, 1]), 14, up_to_degree=D - 1)

    def test_deriv_one_plus_pi_power(self):
        for k in (1, 4):
            f = one_plus_pi_power(R, k, D)
            assert deriv(f).agrees_to(f.scale(k), 14, up_to_degree=D - 1)

    def test_deriv_t_is_one(self):
        assert deriv(log1p_t(R, D)).agrees_to(one(R, D), 14, up_to_degree=D - 1)

    def test_deriv_phi_commutation(self):
        f = ints([0, 2, 1, 0, 3])
        lhs = deriv(phi(f))
        rhs = phi(deriv(f)).scale(5)
        assert lhs.agrees_to(rhs, 14, up_to_degree=D - 1)

    def test_psi_deriv_commutation(self):
        # psi after deriv = p * deriv after psi, on a polynomial window
        f = ints([3, 1, 4, 1, 5])
        lhs = psi(deriv(f))
        rhs = deriv(psi(f)).scale(5)
        assert lhs.agrees_to(rhs, 14, up_to_degree=D // 5 - 1)


class TestGamma:
    def test_identity(self):
        f = ints([1, 2, 3])
        assert gamma_action(1, f).agrees_to(f, 14)

    def test_action_on_t(self):
        t = log1p_t(R, D)
        # t has 1/p coefficients, so one digit of the working precision is spent
        for c in (2, 6, -1):
            assert gamma_action(c, t).agrees_to(t.scale(c), 13)

    def test_group_law(self):
        f = ints([1, 0, 2, 1])
        lhs = gamma_action(2, gamma_action(3, f))
        rhs = gamma_action(6, f)
        assert lhs.agrees_to(rhs, 14)

    def test_involution_square(self):
        f = ints([5, 1, 0, 2])
        assert gamma_action(-1, gamma_action(-1, f)).agrees_to(f, 14)

    def test_commutes_with_phi(self):
        f = ints([0, 1, 2])
        assert gamma_action(3, phi(f)).agrees_to(phi(gamma_action(3, f)), 14)

    def test_chain_rule(self):
        f = ints([1, 1, 1, 1])
        c = 3
        lhs = deriv(gamma_action(c, f))
        rhs = gamma_action(c, deriv(f)).scale(c)
        assert lhs.agrees_to(rhs, 14, up_to_degree=D - 1)

    def test_padic_unit_exponent(self):
        c = R.from_int(7)
        f = ints([0, 1, 3])
        assert gamma_action(c, f).agrees_to(gamma_action(7, f), 14)


class TestEll:
    def test_j0_on_constant(self):
        assert ell_apply(0, one(R, D)).is_zero_to(14, up_to_degree=D - 1)

    def test_j0_on_power(self):
        k = 3
        f = one_plus_pi_power(R, k, D)
        want = (log1p_t(R, D) * f).scale(k)
        assert ell_apply(0, f).agrees_to(want, 13, up_to_degree=D - 1)

    def test_j1_kills_t(self):
        assert ell_apply(1, log1p_t(R, D)).is_zero_to(13, up_to_degree=D - 1)


class TestSolver:
    def test_zero(self):
        assert solve_one_minus_phi(TruncSeries.zero(R, D)).is_zero_to(14)

    def test_solves_pi(self):
        y = solve_one_minus_phi(pi(R, D))
        assert (y - phi(y)).agrees_to(pi(R, D), 13)
        # degree-1 coefficient is sum of p^n = 1/(1-p)
        assert y.coeffs[1].agrees_to(R.from_fraction(Fraction(1, 1 - 5)), 13)

    def test_round_trip(self):
        rng = random.Random(11)
        for _ in range(5):
            g = ints([0] + [rng.randrange(-99, 99) for _ in range(D)])
            x = g - phi(g)
            assert solve_one_minus_phi(x).agrees_to(g, 13)

    def test_matches_iterated_sum(self):
        x = ints([0, 3, 0, 1])
        y = solve_one_minus_phi(x)
        acc = TruncSeries.zero(R, D)
        term = x
        for _ in range(200):
            nxt = acc + term
            if all(
                a.agrees_to(b, 14) for a, b in zip(nxt.coeffs, acc.coeffs)
            ):
                break
            acc = nxt
            term = phi(term)
        assert y.agrees_to(acc, 12)

    def test_constant_obstruction(self):
        with pytest.raises(NonconvergentError):
            solve_one_minus_phi(one(R, D))

    def test_eigenvalue_obstruction_row(self):
        lam = Fraction(1, 5)
        with pytest.raises(NonconvergentError):
            solve_one_minus_phi(pi(R, D), eigenvalue=lam)
        x = TruncSeries.from_ints(R, [0, 0, 1, 4], D)
        y = solve_one_minus_phi(x, eigenvalue=lam)
        lam_s = R.from_fraction(lam)
        assert (y - phi(y).scale(lam_s)).agrees_to(x, 12)
        assert y.coeffs[1].is_zero_to(12)

    def test_unit_eigenvalue(self):
        lam = 3
        x = ints([1, 2, 3])
        y = solve_one_minus_phi(x, eigenvalue=lam)
        assert (y - phi(y).scale(lam)).agrees_to(x, 13)
