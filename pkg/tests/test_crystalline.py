"""Tests for the finite phi-module layer."""

import random
from fractions import Fraction

import pytest
import sympy

from iwk.crystalline import (
    CrysModule,
    crys_from_json_dict,
    crys_to_json_dict,
    euler_operators,
    factorials_check,
    gamma_factor,
    gamma_star,
    random_module,
    unramified_twist,
)
from iwk.iwasawa_algebra import DeRhamChar, gamma_context
from iwk.padic_core import (
    NoSolutionError,
    PadicScalar,
    PrecisionError,
    unramified_field,
)

P = 5
N = 14
# wide precision budget: star-values of long ell-products burn digits
CTX_F = gamma_context(P, 24, 20)


def chi_j(j):
    return DeRhamChar(P, j)


class TestGammaStar:
    def test_pinned_values(self):
        assert gamma_star(1) == 1
        assert gamma_star(0) == 1
        assert gamma_star(-2) == Fraction(1, 2)

    def test_positive_is_factorial(self):
        for r in range(1, 8):
            assert gamma_star(r) == sympy.factorial(r - 1)

    def test_matches_taylor_leading_coefficient_of_gamma(self):
        s = sympy.Symbol("s")
        for r in range(-5, 6):
            if r > 0:
                expect = sympy.gamma(r)
            else:
                expect = sympy.residue(sympy.gamma(s), s, r)
            q = sympy.Rational(expect)
            assert gamma_star(r) == Fraction(int(q.p), int(q.q))


class TestGammaFactor:
    def test_pinned_values(self):
        assert gamma_factor([1]) == 1
        assert gamma_factor([3]) == Fraction(1, 2)
        assert gamma_factor([]) == 1

    def test_multiplicative_on_weight_multisets(self):
        rng = random.Random(7)
        for _ in range(30):
            a = [rng.randrange(-6, 7) for _ in range(rng.randrange(0, 4))]
            b = [rng.randrange(-6, 7) for _ in range(rng.randrange(0, 4))]
            assert gamma_factor(a + b) == gamma_factor(a) * gamma_factor(b)

    def test_multiplicative_under_direct_sum(self):
        rng = random.Random(11)
        m1 = random_module(P, N, [0, 2], rng)
        m2 = random_module(P, N, [-1], rng)
        s = m1.direct_sum(m2)
        assert gamma_factor(s) == gamma_factor(m1) * gamma_factor(m2)
        assert s.weights == (-1, 0, 2)
        assert s.det_phi.agrees_to(m1.det_phi * m2.det_phi, N - 1)


class TestCrysModule:
    def test_tate_module_data(self):
        m = CrysModule(P, N, [[Fraction(1, P)]], [1])
        assert (m.d, m.m) == (1, 1)
        assert m.fil_jumps == {1: 1}
        assert m.det_phi.val == -1

    def test_determinant_valuation_enforced(self):
        with pytest.raises(ValueError):
            CrysModule(P, N, [[1]], [1])

    def test_non_invertible_rejected(self):
        with pytest.raises(PrecisionError):
            CrysModule(P, N, [[0]], [0])

    def test_random_modules_admissible_by_construction(self):
        rng = random.Random(3)
        for weights in ([0], [1, 1], [-2, 0, 3], [2, -1, 0, 1]):
            m = random_module(P, N, weights, rng)
            assert m.det_phi.val == -sum(weights)
            assert m.weights == tuple(sorted(weights))

    def test_random_module_over_unramified_field(self):
        rng = random.Random(5)
        m = random_module(P, N, [0, 1], rng, f=2)
        assert m.det_phi.val == -1
        assert m.field is unramified_field(P, N, 2, 0)

    def test_json_round_trip(self):
        rng = random.Random(9)
        for f in (1, 3):
            m = random_module(P, N, [-1, 2], rng, f=f)
            m2 = crys_from_json_dict(crys_to_json_dict(m))
            assert m2.weights == m.weights
            for r1, r2 in zip(m.phi, m2.phi):
                for x, y in zip(r1, r2):
                    assert x.agrees_to(y, N - abs(x.val))


class TestEulerOperators:
    def test_tate_module_flags(self):
        m = CrysModule(P, N, [[Fraction(1, P)]], [1])
        ops = euler_operators(m)
        assert not ops.bad_one
        assert ops.bad_pinv
        assert ops.det_one_minus_phi.agrees_to(
            PadicScalar.from_fraction(P, 1 - Fraction(1, P), N), N - 2
        )

    def test_trivial_module_flags(self):
        m = CrysModule(P, N, [[1]], [0])
        ops = euler_operators(m)
        assert ops.bad_one
        assert not ops.bad_pinv

    def test_generic_diagonal_is_clean(self):
        m = CrysModule(P, N, [[2, 0], [0, Fraction(1, 2 * P)]], [0, 1])
        ops = euler_operators(m)
        assert not ops.bad_one
        assert not ops.bad_pinv

    def test_twisted_variant_detects_shifted_eigenvalue(self):
        m = CrysModule(P, N, [[Fraction(1, P)]], [1])
        assert euler_operators(m, j=1).bad_one
        assert not euler_operators(m, j=2).bad_one

    def test_twist_by_chi_j_rescales_operator(self):
        rng = random.Random(13)
        m = random_module(P, N, [0, 1, 1], rng)
        w, _ = unramified_twist(m, chi_j(2))
        lhs = euler_operators(w, j=0).det_one_minus_phi
        rhs = euler_operators(m, j=-2).det_one_minus_phi
        # the dets sit at large negative valuation; compare relative digits
        assert lhs.agrees_to(rhs, rhs.val + N - 3)


class TestUnramifiedTwist:
    def test_trivial_character(self):
        rng = random.Random(17)
        m = random_module(P, N, [0, 2], rng)
        w, period = unramified_twist(m, chi_j(0))
        assert w.weights == m.weights
        assert period.agrees_to(PadicScalar.from_int(P, 1, N), N)
        for r1, r2 in zip(m.phi, w.phi):
            for x, y in zip(r1, r2):
                # entries reach valuation -2, which caps absolute precision
                assert x.agrees_to(y, N - 3)

    def test_cyclotomic_twist_of_trivial_module(self):
        m = CrysModule(P, N, [[1]], [0])
        w, period = unramified_twist(m, chi_j(1))
        assert w.weights == (1,)
        assert w.phi[0][0].val == -1
        assert period.agrees_to(PadicScalar.from_int(P, 1, N), N)

    def test_weight_sum_shift(self):
        rng = random.Random(19)
        m = random_module(P, N, [-1, 0, 2], rng)
        w, _ = unramified_twist(m, chi_j(3))
        assert w.m == m.m + 3 * m.d
        assert w.weights == (2, 3, 5)

    def test_period_solves_frobenius_equation(self):
        rng = random.Random(23)
        field = unramified_field(P, N, 3, 0)
        u0 = field.teichmuller([1, 1, 0])
        alpha = u0 ** (P - 1)  # solvable by construction: sigma(u0) = alpha u0
        m = random_module(P, N, [0, 1], rng, f=3)
        eta = DeRhamChar(P, 2, unram_value=alpha)
        w, period = unramified_twist(m, eta)
        assert w.weights == (2, 3)
        assert field.frobenius(period).agrees_to(alpha * period, N - 1)

    def test_inverse_twist_round_trips_with_period_product_one(self):
        rng = random.Random(29)
        field = unramified_field(P, N, 3, 0)
        alpha = field.teichmuller([2, 1, 0]) ** (P - 1)
        m = random_module(P, N, [1], rng, f=3)
        eta = DeRhamChar(P, 1, unram_value=alpha)
        w, u1 = unramified_twist(m, eta)
        back, u2 = unramified_twist(w, eta.inverse())
        assert back.weights == m.weights
        for r1, r2 in zip(m.phi, back.phi):
            for x, y in zip(r1, r2):
                assert x.agrees_to(y, N - 2)
        assert (u1 * u2).agrees_to(field.one(N), N - 1)

    def test_norm_obstruction_raises(self):
        rng = random.Random(31)
        field = unramified_field(P, N, 3, 0)
        # teich(2) has order 4 in the residue field, norm 2^31 = 3 != 1
        u0 = field.teichmuller([2, 0, 0])
        assert not field.norm(u0).agrees_to(PadicScalar.from_int(P, 1, N), 1)
        m = random_module(P, N, [0], rng, f=3)
        with pytest.raises(NoSolutionError):
            unramified_twist(m, DeRhamChar(P, 0, unram_value=u0))

    def test_scalar_minus_one_needs_bigger_field(self):
        m = CrysModule(P, N, [[1]], [0])
        eta = DeRhamChar(P, 0, unram_value=PadicScalar.from_int(P, -1, N))
        with pytest.raises(NoSolutionError):
            unramified_twist(m, eta)

    def test_non_crystalline_rejected(self):
        m = CrysModule(P, N, [[1]], [0])
        with pytest.raises(ValueError):
            unramified_twist(m, DeRhamChar(P, 1, tame_index=2))
        with pytest.raises(ValueError):
            unramified_twist(m, DeRhamChar(P, 1, wild_level=1, wild_exponent=1))


class TestFactorials:
    def test_weight_one_trivial_character(self):
        lhs, rhs, ok = factorials_check(CTX_F, [1], 0, digits=8)
        assert rhs == 1
        assert ok
        assert lhs.agrees_to(CTX_F.ring.from_int(1), 8)

    def test_high_twist_no_vanishing(self):
        lhs, rhs, ok = factorials_check(CTX_F, [2], 3, digits=8)
        assert rhs == 1
        assert ok

    def test_negative_weight_pole_case(self):
        lhs, rhs, ok = factorials_check(CTX_F, [-2], -1, digits=8)
        assert rhs == 1
        assert ok

    def test_zero_weight_reduction_is_rational_identity(self):
        # all weights 0: the claim collapses to an exact reflection formula
        for d in range(1, 5):
            for j in range(-6, 9):
                r = d if j < 0 else 0
                sign = -1 if (j * d + r) % 2 else 1
                lhs = gamma_star(1 + j) ** d
                rhs = sign * gamma_factor([-j] * d)
                assert lhs == rhs

    def test_random_instances(self):
        rng = random.Random(37)
        for _ in range(25):
            d = rng.randrange(1, 4)
            weights = [rng.randrange(-3, 5) for _ in range(d)]
            j = rng.randrange(-4, 6)
            _, _, ok = factorials_check(CTX_F, weights, j, digits=8)
            assert ok
