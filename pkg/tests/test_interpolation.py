import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from helpers import lp_effective_powers, random_int_lim_case, random_int_lp_case, seeds
from mlweights.exponents import DomainError, Exp, hold, preceq, rvec
from mlweights.interpolation import (
    AAAFailure,
    AAAInput,
    DiagonalEndpoint,
    aaa_quantities,
    conj,
    diagonal_norm,
    random_diagonal_instance,
    rh_exponent,
    solve_AAA,
    solve_int_lim,
    solve_int_Lp,
    stein_weiss,
    verify_log_convexity,
)
from mlweights.power_weights import PowerWeight, in_Ap, in_Apr, limited_range_member

F = Fraction
W = PowerWeight


def concrete_input():
    return AAAInput((4,), (8,), (2,), (4,), (F(3, 2),), (F(3, 2),))


class TestAAA:
    def test_concrete_instance_back_substitution(self):
        inp = concrete_input()
        out = solve_AAA(inp)
        t = out.theta
        g, gt, e, et = F(4), F(8), F(2), F(4)
        gh, eh = out.gamma_hat[0], out.eta_hat[0]
        # recompute every intermediate directly from its defining identity
        assert 1 / g == (1 - t) / gh + t / gt
        assert 1 / e == (1 - t) / eh + t / et
        alpha, beta = t * e / (et / (et - 1)), t * (e / (e - 1)) / et
        assert out.alpha[0] == alpha and out.beta[0] == beta
        assert out.kappa[0] == gh * (1 + alpha) / (g * (1 - t))
        assert out.kappa_t[0] == (eh / (eh - 1)) * (1 + beta) / ((e / (e - 1)) * (1 - t))
        assert out.kappa[0] < F(3, 2) and out.kappa_t[0] < F(3, 2)
        assert out.margin > 0

    def test_first_admissible_theta(self):
        out = solve_AAA(concrete_input())
        earlier = aaa_quantities(concrete_input(), out.theta * 2, 0)
        assert earlier is None or not (earlier["kappa"] < F(3, 2) and earlier["kappa_t"] < F(3, 2))

    def test_symmetric_endpoints(self):
        inp = AAAInput((3,), (3,), (2,), (2,), (F(5, 4),), (F(5, 4),))
        out = solve_AAA(inp)
        assert out.gamma_hat == (3,) and out.eta_hat == (2,)

    def test_kappa_tends_to_one(self):
        inp = concrete_input()
        gaps = [abs(float(aaa_quantities(inp, F(1, 2**k), 0)["kappa"]) - 1) for k in range(4, 40, 4)]
        assert all(b < a for a, b in zip(gaps, gaps[1:]))
        assert gaps[-1] < 1e-9

    def test_ratio_invariant(self):
        with pytest.raises(DomainError):
            AAAInput((4,), (8,), (2,), (3,), (2,), (2,))

    def test_failure_report(self):
        tau = 1 + F(1, 2**80)
        with pytest.raises(AAAFailure) as exc:
            solve_AAA(AAAInput((4,), (8,), (2,), (4,), (tau,), (tau,)))
        assert exc.value.index == 0 and exc.value.margin < 0 and exc.value.k == 64

    def test_conj(self):
        assert conj(F(3)) == F(3, 2)
        with pytest.raises(DomainError):
            conj(F(1))


class TestReverseHolderExponent:
    def test_constant_weight_uses_sharp_branch(self):
        assert rh_exponent(0, 2, 1) == 1 + F(1, 2**6)
        assert rh_exponent(0, 1, 1) == F(5, 4)

    def test_large_index_uses_infinity_branch(self):
        # 2^{n+1+2p} overtakes 2^{n+11} once p > 5
        assert rh_exponent(0, 20, 1) == 1 + F(1, 2**12)

    def test_analytic_range(self):
        t = rh_exponent(F(-1, 2), 2, 1, mode="analytic")
        assert 1 < t < 2

    def test_rejects_non_member(self):
        with pytest.raises(DomainError):
            rh_exponent(-1, 2, 1)


class TestIntLp:
    def test_identical_endpoints(self):
        p, w = hold([3, 3]), [W(F(1, 5)), W(0)]
        sol = solve_int_Lp(p, w, p, w, rvec([F(6, 5), F(6, 5), F(3, 2)]))
        assert sol.ok
        assert sol.s == p and sol.u == tuple(w)

    def test_two_four(self):
        ones = [W(0), W(0)]
        sol = solve_int_Lp(hold([2, 2]), ones, hold([4, 4]), ones, rvec([1, 1, 1]))
        assert sol.ok
        assert sol.u == tuple(ones)
        t = sol.theta
        for s in sol.s.recips:
            assert F(1, 2) == (1 - t) * s + t * F(1, 4)

    def test_nontrivial_weight(self):
        p, r = hold([2, 2]), rvec([1, 1, 1])
        sol = solve_int_Lp(p, [W(F(1, 4)), W(0)], p, [W(0), W(0)], r)
        assert sol.ok
        # membership is re-derived here rather than read off the checks
        assert preceq(r, sol.s) and in_Apr(list(sol.u), sol.s, r).in_class

    def test_precondition(self):
        with pytest.raises(DomainError):
            solve_int_Lp(hold([2, 2]), [W(1), W(1)], hold([2, 2]), [W(0), W(0)], rvec([1, 1, 1]))

    def test_extreme_power_blocks_theta_search(self):
        # a large effective power drives the sharp reverse Hölder exponent below 1 + 2^-64
        rng = random.Random(0)
        while True:
            case = random_int_lp_case(rng, cap=None)
            if max(abs(b) for b in lp_effective_powers(*case)) > 60:
                break
        with pytest.raises(AAAFailure):
            solve_int_Lp(*case)

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_random_cases(self, seed):
        p, w, q, v, r = random_int_lp_case(random.Random(seed))
        sol = solve_int_Lp(p, w, q, v, r)
        assert sol.ok, sol.checks
        t = sol.theta
        for i in range(p.m):
            assert p.recips[i] == (1 - t) * sol.s.recips[i] + t * q.recips[i]
        assert in_Apr(list(sol.u), sol.s, r).in_class


class TestIntLim:
    def test_identical_endpoints(self):
        p, w = hold([F(3, 2)]), [W(F(1, 10))]
        sol = solve_int_lim(p, w, p, w, [1], [2])
        assert sol.ok and sol.s == p and sol.u == tuple(w)

    def test_constant_weights(self):
        sol = solve_int_lim(hold([F(3, 2)]), [W(0)], hold([F(3, 2)]), [W(0)], [F(6, 5)], [2])
        assert sol.ok and sol.s[0] == Exp.of(F(3, 2)) and sol.u == (W(0),)

    def test_full_pipeline(self):
        sol = solve_int_lim(hold([F(3, 2)]), [W(F(1, 10))], hold([F(4, 3)]), [W(F(-1, 10))], [1], [2])
        assert sol.ok
        s = sol.s.recips[0]
        gh, eh = sol.diagnostics.gamma_hat[0], sol.diagnostics.eta_hat[0]
        assert eh == gh * (1 - F(1, 2))
        # sigma = (p^+/s)' and eta = sigma (s/p^- - 1) + 1, recomputed from s alone
        sigma = 1 / (1 - F(1, 2) / s)
        assert eh == sigma * (1 / s - 1) + 1
        assert limited_range_member(sol.u[0], sol.s[0], 1, 2).in_class
        assert in_Ap(sol.u[0].pow(gh), eh).in_class

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            solve_int_lim(hold([3]), [W(0)], hold([F(3, 2)]), [W(0)], [1], [2])

    @settings(max_examples=25, deadline=None)
    @given(seeds)
    def test_random_cases(self, seed):
        p, w, q, v, lo, hi = random_int_lim_case(random.Random(seed))
        sol = solve_int_lim(p, w, q, v, lo, hi)
        assert sol.ok, sol.checks
        for i in range(p.m):
            assert Exp.of(hi[i]).recip < sol.s.recips[i] < Exp.of(lo[i]).recip
            assert limited_range_member(sol.u[i], sol.s[i], lo[i], hi[i]).in_class


class TestSteinWeiss:
    def test_arithmetic(self):
        p, w = stein_weiss(2, W(0), 4, W(0), F(1, 2))
        assert p.recip == F(3, 8) and w.a == 0

    def test_power_exponent(self):
        t = F(1, 3)
        p, w = stein_weiss(2, W(1), 4, W(-F(1, 2)), t)
        pv = 1 / p.recip
        assert w.a == (1 - t) * (pv / 2) * 1 + t * (pv / 4) * F(-1, 2)
        # substituting back: a/p = (1-t) a0/p0 + t a1/p1
        assert w.a * p.recip == (1 - t) * F(1, 2) + t * F(-1, 8)

    def test_composition(self):
        # interpolating twice is one interpolation with 1 - (1-t1)(1-t2)
        t1, t2 = F(1, 3), F(2, 5)
        e0, w0, e1, w1 = Exp.of(2), W(F(1, 2)), Exp.of(5), W(-1)
        mid = stein_weiss(e0, w0, e1, w1, t1)
        twice = stein_weiss(*mid, e1, w1, t2)
        once = stein_weiss(e0, w0, e1, w1, t1 + t2 - t1 * t2)
        assert twice == once

    def test_theta_range(self):
        with pytest.raises(DomainError):
            stein_weiss(2, W(0), 4, W(0), 1)


class TestLogConvexity:
    def test_zero_symbol(self):
        rng = np.random.default_rng(0)
        _, e1, e2 = random_diagonal_instance(rng)
        rep = verify_log_convexity(np.zeros(e1.w_out.shape), e1, e2)
        assert rep.ok and rep.m1 == rep.m2 == 0 and max(rep.m_theta) == 0

    def test_single_index_equality(self):
        e1 = DiagonalEndpoint((2.0, 3.0), np.array([[2.0], [0.5]]), 1.5, np.array([3.0]))
        e2 = DiagonalEndpoint((4.0, 1.0), np.array([[0.3], [7.0]]), 2.0, np.array([0.2]))
        rep = verify_log_convexity([1.7], e1, e2)
        for t, mt in zip(rep.thetas, rep.m_theta):
            assert mt == pytest.approx(rep.m1 ** (1 - t) * rep.m2**t, rel=1e-13)

    def test_norm_formula(self):
        # l^2 x l^2 -> l^1 is multiplication by an l^inf symbol
        ep = DiagonalEndpoint((2.0, 2.0), np.ones((2, 3)), 1.0, np.ones(3))
        assert diagonal_norm([1.0, 5.0, 2.0], ep) == 5.0
        # l^2 -> l^1 needs an l^2 symbol
        ep = DiagonalEndpoint((2.0,), np.ones((1, 2)), 1.0, np.ones(2))
        assert diagonal_norm([3.0, 4.0], ep) == pytest.approx(5.0)

    @given(seeds)
    def test_random_instances(self, seed):
        rng = np.random.default_rng(seed)
        c, e1, e2 = random_diagonal_instance(rng)
        assert verify_log_convexity(c, e1, e2).ok
