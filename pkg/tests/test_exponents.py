import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_admissible, seeds
from mlweights.exponents import (
    DimensionError,
    DomainError,
    Exp,
    ExpVector,
    RVector,
    apq_reduction,
    apr_characterization,
    as_fraction,
    derived_exponents,
    gamma_t,
    hold,
    prec,
    preceq,
    rvec,
    rvec_prec,
    t0,
)

F = Fraction


class TestExp:
    def test_infinity_is_zero_recip(self):
        assert Exp.of("inf").recip == 0
        assert Exp.of(math.inf).is_infinite
        assert Exp.of("inf").value == math.inf

    def test_conjugate(self):
        assert Exp.of(3).conj() == Exp.of(F(3, 2))
        assert Exp.of(1).conj().is_infinite
        with pytest.raises(DomainError):
            Exp.of(F(1, 2)).conj()

    def test_float_goes_through_decimal(self):
        assert as_fraction(0.1) == F(1, 10)

    def test_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            Exp.of(0)
        with pytest.raises(DomainError):
            Exp(F(-1))

    @given(st.lists(st.fractions(min_value=F(1, 20), max_value=20, max_denominator=20), min_size=1, max_size=5))
    def test_holder_sum_exact(self, ps):
        v = hold(ps)
        assert v.holder_sum.recip == sum(1 / x for x in ps)


class TestRelations:
    def test_preceq_examples(self):
        assert preceq(rvec([1, 1, 1]), hold([2, 2]))
        assert preceq(rvec([1, 1, 2]), hold([2, 2]))
        assert not preceq(rvec([3, 3, 1]), hold([2, 2]))

    def test_prec_examples(self):
        assert prec(rvec([1, 1, 1]), hold([2, 2]))
        # p = 1 and r'_3 = 2 > 1, r_i = 1 < 2: all strict
        assert prec(rvec([1, 1, 2]), hold([2, 2]))
        assert not prec(rvec([2, 2, 1]), hold([2, 4]))

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            preceq(rvec([1, 1]), hold([2, 2]))
        with pytest.raises(DimensionError):
            prec(rvec([1, 1, 1, 1]), hold([2, 2]))

    def test_rvector_rejects_infinite_entries(self):
        with pytest.raises(DomainError):
            rvec([1, "inf", 1])

    def test_rvec_prec(self):
        assert rvec_prec(rvec([1, 1, 1]), rvec([F(3, 2), F(3, 2), 1]))
        assert not rvec_prec(rvec([1, 1, 1]), rvec([1, F(3, 2), 1]))

    @given(seeds)
    def test_prec_implies_preceq(self, seed):
        rng = random.Random(seed)
        p, r = random_admissible(rng, rng.randint(1, 4))
        if prec(r, p):
            assert preceq(r, p)


class TestDerived:
    def test_bilinear_example(self):
        d = derived_exponents(hold([2, 2]), rvec([1, 1, 1]))
        assert d.delta == (2, 2, 1)
        assert d.theta == (F(2, 3), F(2, 3))

    def test_degenerate_delta(self):
        d = derived_exponents(hold([3]), rvec([3, 1]))
        assert d.delta_recip[0] == 0
        assert d.delta[0] == math.inf

    def test_example_four_four(self):
        d = derived_exponents(hold([4, 4]), rvec([2, 2, 2]))
        assert d.p_m1_recip == F(1, 2)
        assert d.delta_recip == (F(1, 4), F(1, 4), 0)
        assert d.r_recip == F(3, 2)
        assert d.theta_recip == (F(1, 4), F(1, 4))

    def test_not_admissible(self):
        with pytest.raises(DomainError):
            derived_exponents(hold([2, 2]), rvec([3, 3, 1]))

    @given(seeds)
    def test_identities_exact(self, seed):
        rng = random.Random(seed)
        p, r = random_admissible(rng, rng.randint(1, 4))
        d = derived_exponents(p, r)
        total = sum(d.delta_recip)
        assert all(x >= 0 for x in d.delta_recip)
        assert all(x >= 0 for x in d.theta_recip)
        for i in range(p.m):
            assert d.theta_recip[i] == r.r_recip - 1 - d.delta_recip[i]
            assert total - d.delta_recip[i] == d.theta_recip[i]
        assert d.p_m1_recip == 1 - p.holder_sum.recip

    @given(seeds)
    def test_deterministic(self, seed):
        rng = random.Random(seed)
        p, r = random_admissible(rng, 3)
        assert derived_exponents(p, r) == derived_exponents(p, r)


class TestCharacterization:
    def test_bilinear(self):
        conds = apr_characterization(hold([2, 2]), rvec([1, 1, 1]))
        got = [(c.target, c.base_weight_power, c.ap_index) for c in conds]
        assert got == [(2, 1, 2), (0, F(2, 3), F(4, 3)), (1, F(2, 3), F(4, 3))]

    def test_esssup_flag_for_degenerate(self):
        conds = apr_characterization(hold([4, 4]), rvec([2, 2, 2]))
        assert conds[0].esssup and conds[0].ap_index is None
        assert [(c.power, c.ap_index) for c in conds[1:]] == [(4, 2), (4, 2)]

    def test_m1_degenerate_flags_esssup(self):
        # r'_2 = p makes 1/delta_2 = 0, and for m = 1 that forces 1/theta_1 = 0 too
        conds = apr_characterization(hold([2]), rvec([1, 2]))
        assert all(c.esssup for c in conds)

    @given(seeds)
    def test_indices_at_least_one(self, seed):
        rng = random.Random(seed)
        p, r = random_admissible(rng, rng.randint(1, 4))
        if r.r_recip <= 1:
            with pytest.raises(DomainError):
                apr_characterization(p, r)
            return
        for c in apr_characterization(p, r):
            if not c.esssup:
                assert c.ap_index >= 1


class TestReductions:
    def test_apq_examples(self):
        assert apq_reduction(hold([2, 2]), 1) == rvec([1, 1, 1])
        assert apq_reduction(hold([2, 2]), 2) == rvec([1, 1, 2])
        assert apq_reduction(hold([3, 3, 3]), F(3, 2)).recips[-1] == F(2, 3)

    def test_apq_rejects_q_below_p(self):
        with pytest.raises(DomainError):
            apq_reduction(hold([4, 4]), 1)

    def test_gamma_t_examples(self):
        assert gamma_t(rvec([1, 1, 1]), 2) == rvec([2, 2, 1])
        assert gamma_t(rvec([2, 2, 2]), F(3, 2)) == rvec([3, 3, 2])
        with pytest.raises(DomainError):
            gamma_t(rvec([1, 1, 1]), 1)

    @given(seeds, st.fractions(min_value=F(1, 100), max_value=1, max_denominator=100))
    def test_gamma_t_monotone(self, seed, frac):
        rng = random.Random(seed)
        p, r = random_admissible(rng, rng.randint(1, 3))
        top = t0(p, r)
        if top <= 1 or top > 100:
            return
        t1 = 1 + (top - 1) * frac
        if preceq(gamma_t(r, t1), p):
            for k in range(1, 6):
                assert preceq(gamma_t(r, 1 + (t1 - 1) / 2**k), p)
