import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from storesched import (
    AssumptionViolated,
    Lemma1Class,
    NoNegativePrices,
    NotNegativePrice,
    PriceSeries,
    Prop1Case,
    Recommendation,
    Schedule,
    StorageParams,
    SubsetSearchInconclusive,
    advise,
    corollary2_inexact,
    lemma1_classify,
    partition,
    propagate_soe,
    prop1_classify,
    theorem1_condition1,
    theorem1_condition2,
    theorem2_check,
    theorem3_shat,
)


def unit_storage(p_chg, p_dis, eta=0.9, rho=1.0, s_init=0.0):
    return StorageParams(
        s_min=0.0, s_max=1.0, s_init=s_init,
        p_chg_max=p_chg, p_dis_max=p_dis,
        eta_c=eta, eta_d=eta, rho=rho, dt=1.0,
    )


def series(values):
    return PriceSeries(np.asarray(values, dtype=float), 1.0)


def run_series(n_pos_before, n_neg, n_pos_after):
    values = [10.0] * n_pos_before + [-10.0] * n_neg + [10.0] * n_pos_after
    return series(values)


class TestProp1:
    def test_all_positive_lossy(self):
        verdict = prop1_classify(unit_storage(0.2, 0.2), partition(series([5, 1])))
        assert verdict.case is Prop1Case.EXACT_ALL_OPTIMA
        assert verdict.exact

    def test_perfect_efficiency(self):
        verdict = prop1_classify(
            unit_storage(0.2, 0.2, eta=1.0), partition(series([-5, 1]))
        )
        assert verdict.case is Prop1Case.EXACT_SOME_OPTIMUM_PERFECT_ETA

    def test_no_negative_prices_with_zero(self):
        verdict = prop1_classify(unit_storage(0.2, 0.2), partition(series([0, 1])))
        assert verdict.case is Prop1Case.EXACT_SOME_OPTIMUM_NO_NEG_PRICES

    def test_inconclusive(self):
        verdict = prop1_classify(unit_storage(0.2, 0.2), partition(series([-5, 1])))
        assert verdict.case is Prop1Case.INCONCLUSIVE
        assert not verdict.exact


class TestCorollary2:
    def test_one_period_full_cycle(self):
        assert corollary2_inexact(unit_storage(2.0, 2.0))

    def test_slow_storage(self):
        assert not corollary2_inexact(unit_storage(0.2, 0.2))

    def test_strict_boundary(self):
        # exactly reaching the bounds does not fire the strict inequalities
        params = unit_storage(1 / 0.9, 0.9)
        assert not corollary2_inexact(params)

    def test_one_sided_is_not_enough(self):
        assert not corollary2_inexact(unit_storage(2.0, 0.2))
        assert not corollary2_inexact(unit_storage(0.2, 2.0))


class TestTheorem1Cond1:
    def test_critical_power_threshold(self):
        # flips at p_chg = 1 / (32 * 0.9) for a 32-period run without leakage
        prices = run_series(2, 32, 2)
        part = partition(prices)
        critical = 1 / (32 * 0.9)
        assert theorem1_condition1(unit_storage(critical + 1e-4, 0.1), part)
        assert not theorem1_condition1(unit_storage(critical - 1e-4, 0.1), part)

    def test_boundary_is_not_inexact(self):
        part = partition(run_series(1, 4, 1))
        assert not theorem1_condition1(unit_storage(1 / (4 * 0.9), 0.1), part)

    def test_requires_negative_prices(self):
        with pytest.raises(NoNegativePrices):
            theorem1_condition1(unit_storage(0.2, 0.2), partition(series([1, 2])))

    def test_leakage_raises_the_bar(self):
        part = partition(run_series(1, 4, 1))
        p = 1 / (4 * 0.9) + 1e-4
        assert theorem1_condition1(unit_storage(p, 0.1), part)
        assert not theorem1_condition1(unit_storage(p, 0.1, rho=0.95), part)


class TestTheorem1Cond2:
    def test_balanced_split_witness(self):
        # 32-period run; 31 charge periods and 1 discharge period land
        # exactly on the capacity: 0.9*0.036*31 - 0.00396/0.9 = 1.0
        part = partition(run_series(2, 32, 2))
        params = unit_storage(0.036, 0.00396)
        witness = theorem1_condition2(params, part, s_fixed=0.0)
        assert witness is not None
        assert len(witness.charge_set) == 31
        assert len(witness.discharge_set) == 1
        assert witness.s == 0.0

    def test_no_witness_at_fixed_level(self):
        part = partition(run_series(2, 32, 2))
        params = unit_storage(0.036, 0.036)
        assert theorem1_condition2(params, part, s_fixed=0.0) is None

    def test_free_level_widens_the_search(self):
        part = partition(run_series(2, 32, 2))
        params = unit_storage(0.034, 0.028)
        assert theorem1_condition2(params, part, s_fixed=0.0) is None
        witness = theorem1_condition2(params, part)
        assert witness is not None
        assert 0.0 <= witness.s <= 1.0

    def test_leakage_enumeration(self):
        part = partition(run_series(1, 3, 1))
        params = unit_storage(0.3, 0.3, rho=0.99)
        witness = theorem1_condition2(params, part)
        if witness is not None:
            assert set(witness.charge_set) | set(witness.discharge_set) == {2, 3, 4}

    def test_enumeration_cap(self):
        part = partition(run_series(1, 23, 1))
        with pytest.raises(SubsetSearchInconclusive):
            theorem1_condition2(unit_storage(0.2, 0.2, rho=0.99), part)

    def test_cap_does_not_apply_without_leakage(self):
        part = partition(run_series(1, 23, 1))
        theorem1_condition2(unit_storage(0.2, 0.2, rho=1.0), part)


class TestTheorem2:
    def test_critical_power_threshold(self):
        # tau1=11, tau2=14, s_init=0, rho=1: flips at 1 / (4 * 0.9)
        prices = run_series(10, 4, 10)
        part = partition(prices)
        critical = 1 / (4 * 0.9)
        assert theorem2_check(unit_storage(critical - 1e-4, 0.27), part)
        assert not theorem2_check(unit_storage(critical + 1e-4, 0.27), part)

    def test_boundary_is_exact(self):
        part = partition(run_series(10, 4, 10))
        assert theorem2_check(unit_storage(1 / (4 * 0.9), 0.27), part)

    def test_initial_level_discharged_first(self):
        part = partition(run_series(10, 4, 10))
        # full start, but 10 periods of max discharge reach the floor
        params = unit_storage(0.27, 0.27, s_init=1.0)
        assert theorem2_check(params, part)
        # too little discharge power to make room in time
        params = unit_storage(0.27, 0.008, s_init=1.0)
        assert not theorem2_check(params, part)

    def test_multiple_blocks_fail_the_precondition(self):
        part = partition(series([-1, 5, -1]))
        assert not theorem2_check(unit_storage(0.01, 0.5), part)


class TestTheorem3:
    BLOCKS = [(13, 2), (19, 8), (16, 8), (6, 0)]

    def _prices(self):
        chunks = []
        for p, n in self.BLOCKS:
            chunks.extend([10.0] * p)
            chunks.extend([-10.0] * n)
        return series(chunks)

    def test_fast_storage_violates_at_second_block(self):
        part = partition(self._prices())
        shat = theorem3_shat(unit_storage(0.2, 0.2), part)
        assert shat.values[0] == pytest.approx(0.36, abs=0.01)
        assert shat.values[1] == pytest.approx(1.44, abs=0.01)
        assert shat.first_violation == 2
        assert not shat.exact

    def test_slow_storage_stays_within_capacity(self):
        part = partition(self._prices())
        shat = theorem3_shat(unit_storage(0.1, 0.1), part)
        expected = [0.18, 0.72, 0.72, 0.0533]
        assert shat.first_violation is None
        assert shat.exact
        for got, want in zip(shat.values, expected):
            assert got == pytest.approx(want, abs=0.01)

    def test_assumption_guard(self):
        part = partition(self._prices())
        with pytest.raises(AssumptionViolated):
            theorem3_shat(unit_storage(0.01, 0.2, rho=0.5), part)

    def test_specializes_to_theorem2_without_leakage(self):
        # with a single negative block and rho = 1 the block recurrence
        # reduces to the single-run capacity check
        rng = np.random.default_rng(5)
        for _ in range(200):
            pre = int(rng.integers(0, 8))
            n = int(rng.integers(1, 7))
            post = int(rng.integers(1, 6))
            params = unit_storage(
                float(rng.uniform(0.02, 0.6)),
                float(rng.uniform(0.02, 0.6)),
                eta=float(rng.uniform(0.8, 1.0)),
                s_init=float(rng.uniform(0.0, 1.0)),
            )
            part = partition(run_series(pre, n, post))
            shat = theorem3_shat(params, part)
            # the single negative run always falls in the first block
            violated = shat.first_violation == 1
            assert theorem2_check(params, part) == (not violated)

    @given(
        p_chg=st.floats(0.02, 0.5),
        scale=st.floats(1.1, 3.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_shat_monotone_in_charge_power(self, p_chg, scale):
        part = partition(run_series(3, 4, 3))
        small = theorem3_shat(unit_storage(p_chg, 0.2), part)
        big = theorem3_shat(unit_storage(min(p_chg * scale, 1.0), 0.2), part)
        for a, b in zip(small.values, big.values):
            assert b >= a - 1e-12


class TestLemma1:
    def _optimum_like(self, params, p_chg, p_dis):
        soe = propagate_soe(params, p_chg, p_dis)
        return Schedule(p_chg=np.asarray(p_chg, float), p_dis=np.asarray(p_dis, float), soe=soe)

    def test_net_charge_max(self):
        params = unit_storage(0.2, 0.2)
        sch = self._optimum_like(params, [0.2], [0.0])
        verdict = lemma1_classify(params, series([-5.0]), sch, 1)
        assert verdict.classification is Lemma1Class.NET_CHARGE_MAX
        assert verdict.beta_t == pytest.approx(0.18)

    def test_net_discharge_max(self):
        params = unit_storage(0.2, 0.2, s_init=1.0)
        sch = self._optimum_like(params, [0.0], [0.2])
        verdict = lemma1_classify(params, series([-5.0]), sch, 1)
        assert verdict.classification is Lemma1Class.NET_DISCHARGE_MAX

    def test_interior_means_scd_optimal(self):
        params = unit_storage(0.2, 0.2, s_init=0.5)
        sch = self._optimum_like(params, [0.1], [0.0])
        verdict = lemma1_classify(params, series([-5.0]), sch, 1)
        assert verdict.classification is Lemma1Class.SCD_OPTIMAL

    def test_rejects_nonnegative_price(self):
        params = unit_storage(0.2, 0.2)
        sch = self._optimum_like(params, [0.2], [0.0])
        with pytest.raises(NotNegativePrice):
            lemma1_classify(params, series([5.0]), sch, 1)

    def test_period_out_of_range(self):
        params = unit_storage(0.2, 0.2)
        sch = self._optimum_like(params, [0.2], [0.0])
        with pytest.raises(ValueError):
            lemma1_classify(params, series([-5.0]), sch, 2)


class TestAdvise:
    def test_prop1_short_circuit(self):
        advice = advise(unit_storage(2.0, 2.0, eta=1.0), partition(series([-5, 5])))
        assert advice.recommendation is Recommendation.SOLVE_LP
        assert advice.rationale[0][0] == "prop1" and advice.rationale[0][1]

    def test_corollary2_route(self):
        advice = advise(unit_storage(2.0, 2.0), partition(series([-5, 5])))
        assert advice.recommendation is Recommendation.SOLVE_REFINED_MILP
        assert [r for r, fired, _ in advice.rationale if fired] == ["corollary2"]

    def test_final_level_branch(self):
        params = unit_storage(0.1, 0.1)
        part = partition(run_series(10, 4, 10))
        assert advise(params, part).recommendation is Recommendation.SOLVE_LP
        constrained = advise(params, part, final_level_constrained=True)
        assert constrained.recommendation is Recommendation.SOLVE_REFINED_MILP
        assert any(r == "final_level" and fired for r, fired, _ in constrained.rationale)

    def test_theorem1_route(self):
        params = unit_storage(0.5, 0.5)
        advice = advise(params, partition(run_series(2, 4, 2)))
        assert advice.recommendation is Recommendation.SOLVE_REFINED_MILP
        assert advice.rationale[-1][0] == "theorem1_cond1"

    def test_theorem2_leaf(self):
        advice = advise(unit_storage(0.1, 0.2), partition(run_series(10, 4, 10)))
        assert advice.recommendation is Recommendation.SOLVE_LP
        assert advice.rationale[-1][0] == "theorem2"

    def test_theorem3_leaf(self):
        prices = series([10] * 5 + [-10] * 2 + [10] * 5 + [-10] * 2 + [10] * 3)
        advice = advise(unit_storage(0.05, 0.2), partition(prices))
        assert advice.recommendation is Recommendation.SOLVE_LP
        assert advice.rationale[-1][0] == "theorem3"

    def test_leakage_assumption_routes_to_milp(self):
        params = unit_storage(0.01, 0.2, rho=0.5)
        advice = advise(params, partition(run_series(10, 4, 10)))
        assert advice.recommendation is Recommendation.SOLVE_REFINED_MILP
        assert any(r == "leakage_assumption" and fired for r, fired, _ in advice.rationale)

    def test_serialization_schema(self):
        doc = advise(unit_storage(2.0, 2.0), partition(series([-5, 5]))).to_dict()
        assert doc["recommendation"] == "solve_refined_milp"
        for entry in doc["rationale"]:
            assert set(entry) == {"rule", "fired", "detail"}
            assert isinstance(entry["fired"], bool)
