"""Independent reference computations: closed forms, quadrature, MC."""

import math

import pytest

from gibbsz import (BoxDomain, CostCeiling, InputError,
                    certified_lambda_threshold, connective_bound,
                    monte_carlo_ck, partition_function_direct, tonks_gas_logZ)
from gibbsz.potential import free_potential, hard_core

RODS = hard_core(1, 0.5)


class TestTonksGas:
    def test_zero_activity(self):
        assert tonks_gas_logZ(4.0, 0.5, 0.0) == 0.0

    def test_two_term_case_by_hand(self):
        # L = 0.6, r = 0.5 fits at most two rods:
        # Z = 1 + 0.6 lam + (0.1)^2 lam^2 / 2
        lam = 2.0
        expect = math.log(1.0 + 0.6 * lam + 0.005 * lam * lam)
        assert tonks_gas_logZ(0.6, 0.5, lam) == pytest.approx(expect, rel=1e-15)

    def test_single_rod_case_by_hand(self):
        lam = 3.0
        assert tonks_gas_logZ(0.3, 0.5, lam) == pytest.approx(
            math.log(1.0 + 0.3 * lam), rel=1e-15)

    def test_dilute_limit(self):
        assert tonks_gas_logZ(4.0, 0.5, 1e-8) == pytest.approx(4e-8, rel=1e-6)

    def test_monotone_in_activity_and_length(self):
        assert tonks_gas_logZ(4.0, 0.5, 0.2) > tonks_gas_logZ(4.0, 0.5, 0.1)
        assert tonks_gas_logZ(6.0, 0.5, 0.1) > tonks_gas_logZ(4.0, 0.5, 0.1)

    def test_validation(self):
        with pytest.raises(InputError):
            tonks_gas_logZ(0.0, 0.5, 0.1)
        with pytest.raises(InputError):
            tonks_gas_logZ(4.0, -1.0, 0.1)
        with pytest.raises(InputError):
            tonks_gas_logZ(4.0, 0.5, -0.1)


class TestDirectPartitionFunction:
    def test_free_gas_matches_exponential_series(self):
        # no interaction: quadrature is exact and the value must equal
        # the truncated exponential series in activity times volume
        free = free_potential(1)
        box = BoxDomain(1, 1)
        res = partition_function_direct(free, box, 0.7, 4, 16)
        lam_v = 0.7 * box.volume
        expect = math.fsum(lam_v ** k / math.factorial(k) for k in range(5))
        # the value is exact even though the ledger still charges cells
        # near the nominal support boundary
        assert res.value == pytest.approx(expect, rel=1e-12)
        assert res.truncation_bound == pytest.approx(
            math.exp(lam_v) - expect, rel=1e-9)
        assert res.total_bound == res.quad_bound + res.truncation_bound
        assert res.log_value == pytest.approx(math.log(expect), rel=1e-12)

    def test_free_gas_two_dimensional(self):
        free = free_potential(2)
        box = BoxDomain(1, 2)
        res = partition_function_direct(free, box, 0.1, 2, 4)
        lam_v = 0.1 * box.volume
        expect = 1.0 + lam_v + lam_v ** 2 / 2.0
        assert res.value == pytest.approx(expect, rel=1e-12)

    def test_rods_bracket_exact_partition_function(self):
        # the quadrature ledger must cover the gap to the closed form
        box = BoxDomain(1, 1)
        res = partition_function_direct(RODS, box, 0.5, 4, 32)
        exact = math.exp(tonks_gas_logZ(2.0, 0.5, 0.5))
        assert abs(res.value - exact) <= res.total_bound
        # and the ledger is informative, not vacuous
        assert res.total_bound < 0.05 < exact

    def test_cost_ceiling(self):
        with pytest.raises(CostCeiling):
            partition_function_direct(RODS, BoxDomain(1, 1), 0.5, 4, 32,
                                      max_ops=100.0)

    def test_validation(self):
        box = BoxDomain(1, 1)
        with pytest.raises(InputError):
            partition_function_direct(RODS, box, 0.5, 7, 8)
        with pytest.raises(InputError):
            partition_function_direct(RODS, box, 0.5, -1, 8)
        with pytest.raises(InputError):
            partition_function_direct(RODS, box, 0.5, 2, 1)
        with pytest.raises(InputError):
            partition_function_direct(RODS, box, -0.5, 2, 8)
        with pytest.raises(InputError):
            partition_function_direct(RODS, BoxDomain(1, 2), 0.5, 2, 8)


class TestMonteCarlo:
    def test_first_order_is_exact(self):
        mc = monte_carlo_ck(RODS, BoxDomain(1, 1), 1, 100, 7)
        assert mc.value == 1.0 and mc.standard_error == 0.0

    def test_seeded_reproducibility(self):
        a = monte_carlo_ck(RODS, BoxDomain(1, 1), 2, 5000, 42)
        b = monte_carlo_ck(RODS, BoxDomain(1, 1), 2, 5000, 42)
        c = monte_carlo_ck(RODS, BoxDomain(1, 1), 2, 5000, 43)
        assert a.value == b.value and a.standard_error == b.standard_error
        assert a.value != c.value

    def test_second_order_rods_closed_form(self):
        # overlap area of |x - y| < 1/2 in the n=2 box gives -0.9375
        mc = monte_carlo_ck(RODS, BoxDomain(2, 1), 2, 40000, 20260815)
        assert abs(mc.value - (-0.9375)) <= 3.0 * mc.standard_error
        assert mc.samples == 40000 and mc.seed == 20260815

    def test_third_order_runs_and_reproduces(self):
        a = monte_carlo_ck(RODS, BoxDomain(1, 1), 3, 2000, 11)
        b = monte_carlo_ck(RODS, BoxDomain(1, 1), 3, 2000, 11)
        assert a.value == b.value

    def test_validation(self):
        with pytest.raises(InputError):
            monte_carlo_ck(RODS, BoxDomain(1, 1), 5, 100, 1)
        with pytest.raises(InputError):
            monte_carlo_ck(RODS, BoxDomain(1, 1), 2, 1, 1)
        with pytest.raises(InputError):
            monte_carlo_ck(RODS, BoxDomain(1, 2), 2, 100, 1)


class TestChainBounds:
    def test_first_order_unit_rods_is_exact(self):
        # the support boundary falls on cell edges, so no cell straddles
        # it and the step sum telescopes to the exact support length
        b = connective_bound(hard_core(1, 1.0), 1)
        assert b.value == 2.0
        assert b.bound == 0.0
        assert b.upper == 2.0

    def test_second_order_unit_rods_closed_form(self):
        b = connective_bound(hard_core(1, 1.0), 2, mesh_width=2.0 / 512)
        assert abs(b.value - 2.5) <= b.bound
        assert b.bound < 0.05

    def test_third_order_runs(self):
        b = connective_bound(hard_core(1, 1.0), 3, mesh_width=2.0 / 64)
        assert b.order == 3
        assert 0.0 < b.value
        assert math.isfinite(b.bound)

    def test_refinement_reduces_bound(self):
        coarse = connective_bound(hard_core(1, 1.0), 2, mesh_width=2.0 / 64)
        fine = connective_bound(hard_core(1, 1.0), 2, mesh_width=2.0 / 256)
        assert fine.bound < coarse.bound
        assert abs(coarse.value - fine.value) <= coarse.bound + fine.bound

    def test_validation(self):
        with pytest.raises(InputError):
            connective_bound(RODS, 4)
        with pytest.raises(InputError):
            connective_bound(RODS, 0)
        with pytest.raises(InputError):
            connective_bound(RODS, 1, mesh_width=100.0)


class TestActivityThreshold:
    def test_unit_rods_threshold_is_e_over_two(self):
        thr = certified_lambda_threshold(hard_core(1, 1.0))
        assert thr.value == math.e / 2.0
        assert thr.k_used == 1

    def test_deeper_chains_only_improve(self):
        shallow = certified_lambda_threshold(hard_core(1, 1.0), 1)
        deep = certified_lambda_threshold(hard_core(1, 1.0), 2,
                                          mesh_width=2.0 / 512)
        assert deep.value >= shallow.value
        assert deep.k_used == 2

    def test_free_potential_has_no_threshold(self):
        with pytest.raises(InputError) as exc:
            certified_lambda_threshold(free_potential(1))
        assert "effectively free" in str(exc.value)

    def test_validation(self):
        with pytest.raises(InputError):
            certified_lambda_threshold(RODS, 0)
        with pytest.raises(InputError):
            certified_lambda_threshold(RODS, 4)
