"""Disk maps, presets, composition tables, and error budgets."""

import json
import math
import types
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import gibbsz.interpolation as interp
from gibbsz import (BudgetInfeasible, CertificationError, InputError,
                    allocate_budget, bell_transform, build_disk_map,
                    compose_and_evaluate, load_preset, preset_clearances,
                    sweep_disk_map, taylor_terms_needed)

# a small hand-checkable map: 0.5 z + 0.25 z^2 fixes the origin and is
# well inside the unit ball on the closed disk
HAND = (0.5, 0.25)


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, x in enumerate(p):
        if x:
            for j, y in enumerate(q):
                if y:
                    out[i + j] += x * y
    return out


class TestDiskMap:
    def test_origin_fixed_exactly(self):
        m = load_preset(2.25, samples=4096)
        assert m.evaluate(0.0) == 0.0
        assert m.evaluate(0j) == 0.0

    def test_anchor_maps_to_one(self):
        m = load_preset(2.25, samples=4096)
        assert abs(m.evaluate(m.anchor) - 1.0) <= 1e-12

    def test_array_and_scalar_agree(self):
        m = load_preset(2.25, samples=4096)
        z = np.array([0.1, 0.35, -0.2])
        vals = m.evaluate(z)
        for zi, vi in zip(z, vals):
            assert vi == m.evaluate(float(zi))

    def test_derivative_at_zero(self):
        m = build_disk_map(2.25, 0.6, 0.41730140925620757, 64, samples=4096)
        assert m.derivative_at_zero() == m.coefficients[0]

    def test_boundary_profile_needs_samples(self):
        m = load_preset(2.25, samples=4096)
        with pytest.raises(InputError):
            m.boundary_profile(4)

    def test_denser_sampling_stays_within_slack(self):
        # the inter-sample slack must cover whatever a 4x denser
        # boundary scan can reveal
        m = load_preset(2.25, samples=4096)
        dist_m, slack_m, _ = m.boundary_profile(4096)
        dist_4m, _, _ = m.boundary_profile(4 * 4096)
        assert dist_4m <= dist_m + slack_m
        assert dist_m <= dist_4m


class TestBuildValidation:
    def test_parameter_checks(self):
        with pytest.raises(InputError):
            build_disk_map(-1.0, 0.5, 0.5, 8)
        with pytest.raises(InputError):
            build_disk_map(0.25, 1.5, 0.5, 8)
        with pytest.raises(InputError):
            build_disk_map(0.25, 0.5, 1.0, 8)
        with pytest.raises(InputError):
            build_disk_map(0.25, 0.5, 0.5, 0)

    def test_uncertifiable_clearance_fails_loudly(self):
        with pytest.raises(CertificationError) as exc:
            build_disk_map(0.1, 0.6, 0.41730140925620757, 64, samples=4096)
        assert "not certified" in str(exc.value)


class TestPresets:
    def test_ladder_recertifies(self):
        ladder = preset_clearances()
        assert ladder[0] == 0.25
        assert ladder == tuple(sorted(ladder))
        for gamma in ladder:
            m = load_preset(gamma)
            assert m.gamma <= gamma
            assert m.certified_distance + m.certified_slack < m.gamma
            assert abs(m.evaluate(m.anchor) - 1.0) <= 1e-12

    def test_picks_largest_usable(self):
        m = load_preset(4.2)
        assert m.gamma == 4.0

    def test_quotient_fuzz(self):
        # clearance / activity arithmetic can land one ulp below the
        # preset the caller means
        assert 0.6 / 0.2 < 3.0
        m = load_preset(0.6 / 0.2, samples=4096)
        assert m.gamma == 3.0

    def test_below_floor_is_refused(self):
        with pytest.raises(InputError) as exc:
            load_preset(0.1)
        assert "smallest available" in str(exc.value)

    def _patch(self, monkeypatch, doc):
        text = json.dumps(doc)

        class Fake:
            def joinpath(self, name):
                return self

            def read_text(self):
                return text

        monkeypatch.setattr(interp, "resources",
                            types.SimpleNamespace(files=lambda pkg: Fake()))

    def _real_doc(self):
        from importlib import resources
        return json.loads(resources.files("gibbsz").joinpath("presets.json").read_text())

    def test_tampered_clearance_fails_certification(self, monkeypatch):
        doc = self._real_doc()
        row = [r for r in doc["presets"]][0]
        row["gamma"] = (0.1).hex()
        doc["presets"] = [row]
        self._patch(monkeypatch, doc)
        with pytest.raises(CertificationError):
            load_preset(0.1, samples=4096)

    def test_bad_schema_rejected(self, monkeypatch):
        doc = self._real_doc()
        doc["schema"] = "disk-map-presets/99"
        self._patch(monkeypatch, doc)
        with pytest.raises(InputError):
            load_preset(2.25)

    def test_bad_hex_rejected(self, monkeypatch):
        doc = self._real_doc()
        doc["presets"][0]["gamma"] = "zz"
        self._patch(monkeypatch, doc)
        with pytest.raises(InputError):
            load_preset(2.25)


class TestTaylorTerms:
    @settings(max_examples=120, deadline=None)
    @given(st.floats(min_value=0.01, max_value=0.99),
           st.floats(min_value=1e-12, max_value=10.0))
    def test_minimality(self, a, eps):
        k = taylor_terms_needed(a, eps)
        assert a ** k / (1.0 - a) <= eps
        assert k == 1 or a ** (k - 1) / (1.0 - a) > eps

    def test_generous_tolerance_needs_one_term(self):
        assert taylor_terms_needed(0.5, 100.0) == 1

    def test_validation(self):
        with pytest.raises(InputError):
            taylor_terms_needed(1.0, 0.1)
        with pytest.raises(InputError):
            taylor_terms_needed(0.5, 0.0)
        with pytest.raises(InputError):
            taylor_terms_needed(0.0, 0.1)


class TestBellTransform:
    def test_identity_map(self):
        t = bell_transform([1.0], 4)
        for i in range(1, 5):
            for j in range(1, 5):
                assert t.power_coefficient(i, j) == (1.0 if i == j else 0.0)

    def test_hand_table_for_z_plus_z_squared(self):
        t = bell_transform([1.0, 1.0], 4)
        assert t.beta[0] == (1.0, 1.0, 0.0, 0.0)
        assert t.beta[1] == (0.0, 1.0, 2.0, 1.0)
        assert t.beta[2] == (0.0, 0.0, 1.0, 3.0)
        assert t.beta[3] == (0.0, 0.0, 0.0, 1.0)

    def test_entries_are_correctly_rounded(self):
        # powers of the non-dyadic 0.1 must match exact rational
        # arithmetic, not accumulated float multiplication
        t = bell_transform([0.1], 6)
        tenth = Fraction(0.1)
        for i in range(1, 7):
            assert t.power_coefficient(i, i) == float(tenth ** i)

    def test_amplification_matches_definition(self):
        t = bell_transform(HAND, 3)
        a = 0.4
        expect = math.fsum(abs(t.beta[1][j - 1]) * a ** j for j in range(2, 4))
        assert t.amplification(2, a) == pytest.approx(expect, rel=1e-15)

    def test_validation(self):
        with pytest.raises(InputError):
            bell_transform([], 3)
        with pytest.raises(InputError):
            bell_transform([math.nan], 3)
        with pytest.raises(InputError):
            bell_transform([1.0], 0)
        t = bell_transform([1.0], 2)
        with pytest.raises(InputError):
            t.power_coefficient(3, 1)


class TestCompositeCoefficientOracle:
    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_table_matches_fft_extraction(self, seed):
        # composite Taylor coefficients of f(Phi(z)) for random
        # polynomials, cross-checked against coefficient extraction at
        # roots of unity (exact for polynomials below the grid size)
        rng = np.random.default_rng(seed)
        phi = rng.uniform(-1.0, 1.0, size=int(rng.integers(1, 5)))
        f = rng.uniform(-1.0, 1.0, size=int(rng.integers(1, 6)))
        j_max = len(phi) * len(f)
        t = bell_transform([float(c) for c in phi], j_max)
        g = [math.fsum(f[i - 1] * t.beta[i - 1][j - 1]
                       for i in range(1, min(j, len(f)) + 1))
             for j in range(1, j_max + 1)]
        n = 64
        w = np.exp(2j * np.pi * np.arange(n) / n)
        pv = np.zeros(n, dtype=complex)
        for m, c in enumerate(phi):
            pv += c * w ** (m + 1)
        h = np.zeros(n, dtype=complex)
        for i, c in enumerate(f):
            h += c * pv ** (i + 1)
        coef = np.fft.fft(h) / n
        scale = max(1.0, max(abs(x) for x in g))
        for j in range(1, j_max + 1):
            assert abs(coef[j].real - g[j - 1]) + abs(coef[j].imag) < 1e-8 * scale


class TestBudget:
    def test_split_uses_half_the_budget(self):
        m = load_preset(2.25, samples=4096)
        t = bell_transform(m, 6)
        budget = allocate_budget(0.02, t, m.anchor, 0.3, 1.5)
        spent = math.fsum(ti * si for ti, si in
                          zip(budget.coefficient_targets, budget.amplifications))
        assert spent == pytest.approx(0.01, rel=1e-12)
        assert budget.truncation_budget == pytest.approx(0.01)
        assert budget.num_coefficients == 6

    def test_cluster_translation(self):
        t = bell_transform(HAND, 3)
        budget = allocate_budget(0.1, t, 0.4, 0.25, 2.0)
        for i in range(1, 4):
            expect = (budget.coefficient_targets[i - 1]
                      * math.factorial(i) * 2.0 / 0.25 ** i)
            assert budget.cluster_targets[i - 1] == pytest.approx(expect, rel=1e-15)

    def test_degenerate_order_is_refused(self):
        # a map with no linear term cannot carry order-2 information
        # inside a 3-term table
        t = bell_transform([0.0, 1.0], 3)
        with pytest.raises(BudgetInfeasible):
            allocate_budget(0.1, t, 0.5, 1.0, 1.0)

    def test_activity_underflow_is_refused(self):
        t = bell_transform(HAND, 3)
        with pytest.raises(BudgetInfeasible):
            allocate_budget(0.1, t, 0.4, 1e-300, 1.0)

    def test_validation(self):
        t = bell_transform(HAND, 3)
        with pytest.raises(InputError):
            allocate_budget(0.0, t, 0.4, 1.0, 1.0)
        with pytest.raises(InputError):
            allocate_budget(0.1, t, 1.0, 1.0, 1.0)
        with pytest.raises(InputError):
            allocate_budget(0.1, t, 0.4, -1.0, 1.0)
        with pytest.raises(InputError):
            allocate_budget(0.1, t, 0.4, 1.0, 0.0)
        with pytest.raises(InputError):
            allocate_budget(0.1, t, 0.4, 1.0, 1.0, num_coefficients=4)


class TestComposeAndEvaluate:
    def test_identity_outer_function_recovers_map(self):
        t = bell_transform(HAND, 2)
        a = 0.5
        out = compose_and_evaluate([1.0, 0.0], t, a)
        assert out.value == pytest.approx(0.5 * a + 0.25 * a * a, rel=1e-15)

    def test_square_outer_function(self):
        t = bell_transform([1.0], 2)
        out = compose_and_evaluate([0.0, 1.0], t, 0.3)
        assert out.value == pytest.approx(0.09, rel=1e-15)
        assert out.truncation_bound == pytest.approx(0.3 ** 3 / 0.7, rel=1e-15)

    def test_propagation_uses_amplification_weights(self):
        t = bell_transform([1.0], 2)
        a = 0.3
        out = compose_and_evaluate([0.5, 0.5], t, a, f_errors=[0.01, 0.001])
        assert out.propagation_bound == pytest.approx(0.01 * a + 0.001 * a * a,
                                                      rel=1e-14)
        assert out.rounding_bound > 0.0
        assert out.total_error == (out.truncation_bound + out.propagation_bound
                                   + out.rounding_bound)

    def test_validation(self):
        t = bell_transform([1.0], 2)
        with pytest.raises(InputError):
            compose_and_evaluate([1.0, 0.0, 0.0], t, 0.3)
        with pytest.raises(InputError):
            compose_and_evaluate([1.0], t, 1.5)
        with pytest.raises(InputError):
            compose_and_evaluate([1.0, 0.0], t, 0.3, f_errors=[0.1])


class TestTruncationHonesty:
    def test_exact_tail_within_geometric_bound(self):
        # exact rational arithmetic: float noise cannot fake or mask a
        # tail at the 1e-28 scale the deep-truncation bound reaches
        m = load_preset(5.0)
        phi = [Fraction(0)] + [Fraction(c) for c in m.coefficients]
        a = Fraction(m.beta_anchor)
        p = 3
        g = phi[:]
        for _ in range(p - 1):
            g = _pmul(g, phi)
        g = [c / Fraction(7) ** p for c in g]
        full = sum(gj * a ** j for j, gj in enumerate(g))
        one_minus = 1 - a
        for k in range(1, 41):
            trunc = sum(g[j] * a ** j for j in range(1, min(k, len(g) - 1) + 1))
            assert abs(full - trunc) <= a ** k / one_minus

    def test_float_tail_within_geometric_bound(self):
        m = load_preset(2.25, samples=4096)
        a = m.beta_anchor
        t = bell_transform(m, 25)
        for q in (1, 2, 3):
            # (w/4)^q stays below 1 on the certified neighborhood
            direct = (m.evaluate(a) / 4.0) ** q
            scale = 4.0 ** q
            for k in range(1, 26):
                partial = math.fsum(t.beta[q - 1][j - 1] * a ** j / scale
                                    for j in range(q, k + 1))
                assert abs(direct - partial) <= a ** k / (1.0 - a)


class TestSweep:
    def test_smoke_at_loose_clearance(self):
        m = sweep_disk_map(6.0, samples=4096, prescreen=1024)
        assert m.certified_distance + m.certified_slack < 6.0
        assert 0.0 < m.beta_anchor < 0.25

    def test_validation(self):
        with pytest.raises(InputError):
            sweep_disk_map(-2.0)
