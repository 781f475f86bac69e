"""
Tests for the calculus inequality check.
"""
import numpy as np
import pytest
from pydantic import ValidationError

from scripts.integral_lemma import (
    MAX_REFINED_POINTS,
    LemmaInstance,
    bracket,
    bracket_min,
    lemma_l2_check,
    lemma_rhs,
    random_instance,
    sweep,
)


def instance(**overrides) -> LemmaInstance:
    fields = dict(c=1.0, alpha=1.0, t1=0.0, t2=1.0, gamma=[0.0], psi1=[0.0], psi2=[0.0])
    fields.update(overrides)
    return LemmaInstance(**fields)


class TestLemmaInstance:

    def test_rejects_non_positive_constants(self):
        with pytest.raises(ValidationError):
            instance(c=0.0)
        with pytest.raises(ValidationError):
            instance(alpha=-1.0)

    def test_rejects_empty_interval(self):
        with pytest.raises(ValidationError):
            instance(t1=1.0, t2=1.0)

    def test_rejects_high_degree(self):
        with pytest.raises(ValidationError):
            instance(gamma=[1.0, 0.0, 0.0, 0.0, 1.0])

    def test_length(self):
        assert instance(t1=-0.5, t2=2.0).length == 2.5


class TestBracket:

    def test_zero_data(self):
        np.testing.assert_array_equal(bracket(instance(), np.linspace(0, 1, 5)), np.zeros(5))

    def test_constant_gamma(self):
        # γ ≡ ½, c = 1: bracket(s) = ½ − ¼(1 − s)
        values = bracket(instance(gamma=[0.5]), np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(values, [0.25, 0.375, 0.5])

    def test_grid_includes_endpoints(self):
        value, argmin = bracket_min(instance(gamma=[0.5]), 4)
        assert value == pytest.approx(0.25)
        assert argmin == 0.0

    def test_nested_refinement_never_increases(self, rng):
        for _ in range(50):
            inst = random_instance(rng)
            coarse, _ = bracket_min(inst, 65)
            fine, _ = bracket_min(inst, 130)
            assert fine <= coarse + 1e-12 * max(1.0, abs(coarse))


class TestLemmaCheck:

    def test_zero_data_holds(self):
        result = lemma_l2_check(instance(c=2.0, t2=4.0))
        assert result.lhs == 0.0
        assert result.rhs == pytest.approx(0.5)
        assert result.holds and result.holds_end
        assert result.points == 66
        assert not result.refined

    def test_constant_gamma_is_am_gm(self):
        result = lemma_l2_check(instance(gamma=[0.5]))
        assert result.lhs == pytest.approx(0.25)
        assert result.rhs == pytest.approx(1.0)
        assert result.argmin == 0.0
        assert result.margin == pytest.approx(0.75)

    def test_equal_sources_drop_the_weight(self, rng):
        for _ in range(20):
            inst = random_instance(rng)
            inst = inst.model_copy(update={"psi2": list(inst.psi1)})
            assert lemma_rhs(inst, "start") == pytest.approx(lemma_rhs(inst, "end"))
            assert lemma_l2_check(inst).holds

    def test_end_anchor_counterexample(self):
        """
        γ ≡ 0, ψ1 ≡ 0, ψ2(t) = 24t − 12 on [0, 1], c = α = 1: the bracket is
        12s(1 − s) with minimum 0, the start-anchored side is 3 and the
        end-anchored side is −1.
        """
        inst = instance(psi2=[-12.0, 24.0])
        result = lemma_l2_check(inst)
        assert result.lhs == pytest.approx(0.0, abs=1e-12)
        assert result.rhs == pytest.approx(3.0)
        assert result.rhs_end == pytest.approx(-1.0)
        assert result.holds
        assert not result.holds_end

    def test_end_anchor_refines_before_reporting(self):
        result = lemma_l2_check(instance(psi2=[-12.0, 24.0]), weight_anchor="end")
        assert result.refined
        assert not result.holds
        # 65 intervals doubled thirteen times is the last grid within the cap
        assert result.points == 65 * 2 ** 13 + 1
        assert 2 ** 19 < result.points <= MAX_REFINED_POINTS
        assert result.weight_anchor == "end"

    def test_rejects_small_grid(self):
        with pytest.raises(ValueError):
            lemma_l2_check(instance(), grid=2)

    def test_rejects_unknown_anchor(self):
        with pytest.raises(ValueError):
            lemma_l2_check(instance(), weight_anchor="middle")


class TestSweep:

    def test_deterministic(self):
        first = sweep(10, seed=3)
        second = sweep(10, seed=3)
        assert [r.model_dump() for _, r in first] == [r.model_dump() for _, r in second]
        assert [i.model_dump() for i, _ in first] == [i.model_dump() for i, _ in second]

    @pytest.mark.slow
    def test_thousand_random_instances(self):
        results = sweep(1000, seed=2024)
        assert len(results) == 1000
        assert all(result.holds for _, result in results)
