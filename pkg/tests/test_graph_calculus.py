"""
Tests for the ϑ-Laplacian, the gradient form and the power identity.
"""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scripts.errors import FieldError
from scripts.generators import generate_graph
from scripts.graph_calculus import (
    chain_rule_counterexample,
    chain_rule_sides,
    divergence_sum,
    gamma,
    gamma_via_product,
    laplacian,
    positive_power,
    power_identity_residual,
    term_scale,
    verify_identity,
)


class TestLaplacian:

    def test_constant_is_harmonic(self, path3):
        np.testing.assert_array_equal(laplacian(path3, np.full(3, 7.0)), np.zeros(3))

    def test_k2_single_edge(self, k2):
        np.testing.assert_allclose(laplacian(k2, [1.0, 3.0]), [2.0, -2.0])

    def test_measure_divides(self, path3):
        # Δu(b) = (1/2)[1·(0 − 1) + 2·(4 − 1)]
        np.testing.assert_allclose(laplacian(path3, [0.0, 1.0, 4.0]), [1.0, 2.5, -12.0])

    def test_wrong_length(self, k2):
        with pytest.raises(FieldError):
            laplacian(k2, [1.0, 2.0, 3.0])

    def test_divergence_vanishes(self, path3, rng):
        total, scale = divergence_sum(path3, rng.uniform(0.1, 10.0, size=3))
        assert abs(total) <= 1e-12 * max(1.0, scale)

    @given(
        seed=st.integers(min_value=0, max_value=2 ** 31),
        a=st.floats(min_value=-5.0, max_value=5.0),
        b=st.floats(min_value=-5.0, max_value=5.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_linear(self, seed, a, b):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 20))
        g = generate_graph(f"random_gnp_{n}_0.4", theta=str(rng.choice(["one", "deg"])), rng=rng)
        u, v = rng.uniform(-10.0, 10.0, size=(2, n))
        expected = a * laplacian(g, u) + b * laplacian(g, v)
        scale = 1.0 + abs(a) * term_scale(g, u) + abs(b) * term_scale(g, v)
        assert np.all(np.abs(laplacian(g, a * u + b * v) - expected) <= 1e-12 * scale)


class TestGamma:

    def test_k2(self, k2):
        # Γ(u)(a) = ½(3 − 1)²
        np.testing.assert_allclose(gamma(k2, [1.0, 3.0]), [2.0, 2.0])

    def test_nonnegative(self, cycle4, rng):
        assert np.all(gamma(cycle4, rng.normal(size=4)) >= 0)

    def test_product_formula_agrees(self, path3, rng):
        u, v = rng.uniform(0.1, 10.0, size=(2, 3))
        np.testing.assert_allclose(gamma(path3, u, v), gamma_via_product(path3, u, v), rtol=1e-12, atol=1e-12)

    def test_symmetric_in_arguments(self, k3, rng):
        u, v = rng.normal(size=(2, 3))
        np.testing.assert_allclose(gamma(k3, u, v), gamma(k3, v, u))

    @given(
        seed=st.integers(min_value=0, max_value=2 ** 31),
        a=st.floats(min_value=-5.0, max_value=5.0),
        b=st.floats(min_value=-5.0, max_value=5.0),
    )
    @settings(max_examples=50, deadline=None)
    def test_symmetric_and_bilinear(self, seed, a, b):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 20))
        g = generate_graph(f"random_gnp_{n}_0.4", theta=str(rng.choice(["one", "deg"])), rng=rng)
        u, w, v = rng.uniform(-10.0, 10.0, size=(3, n))
        # each Γ term is bounded by deg/(2ϑ) · (2·10)²
        scale = (1.0 + abs(a) + abs(b)) * float(np.max(g.degree / g.theta)) * 400.0
        assert np.all(np.abs(gamma(g, u, v) - gamma(g, v, u)) <= 1e-12 * scale)
        expected = a * gamma(g, u, v) + b * gamma(g, w, v)
        assert np.all(np.abs(gamma(g, a * u + b * w, v) - expected) <= 1e-12 * scale)


class TestPowers:

    def test_positive_power(self):
        np.testing.assert_allclose(positive_power(np.array([4.0, 9.0]), 0.5), [2.0, 3.0])

    def test_rejects_non_positive(self):
        with pytest.raises(FieldError):
            positive_power(np.array([1.0, 0.0]), 2.0)

    def test_term_scale_bounds_laplacian(self, path3, rng):
        u = rng.normal(size=3)
        assert np.all(np.abs(laplacian(path3, u)) <= term_scale(path3, u) + 1e-15)


class TestPowerIdentity:

    def test_k2_m2(self, k2):
        # u = (1, 4): Δu² = 15 at a; 2uΔu + 2Γ(u) = 2·1·3 + 9
        assert np.max(np.abs(power_identity_residual(k2, [1.0, 4.0], 2.0))) <= 1e-12

    def test_rejects_non_positive(self, k2):
        with pytest.raises(FieldError):
            power_identity_residual(k2, [1.0, -1.0], 2.0)

    def test_identity_holds_for_every_exponent(self, cycle4, rng):
        results = verify_identity(cycle4, rng.uniform(0.1, 10.0, size=4))
        assert [r.m for r in results] == [1.5, 2.0, 3.0, -1.0]
        assert all(r.holds for r in results)

    @given(seed=st.integers(min_value=0, max_value=2 ** 31), theta=st.sampled_from(["one", "deg"]))
    @settings(max_examples=50, deadline=None)
    def test_random_graphs(self, seed, theta):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 30))
        g = generate_graph(f"random_gnp_{n}_0.3", theta=theta, rng=rng)
        u = rng.uniform(0.1, 10.0, size=n)
        for result in verify_identity(g, u):
            assert result.max_rel_residual <= 1e-10


@pytest.mark.slow
class TestIdentityAcceptance:

    def test_two_hundred_random_graphs(self, random_graph, rng):
        """Relative residual ≤ 1e-10 on 200 graphs, both measures, four exponents."""
        for k in range(200):
            g = random_graph(max_n=50, theta="one" if k % 2 else "deg")
            u = rng.uniform(0.1, 10.0, size=g.n)
            worst = max(r.max_rel_residual for r in verify_identity(g, u, (1.5, 2.0, 3.0, -1.0)))
            assert worst <= 1e-10, g.name


class TestChainRule:

    def test_linear_power_is_exact(self, cycle4, rng):
        lhs, rhs = chain_rule_sides(cycle4, rng.uniform(0.1, 10.0, size=4), 1.0)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-12, atol=1e-12)

    def test_square_has_witness(self, k2):
        witness = chain_rule_counterexample(k2, 2.0, rng=np.random.default_rng(1))
        assert witness is not None
        assert witness.graph == "k2"
        assert abs(witness.lhs - witness.rhs) > 1e-6

    def test_gamma_reading_at_half_is_exact(self, path3, rng):
        """With |∇f|² read as Γ(f), p = ½ reproduces the power identity at m = 1."""
        lhs, rhs = chain_rule_sides(path3, rng.uniform(0.1, 10.0, size=3), 0.5, gradient="gamma")
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-12)
        assert chain_rule_counterexample(path3, 0.5, gradient="gamma", budget=20) is None

    def test_two_gamma_reading_at_half_fails(self, path3):
        assert chain_rule_counterexample(path3, 0.5, budget=20) is not None

    def test_rejects_zero_exponent(self, k2):
        with pytest.raises(ValueError):
            chain_rule_sides(k2, [1.0, 2.0], 0.0)

    def test_rejects_unknown_reading(self, k2):
        with pytest.raises(ValueError):
            chain_rule_sides(k2, [1.0, 2.0], 2.0, gradient="norm")
