import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paselect import oracles, permute
from paselect.spectra import operator_norm


def flat_vector(p):
    return np.full(p, p**-0.5)


def basis_vector(p):
    v = np.zeros(p)
    v[0] = 1.0
    return v


class TestMomentCoefficients:
    def test_basis_vector_k2(self):
        assert oracles.c_k(basis_vector(5), n=10, k=2) == pytest.approx(1 / 9 + 1, rel=1e-14)

    def test_flat_vector_k2(self):
        assert oracles.c_k(flat_vector(100), n=100, k=2) == pytest.approx(1 / 99 + 1 / 100, rel=1e-14)

    def test_k3_k4_direct(self):
        # direct substitution of the norm powers for a flat vector of size p:
        # |v|_4^4 = 1/p, |v|_6^6 = 1/p^2, |v|_8^8 = 1/p^3
        p, n = 50, 20
        v = flat_vector(p)
        assert oracles.c_k(v, n, 3) == pytest.approx(1 / 19**2 + 9 / (n * p) + p**-2, rel=1e-12)
        assert oracles.c_k(v, n, 4) == pytest.approx(
            1 / 19**3 + 4 / 19**2 / p + 12 / n * (p**-2 + p**-2) + p**-3, rel=1e-12
        )

    def test_flat_square_case_bounded(self):
        # for flat v with p = n, the order-3 coefficient is below 11*(n^-2 + p^-2)
        for n in (10, 100, 1000):
            assert oracles.c_k(flat_vector(n), n, 3) <= 11 * (n**-2 + n**-2)

    def test_minimized_at_delocalized(self):
        for k in (2, 3, 4):
            assert oracles.c_k(flat_vector(30), 25, k) < oracles.c_k(basis_vector(30), 25, k)

    def test_non_unit_rejected(self):
        with pytest.raises(ValueError, match="unit"):
            oracles.c_k(np.array([1.0, 1.0]), 10, 2)

    def test_bad_order_rejected(self):
        with pytest.raises(ValueError, match="k must be"):
            oracles.c_k(basis_vector(3), 10, 5)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError, match="n must be"):
            oracles.c_k(basis_vector(3), 1, 2)


class TestSpikeSum:
    def test_zero_strength(self):
        assert oracles.a_nk([0.0], [basis_vector(4)], 10, 2) == 0.0

    def test_linear_in_strengths(self):
        v = flat_vector(20)
        single = oracles.a_nk([1.5], [v], 30, 2)
        double = oracles.a_nk([1.5, 1.5], [v, v], 30, 2)
        assert double == pytest.approx(2 * single, rel=1e-14)

    def test_composition(self):
        got = oracles.a_nk([1.0], [basis_vector(6)], 10, 2)
        assert got == pytest.approx((10 / 9) ** 0.25, rel=1e-12)
        assert got == pytest.approx(1.0267, abs=1e-4)

    @settings(max_examples=30, deadline=None)
    @given(theta=st.floats(0.0, 10.0), bump=st.floats(0.001, 5.0))
    def test_nondecreasing_in_strength(self, theta, bump):
        v = flat_vector(12)
        assert oracles.a_nk([theta + bump], [v], 15, 3) >= oracles.a_nk([theta], [v], 15, 3)

    def test_bound_report_echo(self):
        rep = oracles.bound_report([2.0], [flat_vector(9)], 12, 2)
        assert rep.k == 2 and rep.n == 12
        assert rep.strengths == (2.0,)
        assert rep.c_value == pytest.approx(1 / 11 + 1 / 9, rel=1e-14)
        assert rep.a_value == pytest.approx(2.0 * rep.c_value**0.25, rel=1e-14)


class TestThresholdsAndScales:
    def test_bbp_identity(self):
        assert oracles.bbp_threshold_identity_noise(1.0) == 1.0
        assert oracles.bbp_threshold_identity_noise(0.36) == pytest.approx(0.6, rel=1e-14)
        with pytest.raises(ValueError):
            oracles.bbp_threshold_identity_noise(0.0)

    def test_permuted_norm_heuristic_values(self):
        assert oracles.permuted_norm_heuristic(0.0, 10, 10) == 0.0
        assert oracles.permuted_norm_heuristic(10.0, 100, 100) == pytest.approx(2.0, rel=1e-14)

    def test_shadowing_ratio_values(self):
        assert oracles.shadowing_ratio(500, 300) == pytest.approx(0.10245638646895837, rel=1e-12)
        assert oracles.shadowing_ratio(4, 4) == pytest.approx(1.0, rel=1e-14)

    def test_shadowing_ratio_monotone(self):
        grid = [4, 16, 64, 256, 1024]
        vals = [oracles.shadowing_ratio(n, 300) for n in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        vals = [oracles.shadowing_ratio(300, p) for p in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))


def test_permuted_norm_heuristic_against_simulation():
    # delocalized spike theta * u v^T, theta=20, n=p=400: the observed operator
    # norm after a random permutation stays within a factor 2 of the heuristic
    n = p = 400
    theta = 20.0
    rng = np.random.default_rng(55)
    u = rng.standard_normal(n)
    u /= np.linalg.norm(u)
    v = rng.standard_normal(p)
    v /= np.linalg.norm(v)
    S = theta * np.outer(u, v)
    heur = oracles.permuted_norm_heuristic(theta, n, p)
    ratios = []
    for _ in range(5):
        obs = operator_norm(permute.apply(S, permute.sample_uniform(n, p, rng)))
        ratios.append(obs / heur)
    assert all(0.5 <= r <= 2.0 for r in ratios)
