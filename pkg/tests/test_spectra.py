import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paselect import permute
from paselect.spectra import SingularSpectrum, operator_norm, singular_values


def jacobi_eigenvalues(S, max_sweeps=60, tol=1e-14):
    """Cyclic Jacobi rotations on a symmetric matrix; independent of LAPACK."""
    A = np.array(S, dtype=float)
    m = A.shape[0]
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * max(1.0, np.trace(np.abs(A))):
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                if A[p, q] == 0.0:
                    continue
                tau = (A[q, q] - A[p, p]) / (2.0 * A[p, q])
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                J = np.eye(m)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
    return np.sort(np.diag(A))[::-1]


class TestExamples:
    def test_identity(self):
        assert singular_values(np.eye(3)).values.tolist() == [1.0, 1.0, 1.0]

    def test_diagonal(self):
        assert singular_values(np.diag([3.0, 1.0])).values.tolist() == [3.0, 1.0]

    def test_rank_one(self):
        u = np.array([2.0, 0.0, 0.0])
        v = np.array([0.0, 3.0, 0.0, 0.0])
        s = singular_values(np.outer(u, v))
        assert s.values[0] == pytest.approx(6.0, rel=1e-12)
        assert np.all(s.values[1:] <= 1e-8)

    def test_operator_norm_zero(self):
        assert operator_norm(np.zeros((3, 2))) == 0.0

    def test_operator_norm_nilpotent(self):
        assert operator_norm(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1.0)

    def test_cap(self):
        s = singular_values(np.diag([3.0, 2.0, 1.0]), k=2)
        assert s.values.tolist() == [3.0, 2.0]

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            singular_values(np.array([[1.0, np.nan]]))


class TestSpectrumType:
    def test_rejects_increasing(self):
        with pytest.raises(ValueError):
            SingularSpectrum(values=np.array([1.0, 2.0]), n=2, p=2)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            SingularSpectrum(values=np.array([1.0, -0.5]), n=2, p=2)

    def test_sum_of_squares_matches_frobenius(self):
        X = np.random.default_rng(5).standard_normal((20, 12))
        s = singular_values(X)
        assert s.sum_of_squares() == pytest.approx(np.sum(X * X), rel=1e-8)


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(1, 4),
    p=st.integers(1, 4),
    data=st.data(),
)
def test_against_jacobi_oracle(n, p, data):
    entries = data.draw(
        st.lists(st.integers(-3, 3), min_size=n * p, max_size=n * p)
    )
    X = np.array(entries, dtype=float).reshape(n, p)
    expected = np.sqrt(np.clip(jacobi_eigenvalues(X.T @ X), 0.0, None))[: min(n, p)]
    got = singular_values(X).values
    assert np.allclose(got, expected, atol=1e-8)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 8), p=st.integers(1, 6), seed=st.integers(0, 2**32 - 1))
def test_frobenius_consistency_under_permutation(n, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    pa = permute.sample_uniform(n, p, rng)
    a = singular_values(X).sum_of_squares()
    b = singular_values(permute.apply(X, pa)).sum_of_squares()
    assert b == pytest.approx(a, rel=1e-8)


def test_gaussian_bulk_edge():
    # n = p = 2000 iid standard Gaussian scaled by n^(-1/2): top singular
    # value concentrates at the bulk edge 1 + sqrt(p/n) = 2.
    rng = np.random.default_rng(7)
    n = 2000
    X = rng.standard_normal((n, n)) / np.sqrt(n)
    assert operator_norm(X) == pytest.approx(2.0, abs=0.05)
