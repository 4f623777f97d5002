from itertools import product

import numpy as np
import pytest

from hmmreduce import (
    AbSpec,
    DomainError,
    HmmModel,
    ReducibilityError,
    ValidationError,
    model_from_ab,
    stationary_vector,
    string_probability,
)
from conftest import random_model


class TestStationaryVector:
    def test_doubly_stochastic(self):
        pi = stationary_vector(np.full((2, 2), 0.5))
        assert pi == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_swap_chain(self):
        pi = stationary_vector(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert pi == pytest.approx([0.5, 0.5], abs=1e-12)

    def test_example1_residual(self, model1):
        A = model1.A
        pi = stationary_vector(A)
        assert np.max(np.abs(pi @ A - pi)) < 1e-12
        assert pi.sum() == pytest.approx(1.0, abs=1e-12)

    def test_reducible_chain_rejected(self):
        A = np.eye(3)
        with pytest.raises(ReducibilityError, match="dimension 3"):
            stationary_vector(A)

    def test_block_diagonal_rejected(self):
        A = np.array([[0.5, 0.5, 0, 0],
                      [0.5, 0.5, 0, 0],
                      [0, 0, 0.5, 0.5],
                      [0, 0, 0.5, 0.5]])
        with pytest.raises(ReducibilityError):
            stationary_vector(A)


class TestModelFromAb:
    def test_unit_readout_columns(self):
        spec = AbSpec(A=np.full((2, 2), 0.5), B=np.eye(2))
        model = model_from_ab(spec)
        assert np.allclose(model.M[0], [[0.5, 0], [0.5, 0]])
        assert np.allclose(model.M[1], [[0, 0.5], [0, 0.5]])

    def test_example1_entry(self, model1):
        # entry (row 1, col 3 in 1-based terms) of M(0) is 0.1 * 0.9
        assert model1.M[0][0, 2] == pytest.approx(0.09, abs=1e-15)

    def test_sum_of_m_is_row_stochastic(self, rng):
        for _ in range(5):
            model = random_model(rng, N=5, m=3)
            assert np.max(np.abs(model.A.sum(axis=1) - 1.0)) < 1e-12

    def test_recovers_a_exactly(self, rng):
        A = rng.random((4, 4)) + 0.1
        A /= A.sum(axis=1)[:, None]
        B = rng.random((4, 3)) + 0.1
        B /= B.sum(axis=1)[:, None]
        model = model_from_ab(AbSpec(A=A, B=B))
        assert np.max(np.abs(model.A - A)) < 1e-14

    def test_bad_row_sum_names_row(self):
        A = np.array([[0.5, 0.5], [0.6, 0.6]])
        with pytest.raises(ValidationError, match="row 1"):
            AbSpec(A=A, B=np.eye(2))

    def test_negative_entry_rejected(self):
        A = np.array([[1.2, -0.2], [0.5, 0.5]])
        with pytest.raises(ValidationError):
            AbSpec(A=A, B=np.eye(2))

    def test_tiny_row_drift_renormalized(self):
        third = 0.3333333333333333
        A = np.array([[third, third, third],
                      [0.2, 0.3, 0.5],
                      [0.4, 0.4, 0.2]])
        spec = AbSpec(A=A, B=np.full((3, 2), 0.5))
        assert np.max(np.abs(spec.A.sum(axis=1) - 1.0)) < 1e-15


class TestStringProbability:
    def test_empty_string(self, model1):
        assert string_probability(model1, []) == pytest.approx(1.0, abs=1e-14)

    def test_total_probability_length3(self, model1):
        total = sum(string_probability(model1, w)
                    for w in product(range(2), repeat=3))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_single_symbol_matches_readout(self, model1):
        # p("0") = sum_i pi_i B[i, 0] for M(y) = A diag(B[:, y])
        B0 = np.array([0.3, 0.4, 0.9, 0.7])
        assert string_probability(model1, [0]) == pytest.approx(
            float(model1.pi @ B0), abs=1e-14)

    def test_concatenation_splits(self, model1):
        # p(uv) = (pi M(u)) (M(v) e)
        for u in product(range(2), repeat=2):
            row = model1.pi.copy()
            for y in u:
                row = row @ model1.M[y]
            for v in product(range(2), repeat=3):
                col = np.ones(model1.N)
                for y in reversed(v):
                    col = model1.M[y] @ col
                assert string_probability(model1, list(u) + list(v)) == \
                    pytest.approx(float(row @ col), abs=1e-12)

    def test_stationarity_consistency(self, model1):
        for length in range(4):
            for w in product(range(2), repeat=length):
                p = string_probability(model1, w)
                left = sum(string_probability(model1, (y,) + w) for y in range(2))
                right = sum(string_probability(model1, w + (y,)) for y in range(2))
                assert left == pytest.approx(p, abs=1e-12)
                assert right == pytest.approx(p, abs=1e-12)

    def test_out_of_range_symbol(self, model1):
        with pytest.raises(DomainError):
            string_probability(model1, [0, 2])


class TestHmmModelValidation:
    def test_nonstationary_pi_rejected(self, model1):
        pi = np.array([1.0, 0.0, 0.0, 0.0])
        with pytest.raises(ValidationError, match="stationary"):
            HmmModel(m=2, N=4, M=model1.M, pi=pi)

    def test_pi_sum_checked(self, model1):
        with pytest.raises(ValidationError):
            HmmModel(m=2, N=4, M=model1.M, pi=model1.pi * 0.5)

    def test_matrices_readonly(self, model1):
        with pytest.raises(ValueError):
            model1.M[0][0, 0] = 1.0
        with pytest.raises(ValueError):
            model1.pi[0] = 1.0
