import numpy as np
import pytest

from hmmreduce import AbSpec, example_model, model_from_ab


@pytest.fixture(scope="session")
def model1():
    return example_model(1)


@pytest.fixture(scope="session")
def model2():
    return example_model(2)


def random_model(rng, N=4, m=2):
    """Strictly positive random HMM via a random (A, B) pair."""
    A = rng.random((N, N)) + 0.05
    A /= A.sum(axis=1)[:, None]
    B = rng.random((N, m)) + 0.05
    B /= B.sum(axis=1)[:, None]
    return model_from_ab(AbSpec(A=A, B=B))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
