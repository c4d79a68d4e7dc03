import numpy as np
import pytest

from sample_amplification.families import FamilyKind, FamilySpec, default_param
from sample_amplification.numerics import RngState


@pytest.fixture
def rng():
    return RngState(12345)


@pytest.fixture
def gen():
    return RngState(54321).generator()


@pytest.fixture
def gaussian_mean():
    family = FamilySpec(FamilyKind.GAUSSIAN_MEAN, 4)
    return family, default_param(family)


def random_psd(gen: np.random.Generator, d: int, rank: int = None) -> np.ndarray:
    """A·Aᵀ com A d×rank gaussiana"""
    a = gen.standard_normal((d, rank or d))
    return a @ a.T
