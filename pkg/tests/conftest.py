import numpy as np
import pytest

from helpers import strip_mesh
from models import FracOrder, SideCondition


@pytest.fixture
def half():
    return FracOrder(s=0.5)


@pytest.fixture
def small_mesh():
    return strip_mesh(0.5)


@pytest.fixture
def layer_mesh():
    return strip_mesh(0.5, X=40.0, Y=30.0, nx=320, ny=96)


@pytest.fixture
def asymptote_mesh():
    return strip_mesh(0.5, side_condition=SideCondition.ASYMPTOTE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
