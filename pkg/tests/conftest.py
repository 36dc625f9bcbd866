"""pytest配置和共享fixtures"""

import sys
from pathlib import Path

import numpy as np
import pytest

# 添加项目根目录到路径
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from krigdes.config.settings import AnnealConfig, SearchSettings
from krigdes.design.schemas import CandidateSet, TrendBasis
from krigdes.design.space import make_grid
from krigdes.kriging.covariance import CovModel
from krigdes.kriging.system import KrigingVariant
from krigdes.search.schemas import Instance


@pytest.fixture
def grid4():
    """4×4 格点，坐标 {1,..,4}²"""
    return make_grid(4, 2)


@pytest.fixture
def grid5():
    """5×5 格点"""
    return make_grid(5, 2)


@pytest.fixture
def line_set():
    """一维两点：(0) 与 (1)"""
    return CandidateSet(ids=np.array([0, 1]), coords=np.array([[0.0], [1.0]]))


@pytest.fixture
def exp_model():
    """指数模型：κ=0.5, φ=1, σ²=1"""
    return CovModel(sigma2=1.0, phi=1.0, kappa=0.5)


@pytest.fixture
def smooth_model():
    return CovModel(sigma2=1.0, phi=1.0, kappa=1.5)


@pytest.fixture
def sk():
    return KrigingVariant.simple()


@pytest.fixture
def ok():
    return KrigingVariant.ordinary()


@pytest.fixture
def uk_linear():
    return KrigingVariant.universal(TrendBasis.from_name("linear"))


@pytest.fixture
def uk_quadratic():
    return KrigingVariant.universal(TrendBasis.from_name("quadratic"))


@pytest.fixture
def ok_instance(grid4, exp_model, ok):
    """4×4 格点上的普通克里金问题"""
    return Instance(cset=grid4, model=exp_model, variant=ok)


@pytest.fixture
def fast_search():
    """小规模搜索参数"""
    return SearchSettings(
        seed=0,
        max_outer_iters=50,
        restarts=2,
        anneal=AnnealConfig(moves_per_temperature=20, spread_samples=10),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
