import numpy as np
import pytest

from ntg.fixtures import grid_graph, random_geometric_graph
from ntg.generate import Limits
from ntg.metrics import limits_from_dataset
from ntg.net import ModelConfig
from ntg.training import TrainConfig, train


def small_config(**overrides) -> ModelConfig:
    base = dict(
        hidden_size=8,
        embed_size=4,
        offset_range=5.0,
        offset_resolution=1.0,
        max_paths=4,
        max_path_len=4,
        n_styles=2,
    )
    base.update(overrides)
    return ModelConfig(**base)


@pytest.fixture(scope="session")
def toy_grid():
    return grid_graph(12, 12, 100.0)


@pytest.fixture(scope="session")
def toy_limits(toy_grid) -> Limits:
    return limits_from_dataset([toy_grid])


@pytest.fixture(scope="session")
def toy_model(toy_grid):
    """The overfit grid model shared by the end-to-end tests.

    hidden 32 / <= 50 epochs, per the acceptance envelope; training is
    deterministic so every session sees the same weights.
    """
    import time

    config = ModelConfig(hidden_size=32, embed_size=64, max_paths=8, max_path_len=10)
    tcfg = TrainConfig(epochs=50, batch_size=4, seed=3)
    start = time.time()
    params, logs = train([(toy_grid, None)], config, tcfg)
    return {"params": params, "logs": logs, "train_seconds": time.time() - start}


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def random_graph(seed: int, n: int = 20):
    return random_geometric_graph(n, np.random.default_rng(seed))
