"""Shared fixtures: the testing app, its CLI runner and small data tables."""
import math

import numpy as np
import pytest

from sfmaxent import create_app
from sfmaxent.models.ensemble import BoundsConfig, ExchangeConfig, SimConfig
from sfmaxent.models.equilibrium import EquilibriumModel

U_MAX_DEFAULT = 4 * math.log(10)


@pytest.fixture
def app(tmp_path):
    app = create_app('testing')
    app.config['OUTPUT_DIR'] = str(tmp_path / 'runs')
    yield app


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def benford_model():
    return EquilibriumModel.benford(U_MAX_DEFAULT, 1.0)


@pytest.fixture
def zipf_model():
    return EquilibriumModel.zipf(1.0)


@pytest.fixture
def free_config():
    return SimConfig(n_walkers=2000, x_init=100.0, K=10.0, dt=0.01, seed=3)


@pytest.fixture
def bounded_config():
    return SimConfig(n_walkers=2000, x_init=100.0, K=10.0, dt=0.05, seed=5,
                     bounds=BoundsConfig(1.0, 1e4), exact_steps=True)


@pytest.fixture
def exchange_config():
    return SimConfig(n_walkers=500, K=10.0, dt=0.02, seed=11,
                     exchange=ExchangeConfig(mean_u_target=1.0, x0=1.0))


@pytest.fixture
def wide_csv(tmp_path):
    path = tmp_path / 'places.csv'
    path.write_text(
        'GEOID,Place Name,Pop 1990,Pop 2000\n'
        'A1,"Alpha, town","1,000",2000\n'
        'B2,Beta,500,0\n'
        'C3,Gamma,250,250\n',
        encoding='utf-8')
    return path


@pytest.fixture
def wide_schema(tmp_path):
    path = tmp_path / 'schema.cfg'
    path.write_text(
        '# column mapping\n'
        'id = GEOID\n'
        'name = Place Name\n'
        'year.1990 = Pop 1990\n'
        'year.2000 = Pop 2000\n',
        encoding='utf-8')
    return path


def exact_zipf_sizes(n=150, c=1e6):
    return c / np.arange(1, n + 1, dtype=float)
