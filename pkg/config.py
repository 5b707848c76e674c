"""Application configuration management."""
import math
import os


class Config:
    """Base configuration."""
    DEFAULT_SEED = int(os.environ.get('SFMAXENT_SEED', 0))
    LOG_LEVEL = os.environ.get('SFMAXENT_LOG_LEVEL', 'INFO')
    OUTPUT_DIR = os.environ.get('SFMAXENT_OUTPUT_DIR', 'runs')

    # Walker experiments (N=10^4 walkers at x=100, K=10, dt=1e-5)
    SIMULATION_DEFAULTS = {
        'n_walkers': 10000,
        'x_init': 100.0,
        'K': 10.0,
        'dt': 1e-5,
        'drift': 0.0,
        'n_steps': 1000,
        'snapshot_every': 250,
    }
    BOUNDED_DEFAULTS = {'x0': 1.0, 'x_max': 1e4, 'exact_steps': True}
    ZIPF_DEFAULTS = {'mean_u_target': 1.0, 'x0': 1.0, 'x_init': math.e}

    # Synthetic census tables
    FIXTURE_DEFAULTS = {
        'family': 'zipf',
        'n': 150,
        'years': (1990, 2000, 2010),
        'K': 0.01,
        'x0': 1000.0,
        'lam': 1.0,
        'u_max': math.inf,
    }

    CONVERGENCE_KS = 0.01
    HISTOGRAM_BINS = 'fd'
    TOP_N = 150

    DEBUG = False
    TESTING = False


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True
    LOG_LEVEL = os.environ.get('SFMAXENT_LOG_LEVEL', 'DEBUG')


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False


class TestingConfig(Config):
    """Testing configuration."""
    TESTING = True
    DEFAULT_SEED = 0
    SIMULATION_DEFAULTS = {
        **Config.SIMULATION_DEFAULTS,
        'n_walkers': 500,
        'dt': 0.01,
        'n_steps': 50,
        'snapshot_every': 25,
    }


config = {
    'development': DevelopmentConfig,
    'production': ProductionConfig,
    'testing': TestingConfig,
    'default': ProductionConfig
}
