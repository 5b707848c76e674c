"""Application factory for the sfmaxent toolkit."""
from flask import Flask

from config import config

__version__ = '0.1.0'


def create_app(config_name='default'):
    """Create and configure the application that carries the commands."""
    app = Flask(__name__)
    app.config.from_object(config[config_name])

    # Register command blueprints
    from sfmaxent.commands.simulate_commands import simulate_bp
    from sfmaxent.commands.solve_commands import solve_bp
    from sfmaxent.commands.analyze_commands import analyze_bp
    from sfmaxent.commands.fixture_commands import fixture_bp
    from sfmaxent.commands.replay_commands import replay_bp

    app.register_blueprint(simulate_bp)
    app.register_blueprint(solve_bp)
    app.register_blueprint(analyze_bp)
    app.register_blueprint(fixture_bp)
    app.register_blueprint(replay_bp)

    return app
