"""Command-line blueprints."""
