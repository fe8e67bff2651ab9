"""Entry point for: python -m src.experiments"""

from src.experiments.cli import app

app()
