"""Process-wide settings, logging and the error hierarchy."""

from src.core.config import Settings, settings
from src.core.errors import DnlsError
from src.core.logger import get_logger, setup_logging

__all__ = ["DnlsError", "Settings", "get_logger", "settings", "setup_logging"]
