"""Resources - infrastructure and configuration."""

from app.resources.config import Settings, get_settings
from app.resources.scan_executor import ScanExecutor

__all__ = ["Settings", "get_settings", "ScanExecutor"]
