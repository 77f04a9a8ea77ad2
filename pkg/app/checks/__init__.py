"""
Verification Checks

This package contains the registered verification checks. Every module in
the package is imported so its @register_check decorators run.
"""
import importlib
import logging
import pkgutil
from pathlib import Path

# Import base check first to set up the registry
from .base_check import CHECK_REGISTRY, BaseCheck, CheckConfig, register_check

logger = logging.getLogger(__name__)

checks_dir = Path(__file__).parent

for _finder, name, _ in pkgutil.iter_modules([str(checks_dir)]):
    if name not in ("__init__", "base_check"):
        try:
            importlib.import_module(f".{name}", package=__name__)
            logger.debug("Imported check module %s", name)
        except Exception:
            logger.warning("Could not import check module %s", name, exc_info=True)

# Export the check registry
CHECKS = CHECK_REGISTRY

__all__ = ["BaseCheck", "CheckConfig", "CHECKS", "register_check"]
