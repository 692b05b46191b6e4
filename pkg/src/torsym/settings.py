#!/usr/bin/env python3
"""
Settings for the torsym command-line tool.
Defaults live in config/settings.yaml; a .env file and TORSYM_* environment
variables override them.
"""

import logging
import os
from typing import Any, Dict, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError

logger = logging.getLogger("torsym.settings")

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "config")
SETTINGS_PATH = os.path.join(CONFIG_DIR, "settings.yaml")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class TorsymSettings(BaseModel):
    size_guard: int = Field(12, ge=1, description="Largest facet count for the automorphism search")
    report_schema: str = Field("torsym-report/1", description="Schema tag of machine-readable reports")
    log_level: str = Field("WARNING", description="Level for the stderr log handler")
    exceptional_prefix: str = Field("E", min_length=1, description="Base name of exceptional facets")
    random_seed: int = Field(20240229, description="Seed for random pair generators")


def _read_settings_file(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f) or {}
    if not isinstance(data, dict):
        raise ValueError(f"{path} does not hold a mapping")
    return data


def setup_environment() -> Dict[str, Optional[str]]:
    """
    Load a .env file when python-dotenv is available.

    Returns:
        Dict[str, Optional[str]]: the TORSYM_* overrides found in the environment
    """
    try:
        from dotenv import load_dotenv
        load_dotenv()
    except ImportError:
        logger.warning("python-dotenv not installed, skipping .env file loading")
    return {
        "size_guard": os.environ.get("TORSYM_SIZE_GUARD"),
        "log_level": os.environ.get("TORSYM_LOG_LEVEL"),
        "exceptional_prefix": os.environ.get("TORSYM_EXCEPTIONAL_PREFIX"),
    }


def load_settings(path: Optional[str] = None, environment: Optional[Dict[str, Optional[str]]] = None) -> TorsymSettings:
    """
    Load settings from YAML, falling back to built-in defaults on any error.

    Args:
        path: Settings file, defaults to the packaged settings.yaml
        environment: Overrides as returned by setup_environment

    Returns:
        TorsymSettings: The effective settings
    """
    path = path or SETTINGS_PATH
    try:
        settings = TorsymSettings(**_read_settings_file(path))
        logger.debug(f"Settings loaded from {path}")
    except (OSError, yaml.YAMLError, ValueError, ValidationError) as e:
        logger.warning(f"Error loading settings file: {str(e)}")
        logger.warning("Using default settings")
        settings = TorsymSettings()

    overrides: Dict[str, Any] = {}
    environment = environment or {}
    guard = environment.get("size_guard")
    if guard:
        try:
            overrides["size_guard"] = int(guard)
        except ValueError:
            logger.warning(f"Ignoring TORSYM_SIZE_GUARD={guard!r}: not an integer")
    level = environment.get("log_level")
    if level:
        if level.upper() in LOG_LEVELS:
            overrides["log_level"] = level.upper()
        else:
            logger.warning(f"Ignoring TORSYM_LOG_LEVEL={level!r}: unknown level")
    prefix = environment.get("exceptional_prefix")
    if prefix:
        overrides["exceptional_prefix"] = prefix
    if overrides:
        settings = settings.model_copy(update=overrides)
    return settings
