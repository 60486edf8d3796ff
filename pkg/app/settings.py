"""
Centralized runtime settings for the weylfiber engine.

This module provides a single validated settings object used across the
application. All configuration is sourced from environment variables and
optional .env files; the command line may override individual bounds.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, replace
from typing import List, Optional

from dotenv import load_dotenv


def _to_bool(value: Optional[str]) -> bool:
    """
    Convert a string environment value to a boolean.

    Parameters
    ----------
    value : Optional[str]
        The environment variable value.

    Returns
    -------
    bool
        True if the value represents a truthy string, otherwise False.
    """
    if value is None:
        return False
    return value.strip().lower() in {"1", "true", "yes", "on"}


def _to_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError as exc:
        raise ValueError(f"{name} must be an integer, got {raw!r}.") from exc


@dataclass(frozen=True)
class Settings:
    """
    Parsed and validated runtime settings.

    Attributes
    ----------
    max_degree : int
        Degree bound of the truncated-filtration stabilization oracle.
    zpower : int
        Largest z-power tried when comparing two lattices.
    stabilization_window : int
        Consecutive degrees over which the oracle must be constant.
    max_spairs : int
        S-pairs one Buchberger run may process before giving up.
    max_saturation_steps : int
        Colon steps one z-saturation may take before giving up.
    stats : bool
        Attach engine statistics to every report.
    log_level : str
        Level name for the root logger.
    allowed_origins : List[str]
        CORS allowlist of the HTTP surface.
    """

    max_degree: int
    zpower: int
    stabilization_window: int
    max_spairs: int
    max_saturation_steps: int
    stats: bool
    log_level: str
    allowed_origins: List[str]

    def validate(self) -> None:
        """
        Validate bounds and cross-field constraints.

        Raises
        ------
        ValueError
            If a bound is not positive, the window exceeds the degree bound,
            or the log level is unknown.
        """
        for name in ("max_degree", "stabilization_window", "max_spairs", "max_saturation_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be a positive integer.")
        if self.zpower < 0:
            raise ValueError("zpower must be non-negative.")
        if self.stabilization_window > self.max_degree + 1:
            raise ValueError("stabilization_window cannot exceed max_degree + 1.")
        if not isinstance(logging.getLevelName(self.log_level), int):
            raise ValueError(f"Unknown log level {self.log_level!r}.")

    def with_overrides(self, **changes) -> "Settings":
        """Copy with the given fields replaced (``None`` values are ignored)."""
        updates = {k: v for k, v in changes.items() if v is not None}
        out = replace(self, **updates)
        out.validate()
        return out


_settings: Optional[Settings] = None


def _default_allowed_origins() -> List[str]:
    return [
        "http://localhost:8000",
        "http://127.0.0.1:8000",
    ]


def _load_settings() -> Settings:
    """
    Load and validate settings from environment variables.

    Returns
    -------
    Settings
        The validated settings instance.
    """
    load_dotenv(override=False)

    allowed_raw = os.getenv("ALLOWED_ORIGINS", "")
    allowed = [o.strip() for o in allowed_raw.split(",") if o.strip()] or _default_allowed_origins()

    settings = Settings(
        max_degree=_to_int("WEYLFIBER_MAX_DEGREE", 40),
        zpower=_to_int("WEYLFIBER_ZPOWER", 8),
        stabilization_window=_to_int("WEYLFIBER_STABILIZATION_WINDOW", 5),
        max_spairs=_to_int("WEYLFIBER_MAX_SPAIRS", 20000),
        max_saturation_steps=_to_int("WEYLFIBER_MAX_SATURATION_STEPS", 32),
        stats=_to_bool(os.getenv("WEYLFIBER_STATS")),
        log_level=os.getenv("WEYLFIBER_LOG_LEVEL", "WARNING").strip().upper() or "WARNING",
        allowed_origins=allowed,
    )
    settings.validate()
    return settings


def get_settings() -> Settings:
    """
    Return a cached settings instance.

    Returns
    -------
    Settings
        The validated settings object.
    """
    global _settings
    if _settings is None:
        _settings = _load_settings()
    return _settings


def use_settings(settings: Settings) -> None:
    """Install ``settings`` as the cached instance (command-line overrides)."""
    global _settings
    settings.validate()
    _settings = settings


def reset_settings() -> None:
    """Drop the cached instance so the next call re-reads the environment."""
    global _settings
    _settings = None
