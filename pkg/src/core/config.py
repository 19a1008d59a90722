"""
Centralized configuration management for the spectral element solver.

This module provides a Settings class that reads process-level options from
environment variables (and an optional .env file) with validation and clear
error messages. Per-run options (domain, degree, coefficient, eigen options)
live in run configurations, see src/schemas/run_config.py.
"""

import os
from typing import Optional

from dotenv import load_dotenv

load_dotenv()


class Settings:
    """
    Centralized settings class for the application.

    Loads configuration from environment variables with validation.
    """

    def __init__(self):
        # Logging Configuration
        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()
        self.LOG_FORMAT = os.getenv("LOG_FORMAT", "text").lower()

        # Application Configuration
        self.APP_NAME = "Spectral Element Transmission Solver"
        self.APP_VERSION = "1.0.0"

        # Eigensolver Configuration
        self.DENSE_THRESHOLD = self._get_int_env("DENSE_THRESHOLD", 3000)
        self.ARPACK_MAX_RESTARTS = self._get_int_env("ARPACK_MAX_RESTARTS", 2000)
        self.DEFAULT_SEED = self._get_int_env("DEFAULT_SEED", 0)

        # Element loops
        self.SEM_WORKERS = self._get_int_env("SEM_WORKERS", 1)

        # Artifacts
        self.OUTPUT_DIR = os.getenv("OUTPUT_DIR", "out")

        # Validate fields
        self._validate_log_level()
        self._validate_log_format()
        self._validate_solver_settings()
        self._validate_workers()

    def _get_int_env(self, key: str, default: int) -> int:
        """Read an integer environment variable or raise a clear error."""
        raw = os.getenv(key)
        if raw is None or raw == "":
            return default
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"{key} must be an integer, got '{raw}'")

    def _validate_log_level(self):
        """Validate log level is one of the allowed values."""
        allowed_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if self.LOG_LEVEL not in allowed_levels:
            raise ValueError(f"LOG_LEVEL must be one of: {', '.join(allowed_levels)}")

    def _validate_log_format(self):
        """Validate log format selector."""
        if self.LOG_FORMAT not in ("text", "json"):
            raise ValueError("LOG_FORMAT must be 'text' or 'json'")

    def _validate_solver_settings(self):
        """Validate eigensolver limits."""
        if not 1 <= self.DENSE_THRESHOLD <= 20000:
            raise ValueError("DENSE_THRESHOLD must be between 1 and 20000")

        if not 1 <= self.ARPACK_MAX_RESTARTS <= 100000:
            raise ValueError("ARPACK_MAX_RESTARTS must be between 1 and 100000")

        if self.DEFAULT_SEED < 0:
            raise ValueError("DEFAULT_SEED must be non-negative")

    def _validate_workers(self):
        """Validate worker count for element loops."""
        if not 1 <= self.SEM_WORKERS <= 64:
            raise ValueError("SEM_WORKERS must be between 1 and 64")


class SettingsManager:
    """
    Singleton manager for Settings to ensure single instance across application.
    """
    _instance: Optional[Settings] = None

    @classmethod
    def get_settings(cls) -> Settings:
        """
        Get or create the singleton Settings instance.

        Returns:
            Settings: The application settings instance

        Raises:
            ValueError: If an environment variable is malformed
        """
        if cls._instance is None:
            try:
                cls._instance = Settings()
            except ValueError as e:
                raise ValueError(
                    f"Configuration error: {str(e)}. "
                    "Please check your environment variables or .env file."
                ) from e
        return cls._instance

    @classmethod
    def reset_settings(cls) -> None:
        """Reset the singleton instance (useful for testing)."""
        cls._instance = None


def get_settings() -> Settings:
    """
    Get the application settings.

    Returns:
        Settings: The application settings instance
    """
    return SettingsManager.get_settings()
