"""Application settings and configuration."""

import os
from typing import Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Settings:
    """Application settings loaded from environment variables."""

    def __init__(self) -> None:
        """Initialize settings and validate variables."""
        # Cap on parallel seed workers (default: one per CPU)
        self.threads: int = self._get_positive_int("REVERSEDQ_THREADS", os.cpu_count() or 1)
        self.log_level: str = os.getenv("REVERSEDQ_LOG_LEVEL", "INFO").upper()
        # Default results directory for `run` when neither --out nor the config sets one
        self.output_dir: str = os.getenv("REVERSEDQ_OUTPUT_DIR", "results")

    @staticmethod
    def _get_positive_int(key: str, default: int) -> int:
        """
        Get a positive integer environment variable.

        Args:
            key: Environment variable name
            default: Value used when the variable is unset or empty

        Returns:
            Parsed integer value

        Raises:
            ValueError: If the variable is set but is not a positive integer
        """
        raw: Optional[str] = os.getenv(key)
        if not raw:
            return default
        try:
            value = int(raw)
        except ValueError:
            value = 0
        if value < 1:
            raise ValueError(
                f"Environment variable {key} must be a positive integer, got {raw!r}. "
                f"Please check your .env file or environment variables."
            )
        return value


# Global settings instance
settings = Settings()
