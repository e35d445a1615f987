# config.py
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings.

    Every field can be overridden from the environment (or a ``.env`` file)
    with the ``FLOERD_`` prefix, e.g. ``FLOERD_MAX_GENERATORS=2000000``.
    """

    # API Configuration
    PROJECT_NAME: str = "floerd"
    API_V1_STR: str = "/api/v1"
    SERVER_HOST: str = "127.0.0.1"
    SERVER_PORT: int = 8000
    DEBUG: bool = False

    # Environment
    ENVIRONMENT: str = "development"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Complex size guard (projected generator count)
    MAX_GENERATORS: int = 500_000

    # Truncation window override; None means "derive from the complex"
    DEFAULT_WINDOW: Optional[int] = None

    # Metabolizer enumeration limits
    METABOLIZER_BUDGET: int = 10_000_000  # p^2 * p^n
    METABOLIZER_MAX_RANK: int = 3
    ELEMENT_CACHE_LIMIT: int = 100_000

    # Concurrency for d computations of one table
    MAX_WORKERS: int = 1

    # Reports
    REPORT_SCHEMA_VERSION: int = 1
    DOUBLED_TREFOIL_MODEL: str = "staircase+3boxes/v1"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="FLOERD_",
        case_sensitive=True,
        extra="ignore",
    )


# Configuración global
settings = Settings()
