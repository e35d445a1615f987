import logging
import sys
from typing import Optional, TextIO

from floerd.core.config import settings

# Create a module-level logger instance
logger: logging.Logger = logging.getLogger(__name__)


def setup_logging(level: Optional[str] = None, stream: Optional[TextIO] = None) -> None:
    """Configura el sistema de logging para la aplicación.

    El nivel sale de ``settings`` (DEBUG gana sobre LOG_LEVEL) salvo que se
    indique ``level`` explícitamente, como hace la CLI con ``--log-level``.

    Args:
        level: Nombre del nivel (``"INFO"``, ``"DEBUG"``...). Opcional.
        stream: Destino de los registros. Por defecto stderr, para que stdout
            quede libre para los resultados de la CLI.
    """
    global logger

    if level is not None:
        log_level = getattr(logging, level.upper(), logging.INFO)
    elif settings.DEBUG:
        log_level = logging.DEBUG
    else:
        log_level = getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)

    log_format = (
        settings.LOG_FORMAT
        if settings.ENVIRONMENT == "development"
        else "%(asctime)s - %(levelname)s - %(message)s"
    )

    # Clear any existing handlers
    for handler in logging.root.handlers[:]:
        logging.root.removeHandler(handler)

    logging.basicConfig(
        level=log_level,
        format=log_format,
        handlers=[logging.StreamHandler(stream or sys.stderr)],
    )

    # Configuración para uvicorn
    logging.getLogger("uvicorn").handlers.clear()
    logging.getLogger("uvicorn").propagate = True
    logging.getLogger("uvicorn.access").handlers.clear()

    logger = logging.getLogger(__name__)
    logger.debug("Logging configurado correctamente")
