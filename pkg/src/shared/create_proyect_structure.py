"""Utilidades para crear la estructura de carpetas del proyecto."""

from pathlib import Path
from typing import List, Optional

from src.framework.config import Config
from src.framework.logger import get_logger

logger = get_logger(__name__)


def create_project_structure(extra_folders: Optional[List[str]] = None) -> List[str]:
    """
    Crea las carpetas de datos necesarias para logs y reportes.

    Args:
        extra_folders: Carpetas adicionales (ej: el directorio de --out)

    Returns:
        list: Carpetas creadas en esta llamada
    """
    folders = [Config.DATA_DIR, Config.LOGS_DIR, Config.REPORTS_DIR]
    folders.extend(extra_folders or [])

    created = []
    for folder in folders:
        if folder and not Path(folder).exists():
            Path(folder).mkdir(parents=True, exist_ok=True)
            logger.debug(f"📁 Carpeta creada/verificada: {folder}")
            created.append(folder)
    return created


def create_default_structure() -> List[str]:
    """Crea la estructura por defecto definida en Config."""
    return create_project_structure()


if __name__ == "__main__":
    create_default_structure()
