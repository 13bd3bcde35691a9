"""
Módulo de configuración para el toolkit de tomografía pasiva DCE.
Este módulo proporciona una clase de configuración centralizada que carga variables
de entorno para los distintos componentes de la aplicación: rutas de datos, nivel
de log, paralelismo de escenarios y valores por defecto del simulador y de la
recuperación de árboles.
La configuración se carga desde variables de entorno usando python-dotenv,
permitiendo ajustar el comportamiento sin tocar los ficheros de escenario.
Clases:
    Config: Clase principal de configuración que contiene todos los ajustes de proceso.
Variables de Entorno (todas opcionales):
    - TOMO_LOG_LEVEL: Nivel de logging (INFO)
    - TOMO_DATA_DIR: Directorio base de datos (data)
    - TOMO_REPORTS_DIR: Directorio de reportes JSON (data/reports)
    - TOMO_LOGS_DIR: Directorio de logs de medición NDJSON (data/logs)
    - TOMO_WORKERS: Procesos para ejecutar semillas en paralelo (1)
    - TOMO_RHO_FLOOR: Mínimo de la heurística de ϱ en ms² (0.01)
    - TOMO_WAXMAN_ALPHA: Parámetro alpha de Waxman (0.15)
    - TOMO_WAXMAN_BETA: Parámetro beta de Waxman (0.2)
    - TOMO_TOPOLOGY_RETRIES: Reintentos al generar un grafo desconectado (20)
Ejemplo:
    # Acceder a valores de configuración
    reports_dir = Config.REPORTS_DIR
    rho_floor = Config.RHO_FLOOR

"""

import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Configuration class for the application."""

    # =================================
    # RUTAS
    # =================================
    DATA_DIR = os.getenv("TOMO_DATA_DIR", "data")
    REPORTS_DIR = os.getenv("TOMO_REPORTS_DIR", os.path.join(DATA_DIR, "reports"))
    LOGS_DIR = os.getenv("TOMO_LOGS_DIR", os.path.join(DATA_DIR, "logs"))

    # =================================
    # EJECUCIÓN
    # =================================
    LOG_LEVEL = os.getenv("TOMO_LOG_LEVEL", "INFO")
    WORKERS = int(os.getenv("TOMO_WORKERS", "1"))

    # =================================
    # RECUPERACIÓN
    # =================================
    RHO_FLOOR = float(os.getenv("TOMO_RHO_FLOOR", "0.01"))

    # =================================
    # SIMULADOR
    # =================================
    WAXMAN_ALPHA = float(os.getenv("TOMO_WAXMAN_ALPHA", "0.15"))
    WAXMAN_BETA = float(os.getenv("TOMO_WAXMAN_BETA", "0.2"))
    TOPOLOGY_RETRIES = int(os.getenv("TOMO_TOPOLOGY_RETRIES", "20"))
