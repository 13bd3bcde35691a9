"""
Jerarquía de errores del dominio de tomografía.
Cada clase lleva el código de salida que el CLI devuelve cuando la excepción
llega a la capa de presentación.
"""

from typing import Optional

EXIT_CONFIG_ERROR = 2
EXIT_DATA_ERROR = 3
EXIT_INVARIANT_VIOLATION = 4


class TomographyError(Exception):
    """Error base de la aplicación."""

    exit_code = EXIT_DATA_ERROR


class InputError(TomographyError):
    """Identificadores desconocidos, formas incompatibles o precondiciones rotas."""


class InsufficientDataError(TomographyError):
    """No quedan suficientes pares alineados para estimar una covarianza."""


class MeasurementGapError(TomographyError):
    """El proveedor de covarianzas no tiene datos para un par de hojas."""

    def __init__(self, a: str, b: str, detail: str = ""):
        """Guarda el par sin datos y el motivo."""
        self.pair = (a, b)
        self.detail = detail
        message = f"Sin covarianza para el par ({a}, {b})"
        if detail:
            message += f": {detail}"
        super().__init__(message)

    def __reduce__(self):
        return (type(self), (*self.pair, self.detail))


class InvariantViolationError(TomographyError):
    """Un invariante interno se ha roto (bug, no dato malo)."""

    exit_code = EXIT_INVARIANT_VIOLATION


class TopologyGenerationError(TomographyError):
    """El generador no consiguió un grafo conexo dentro del límite de reintentos."""


class ScenarioConfigError(TomographyError):
    """Fichero de escenario inválido; el mensaje nombra el campo."""

    exit_code = EXIT_CONFIG_ERROR


class LogFormatError(TomographyError):
    """Línea inválida en un log de medición NDJSON."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        """Antepone el número de línea al mensaje cuando se conoce."""
        self.line_number = line_number
        if line_number is not None:
            message = f"línea {line_number}: {message}"
        super().__init__(message)
