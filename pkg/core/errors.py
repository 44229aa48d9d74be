"""
Excepciones de dominio de VSafe

Todas heredan de ValueError para poder capturarlas en bloque.
"""
from typing import Any, Dict, Optional


class ConfigurationError(ValueError):
    """Configuración de escenario, FIS o población inválida"""


class GapDomainError(ValueError):
    """Hueco neto no positivo: es una colisión, no una entrada de control"""


class TrajectoryFormatError(ValueError):
    """Archivo de trayectorias NGSIM mal formado"""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"fila {row}: {message}"
        super().__init__(message)


class DeterminismError(ValueError):
    """Dos ejecuciones con la misma semilla produjeron registros distintos"""

    def __init__(self, index: int, first: Optional[Dict[str, Any]], second: Optional[Dict[str, Any]]):
        self.index = index
        self.first = first
        self.second = second
        super().__init__(
            f"divergencia en el registro {index}: {first!r} != {second!r}")
