"""
VSafe - Configuración del Sistema
=================================

Configuración centralizada del proceso (no del escenario). Los parámetros
de la simulación viven en el JSON del escenario (models.scenario); aquí sólo
hay rutas, logging y paralelismo, leídos de variables de entorno VSAFE_*.
"""

import logging
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Cargar variables de entorno
load_dotenv()

VALID_LOG_LEVELS: List[str] = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class Settings(BaseSettings):
    """Configuración principal del sistema"""

    model_config = SettingsConfigDict(
        env_prefix="VSAFE_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # ============================================================================
    # CONFIGURACIÓN DE LA APLICACIÓN
    # ============================================================================
    APP_NAME: str = "VSafe"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = (
        "Co-simulador longitudinal determinista: conductor en el lazo, "
        "V2V con pérdidas y evaluación de alertas de colisión frontal"
    )

    # ============================================================================
    # CONFIGURACIÓN DE PARALELISMO
    # ============================================================================
    THREADS: int = Field(
        default=1,
        description="Máximo de réplicas (semillas) ejecutadas en paralelo"
    )

    # ============================================================================
    # CONFIGURACIÓN DE DIRECTORIOS
    # ============================================================================
    DATA_DIR: str = Field(default="data", description="Directorio de datos")
    SCENARIOS_DIR: str = Field(
        default="scenarios", description="Directorio de escenarios")
    OUTPUT_DIR: str = Field(
        default="output", description="Directorio de resultados")
    LOGS_DIR: str = Field(default="logs", description="Directorio de logs")
    DEFAULT_SCENARIO: str = Field(
        default="scenarios/reference.json",
        description="Escenario usado cuando no se indica --config"
    )
    DEFAULT_POPULATION: str = Field(
        default="data/population_i80.json",
        description="PopulationSpec de referencia escrita por init"
    )
    NGSIM_PATH: Optional[str] = Field(
        default=None, description="Trayectorias I-80 reales para los tests de dataset"
    )

    # ============================================================================
    # CONFIGURACIÓN DE LOGGING
    # ============================================================================
    LOG_LEVEL: str = Field(default="INFO", description="Nivel de logging")
    LOG_FORMAT: str = Field(
        default="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        description="Formato de logs"
    )

    def __init__(self, **kwargs):
        super().__init__(**kwargs)
        self._validate_config()

    def _validate_config(self):
        """Valida la configuración del sistema"""
        if self.THREADS < 1:
            raise ValueError("❌ VSAFE_THREADS debe ser >= 1")

        if self.LOG_LEVEL.upper() not in VALID_LOG_LEVELS:
            raise ValueError(
                f"❌ VSAFE_LOG_LEVEL inválido: {self.LOG_LEVEL} "
                f"(válidos: {', '.join(VALID_LOG_LEVELS)})")

    @property
    def log_level(self) -> int:
        """Nivel de logging numérico"""
        return getattr(logging, self.LOG_LEVEL.upper())


# Instancia global de configuración
settings = Settings()


def get_settings() -> Settings:
    """Configuración vigente (la última cargada por reload_settings)"""
    return settings


def reload_settings():
    """Recarga la configuración desde variables de entorno"""
    global settings
    settings = Settings()
    return settings


def configure_logging(level: str | None = None):
    """Configura el logging raíz a partir de la configuración"""
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper()),
        format=settings.LOG_FORMAT,
        force=True,
    )


# ============================================================================
# FUNCIONES DE UTILIDAD
# ============================================================================

def get_environment_info():
    """Obtiene información del entorno actual"""
    return {
        "app": f"{settings.APP_NAME} v{settings.APP_VERSION}",
        "threads": settings.THREADS,
        "data_dir": settings.DATA_DIR,
        "scenarios_dir": settings.SCENARIOS_DIR,
        "output_dir": settings.OUTPUT_DIR,
        "log_level": settings.LOG_LEVEL,
    }


def print_config_summary():
    """Imprime un resumen de la configuración"""
    print("🔧 Configuración del Sistema:")
    print(f"   - Aplicación: {settings.APP_NAME} v{settings.APP_VERSION}")
    print(f"   - Hilos de réplica: {settings.THREADS}")
    print(f"   - Datos: {settings.DATA_DIR}")
    print(f"   - Escenarios: {settings.SCENARIOS_DIR}")
    print(f"   - Resultados: {settings.OUTPUT_DIR}")
    print(f"   - Logging: {settings.LOG_LEVEL}")


if __name__ == "__main__":
    print_config_summary()
