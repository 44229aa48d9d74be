"""
Configuración de escenario
==========================

Documento JSON validado con pydantic. Las claves desconocidas se rechazan y
cada error de validación lleva su ruta (p.ej. `channel.per`), que la CLI
reporta con código de salida 2.
"""
import hashlib
import json
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.driver import BehaviorClass, DriverModelConfig
from models.network import ChannelConfig
from models.population import PopulationSpec
from models.safety import FcwConfig
from models.vehicle import VehicleParams

MAX_SEED = 2**64 - 1


def _ticks(period: float, dt: float) -> int:
    ratio = period / dt
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 1e-6:
        raise ValueError(f"{period} s no es múltiplo de dt_physics={dt} s")
    return n


class DistractionConfig(BaseModel):
    """Proceso de renovación atento/distraído de los conductores Distracted"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    mean_between: float = Field(
        default=60.0, gt=0, description="Media exponencial entre episodios (s)")
    duration_min: float = Field(default=3.0, gt=0, description="Duración mínima (s)")
    duration_max: float = Field(default=8.0, gt=0, description="Duración máxima (s)")

    @model_validator(mode="after")
    def _check_range(self):
        if self.duration_min > self.duration_max:
            raise ValueError("duration_min > duration_max")
        return self


class ScenarioConfig(BaseModel):
    """Escenario completo del anillo"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    # ============================================================================
    # TIEMPO Y GEOMETRÍA
    # ============================================================================
    duration: float = Field(default=900.0, ge=0, description="Duración simulada (s)")
    warmup: float = Field(
        default=120.0, ge=0, description="Tiempo inicial excluido de las métricas (s)")
    n_vehicles: int = Field(default=150, ge=1)
    track_length: float = Field(default=2000.0, gt=0, description="Perímetro del anillo (m)")
    dt_physics: float = Field(default=0.01, gt=0)
    dt_safety: float = Field(default=0.1, gt=0)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)

    # ============================================================================
    # SUBSISTEMAS
    # ============================================================================
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    fcw: FcwConfig = Field(default_factory=FcwConfig)
    population: PopulationSpec = Field(default_factory=PopulationSpec.i80_reference)
    population_file: Optional[str] = Field(
        default=None, description="PopulationSpec externa, relativa al JSON del escenario")
    class_counts: Optional[Dict[BehaviorClass, int]] = Field(
        default=None, description="Composición exacta por clase (suma = n_vehicles)")
    driver: DriverModelConfig = Field(default_factory=DriverModelConfig)
    vehicle: VehicleParams = Field(default_factory=VehicleParams)
    distraction: DistractionConfig = Field(default_factory=DistractionConfig)
    p_distracted: float = Field(default=0.03, ge=0, le=1)

    # ============================================================================
    # REACCIÓN, CHOQUES Y CLASIFICACIÓN
    # ============================================================================
    emergency_reaction: float = Field(
        default=1.3, ge=0, description="Retardo alerta → frenada total (s)")
    emergency_hold: float = Field(
        default=2.0, ge=0, description="Tiempo sin alerta para salir de Emergency (s)")
    block_range: Tuple[float, float] = Field(
        default=(10.0, 20.0), description="Duración del bloqueo tras un choque (s)")
    respawn_min_gap: float = Field(
        default=5.0, ge=0, description="Medio hueco mínimo para reaparecer (m)")
    fault_window: float = Field(default=1.5, gt=0, description="τ_c de atribución (s)")
    pileup_window: float = Field(
        default=20.0, gt=0, description="Antigüedad máxima del choque previo (s)")
    warning_window: float = Field(default=5.0, gt=0, description="W de clasificación (s)")
    ttc_near: float = Field(default=2.0, gt=0, description="TTC de cuasi-choque (s)")
    headway_sample_period: float = Field(default=2.0, gt=0)

    debug_inject_nondeterminism: bool = Field(
        default=False, description="Gancho de prueba: rompe el determinismo a propósito")

    @model_validator(mode="after")
    def _check_timing(self):
        _ticks(self.dt_safety, self.dt_physics)
        _ticks(1.0 / self.channel.tx_rate, self.dt_physics)
        low, high = self.block_range
        if not 0 <= low <= high:
            raise ValueError("block_range debe cumplir 0 <= min <= max")
        if self.class_counts is not None:
            if any(c < 0 for c in self.class_counts.values()):
                raise ValueError("class_counts no puede ser negativo")
            if sum(self.class_counts.values()) != self.n_vehicles:
                raise ValueError("class_counts debe sumar n_vehicles")
        return self

    # ============================================================================
    # PROPIEDADES DERIVADAS
    # ============================================================================
    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt_physics))

    @property
    def safety_every(self) -> int:
        return _ticks(self.dt_safety, self.dt_physics)

    @property
    def comms_every(self) -> int:
        return _ticks(1.0 / self.channel.tx_rate, self.dt_physics)

    @property
    def headway_every(self) -> int:
        return max(1, int(round(self.headway_sample_period / self.dt_physics)))

    @property
    def warmup_steps(self) -> int:
        return int(np.ceil(self.warmup / self.dt_physics - 1e-9))

    def canonical_json(self) -> str:
        data = self.model_dump(mode="json", exclude={"population_file"})
        return json.dumps(data, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        """Carga un escenario; population_file se resuelve junto al JSON"""
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        population_file = data.get("population_file")
        if population_file and "population" not in data:
            population_path = Path(population_file)
            if not population_path.is_absolute():
                population_path = path.parent / population_path
            data["population"] = json.loads(population_path.read_text(encoding="utf-8"))
        return cls.model_validate(data)
