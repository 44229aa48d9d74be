"""
Modelos de seguridad: configuración FCW y eventos de alerta y colisión
======================================================================

Los eventos son dataclasses con `to_record()`, que produce el registro
plano que se escribe en el log NDJSON (core.event_log).
"""
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from models.driver import BehaviorClass

GRAVITY = 9.81

# Deceleración asumida del anfitrión por nivel de alerta NHTSA (en g)
NHTSA_LEVEL_G: Dict[str, float] = {
    "nhtsa_early": 0.32,
    "nhtsa_intermediate": 0.40,
    "nhtsa_imminent": 0.55,
}


class FcwKind(str, Enum):
    CAMP = "camp"
    NHTSA_EARLY = "nhtsa_early"
    NHTSA_INTERMEDIATE = "nhtsa_intermediate"
    NHTSA_IMMINENT = "nhtsa_imminent"
    NONE = "none"

    @property
    def is_nhtsa(self) -> bool:
        return self.value in NHTSA_LEVEL_G


class FcwConfig(BaseModel):
    """Algoritmo de alerta de colisión frontal y sus constantes"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: FcwKind = FcwKind.NONE
    assumed_host_decel: Optional[float] = Field(
        default=None, gt=0,
        description="a_w (m/s²); None = 0.32g/0.40g/0.55g según el nivel NHTSA")
    assumed_delay: float = Field(default=1.3, ge=0, description="t_d (s)")
    buffer: float = Field(default=2.0, ge=0, description="Margen (m)")
    a_min: float = Field(
        default=0.5, ge=0, description="Deceleración del líder considerada frenada (m/s²)")
    v_stop: float = Field(default=0.5, ge=0, description="Velocidad de líder detenido (m/s)")
    camp_coeffs: Tuple[float, float, float, float] = Field(
        default=(0.3, 0.0, 0.2, 2.5),
        description="Umbral afín CAMP: c0 + c1·v_h' + c2·v_rel' + c3·[líder en marcha]")
    refractory: float = Field(
        default=2.0, ge=0, description="Supresión de alertas duplicadas por par (s)")

    @property
    def host_decel(self) -> float:
        if self.assumed_host_decel is not None:
            return self.assumed_host_decel
        return NHTSA_LEVEL_G.get(self.kind.value, NHTSA_LEVEL_G["nhtsa_early"]) * GRAVITY

    def with_kind(self, kind: FcwKind) -> "FcwConfig":
        return self.model_copy(update={"kind": kind})


class WarningClass(str, Enum):
    PENDING = "Pending"
    POSITIVE = "Positive"
    FALSE = "False"


class CrashCause(str, Enum):
    DISTRACTION = "Distraction"
    LEADER_HARD_BRAKING = "LeaderHardBraking"
    PILEUP = "Pileup"
    OTHER = "Other"


@dataclass
class WarningEvent:
    """Alerta FCW emitida a un anfitrión sobre su líder inmediato"""
    t: float
    host: int
    threat: int
    algorithm: str
    ttc_at_warning: Optional[float]
    headway_at_warning: Optional[float]
    classification: WarningClass = WarningClass.PENDING
    host_class: Optional[BehaviorClass] = None
    gap: float = 0.0
    host_velocity: float = 0.0
    lead_velocity: float = 0.0
    lead_accel: float = 0.0
    stale: bool = False

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record["type"] = "warning"
        record["classification"] = self.classification.value
        record["host_class"] = self.host_class.value if self.host_class else None
        return record


@dataclass
class CollisionEvent:
    """Choque trasero entre un vehículo y su líder"""
    t: float
    striker: int
    struck: int
    fault_class: BehaviorClass
    cause: CrashCause
    algorithm: str = FcwKind.NONE.value
    striker_velocity: float = 0.0
    struck_velocity: float = 0.0

    def to_record(self) -> Dict[str, Any]:
        record = asdict(self)
        record["type"] = "collision"
        record["fault_class"] = self.fault_class.value
        record["cause"] = self.cause.value
        return record
