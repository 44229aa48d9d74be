"""
Modelos del vehículo (dinámica longitudinal de masa puntual)
"""
from dataclasses import dataclass, fields, replace

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class VehicleParams(BaseModel):
    """Parámetros físicos comunes a todos los vehículos"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    length: float = Field(default=4.5, gt=0, description="Longitud (m)")
    max_accel: float = Field(default=3.0, gt=0, description="Límite del motor (m/s²)")
    max_brake_decel: float = Field(
        default=8.0, gt=0,
        description="Deceleración máxima (m/s², positiva); ~1500 Nm en 1500 kg con rueda de 0.33 m")
    actuator_tau: float = Field(
        default=0.2, ge=0, description="Retardo de primer orden pedal→aceleración (s)")


@dataclass
class VehicleState:
    """Estado cinemático sobre el anillo, un valor por vehículo"""
    pos: np.ndarray
    vel: np.ndarray
    accel: np.ndarray
    pedal: np.ndarray

    @classmethod
    def single(cls, pos: float = 0.0, vel: float = 0.0, accel: float = 0.0,
               pedal: float = 0.0) -> "VehicleState":
        return cls(pos=np.array([float(pos)]), vel=np.array([float(vel)]),
                   accel=np.array([float(accel)]), pedal=np.array([float(pedal)]))

    @classmethod
    def zeros(cls, n: int) -> "VehicleState":
        return cls(pos=np.zeros(n), vel=np.zeros(n), accel=np.zeros(n), pedal=np.zeros(n))

    def __len__(self) -> int:
        return len(self.pos)

    def copy(self) -> "VehicleState":
        return replace(self, **{f.name: getattr(self, f.name).copy() for f in fields(self)})
