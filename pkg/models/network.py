"""
Modelos de la capa V2V: BSM, canal con pérdidas y tabla de seguimiento
"""
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class ChannelConfig(BaseModel):
    """Canal de difusión con pérdidas i.i.d. por par (emisor, receptor)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    per: float = Field(default=0.3, ge=0, le=1, description="Packet Error Rate")
    tx_rate: float = Field(default=10.0, gt=0, description="Frecuencia de BSM (Hz)")
    max_age: float = Field(
        default=1.0, gt=0, description="Edad a partir de la cual un track es obsoleto (s)")


@dataclass(frozen=True)
class Bsm:
    """Basic Safety Message de un emisor"""
    sender: int
    t: float
    pos: float
    vel: float
    accel: float


@dataclass
class Track:
    """Estimación de un vecino a partir del último BSM recibido"""
    last: Bsm | None = None
    last_rx: float = -np.inf
    stale: bool = True

    @property
    def is_empty(self) -> bool:
        return self.last is None


@dataclass
class Broadcast:
    """Resultado de un tick de comunicación: BSM emitidos y matriz de entrega"""
    t: float
    pos: np.ndarray
    vel: np.ndarray
    accel: np.ndarray
    delivered: np.ndarray  # delivered[receptor, emisor]

    @property
    def sent(self) -> int:
        n = len(self.pos)
        return n * (n - 1)

    @property
    def delivered_count(self) -> int:
        return int(self.delivered.sum())

    def messages_for(self, receiver: int) -> list[Bsm]:
        senders = np.flatnonzero(self.delivered[receiver])
        return [
            Bsm(sender=int(j), t=self.t, pos=float(self.pos[j]),
                vel=float(self.vel[j]), accel=float(self.accel[j]))
            for j in senders
        ]


@dataclass
class TrackTable:
    """Mapa local de cada receptor: tracks[receptor, emisor] como arrays"""
    t: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    accel: np.ndarray
    last_rx: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "TrackTable":
        return cls(
            t=np.full((n, n), -np.inf),
            pos=np.zeros((n, n)),
            vel=np.zeros((n, n)),
            accel=np.zeros((n, n)),
            last_rx=np.full((n, n), -np.inf),
        )

    def has_track(self, receiver: np.ndarray, sender: np.ndarray) -> np.ndarray:
        return np.isfinite(self.t[receiver, sender])

    def forget(self, sender: int) -> None:
        """Olvida un emisor (reaparición tras un choque)"""
        self.t[:, sender] = -np.inf
        self.last_rx[:, sender] = -np.inf
