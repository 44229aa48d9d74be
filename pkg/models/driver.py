"""
Modelos del conductor en el lazo
================================

Parámetros IDM, sistema de inferencia difusa (FIS), ganancias PD y perfil de
conductor como modelos pydantic (se cargan del JSON del escenario), más el
estado por conductor y las percepciones como dataclasses de arrays numpy:
cada campo es un vector sobre los vehículos del mundo (un conductor aislado
es un vector de longitud 1).
"""
from dataclasses import dataclass, fields, replace
from enum import Enum, IntEnum
from typing import Dict, Optional, Tuple

import numpy as np
import skfuzzy as fuzz
from pydantic import BaseModel, ConfigDict, Field, model_validator

FIS_LABELS: Tuple[str, ...] = ("NB", "NM", "NS", "ZE", "PS", "PM", "PB")
DEFAULT_MF_CENTERS: Tuple[float, ...] = (-0.9, -0.55, -0.25, 0.0, 0.25, 0.55, 0.9)
DEFAULT_MF_HALF_WIDTH = 0.3

# Rejilla usada para validar la cobertura del universo [-1, 1]
_COVERAGE_GRID = np.linspace(-1.0, 1.0, 2001)


class BehaviorClass(str, Enum):
    AGGRESSIVE = "Aggressive"
    NORMAL = "Normal"
    CONSERVATIVE = "Conservative"


BEHAVIOR_ORDER: Tuple[BehaviorClass, ...] = (
    BehaviorClass.AGGRESSIVE, BehaviorClass.NORMAL, BehaviorClass.CONSERVATIVE)


class AttentionType(str, Enum):
    CAUTIOUS = "Cautious"
    DISTRACTED = "Distracted"


class DriverMode(IntEnum):
    FREE_FLOW = 0
    FOLLOWING = 1
    EMERGENCY = 2


class PedalSign(IntEnum):
    BRAKE = -1
    NEUTRAL = 0
    THROTTLE = 1


class IdmParams(BaseModel):
    """Parámetros del Intelligent Driver Model de un conductor"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    v0: float = Field(default=30.0, gt=0, description="Velocidad deseada (m/s)")
    delta: float = Field(default=4.0, ge=1, description="Exponente de aceleración")
    alpha: float = Field(gt=0, description="Aceleración cómoda (m/s²)")
    beta_c: float = Field(gt=0, description="Deceleración cómoda (m/s²)")
    s0: float = Field(default=2.0, ge=0.5, description="Hueco mínimo (m)")
    tau_h: float = Field(gt=0, description="Tiempo de separación deseado (s)")


class MembershipFunction(BaseModel):
    """Función de pertenencia triangular (centro y semianchos)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    label: str
    center: float
    left: float = Field(ge=0, description="Ancho izquierdo")
    right: float = Field(ge=0, description="Ancho derecho")

    @model_validator(mode="after")
    def _check_width(self):
        if self.left + self.right <= 0:
            raise ValueError(f"MF {self.label} sin soporte")
        return self

    @property
    def vertices(self) -> Tuple[float, float, float]:
        return (self.center - self.left, self.center, self.center + self.right)

    def membership(self, x) -> np.ndarray:
        return fuzz.trimf(np.atleast_1d(np.asarray(x, dtype=float)), list(self.vertices))


def _symmetric_mfs(centers, half_width) -> Tuple[MembershipFunction, ...]:
    return tuple(
        MembershipFunction(label=label, center=c, left=half_width, right=half_width)
        for label, c in zip(FIS_LABELS, centers)
    )


class FisConfig(BaseModel):
    """FIS Mamdani de una entrada (error de aceleración) y una salida (pedal)"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    input_mfs: Tuple[MembershipFunction, ...] = Field(
        default_factory=lambda: _symmetric_mfs(DEFAULT_MF_CENTERS, DEFAULT_MF_HALF_WIDTH))
    output_mfs: Tuple[MembershipFunction, ...] = Field(
        default_factory=lambda: _symmetric_mfs(DEFAULT_MF_CENTERS, DEFAULT_MF_HALF_WIDTH))
    rules: Tuple[Tuple[str, str], ...] = Field(
        default=tuple((label, label) for label in FIS_LABELS),
        description="Pares (etiqueta de entrada, etiqueta de salida)")
    norm_scale: Optional[float] = Field(
        default=None, gt=0,
        description="Normalización de aceleración (m/s²); None = max(alpha, beta_c)")

    @classmethod
    def symmetric(cls, centers=DEFAULT_MF_CENTERS, half_width: float = DEFAULT_MF_HALF_WIDTH,
                  output_half_width: Optional[float] = None) -> "FisConfig":
        """FIS simétrico; un semiancho de salida menor da una curva más empinada"""
        out_hw = half_width if output_half_width is None else output_half_width
        return cls(input_mfs=_symmetric_mfs(centers, half_width),
                   output_mfs=_symmetric_mfs(centers, out_hw))

    @model_validator(mode="after")
    def _check_structure(self):
        for name, mfs in (("input_mfs", self.input_mfs), ("output_mfs", self.output_mfs)):
            labels = tuple(mf.label for mf in mfs)
            if labels != FIS_LABELS:
                raise ValueError(f"{name}: etiquetas deben ser {','.join(FIS_LABELS)}")
            centers = np.array([mf.center for mf in mfs])
            if np.any(np.diff(centers) <= 0):
                raise ValueError(f"{name}: centros no estrictamente crecientes")
            if mfs[3].center != 0.0:
                raise ValueError(f"{name}: ZE debe estar centrada en 0")
            if name != "input_mfs":
                continue
            cover = np.max([mf.membership(_COVERAGE_GRID) for mf in mfs], axis=0)
            if np.any(cover <= 0):
                raise ValueError(f"{name}: las MF no cubren [-1, 1]")
        for mf in self.output_mfs:
            a, _, c = mf.vertices
            if min(c, 1.0) - max(a, -1.0) <= 0:
                raise ValueError(f"output_mfs: {mf.label} con área nula en [-1, 1]")
        known = set(FIS_LABELS)
        for rule in self.rules:
            if rule[0] not in known or rule[1] not in known:
                raise ValueError(f"regla desconocida: {rule}")
        if {r[0] for r in self.rules} != known:
            raise ValueError("cada etiqueta de entrada necesita una regla")
        return self

    @property
    def is_symmetric(self) -> bool:
        def mirrored(mfs):
            return all(
                np.isclose(a.center, -b.center) and np.isclose(a.left, b.right)
                and np.isclose(a.right, b.left)
                for a, b in zip(mfs, reversed(mfs))
            )
        identity = all(i == o for i, o in self.rules)
        return identity and mirrored(self.input_mfs) and mirrored(self.output_mfs)


class PdGains(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kp: float = Field(default=0.2, ge=0, description="Ganancia proporcional")
    kd: float = Field(default=0.05, ge=0, description="Ganancia derivativa (s)")


class DriverModelConfig(BaseModel):
    """Constantes del modelo de conductor compartidas por la población"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    v0: float = Field(default=30.0, gt=0)
    delta: float = Field(default=4.0, ge=1)
    s0: float = Field(default=2.0, ge=0.5)
    fis: FisConfig = Field(default_factory=FisConfig)
    fis_by_class: Dict[BehaviorClass, FisConfig] = Field(default_factory=dict)
    pd: PdGains = Field(default_factory=PdGains)
    reaction_time: float = Field(default=1.4, gt=0)
    pedal_switch_time: float = Field(default=0.2, ge=0)
    filter_window: float = Field(default=0.5, gt=0)
    vision_range: float = Field(default=150.0, gt=0)

    def fis_for(self, behavior: BehaviorClass) -> FisConfig:
        return self.fis_by_class.get(behavior, self.fis)


class DriverProfile(BaseModel):
    """Un humano simulado"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    behavior: BehaviorClass
    attention: AttentionType = AttentionType.CAUTIOUS
    idm: IdmParams
    fis: FisConfig = Field(default_factory=FisConfig)
    pd: PdGains = Field(default_factory=PdGains)
    reaction_time: float = Field(default=1.4, gt=0)
    pedal_switch_time: float = Field(default=0.2, ge=0)
    filter_window: float = Field(default=0.5, gt=0)
    vision_range: float = Field(default=150.0, gt=0)

    @property
    def norm_scale(self) -> float:
        if self.fis.norm_scale is not None:
            return self.fis.norm_scale
        return max(self.idm.alpha, self.idm.beta_c)

    @property
    def is_distracted(self) -> bool:
        return self.attention == AttentionType.DISTRACTED


@dataclass
class DriverState:
    """Estado de la máquina de tareas de conducción, un valor por conductor"""
    mode: np.ndarray
    mode_entry_time: np.ndarray
    last_pedal_sign: np.ndarray
    pedal_switch_deadline: np.ndarray
    last_warning_time: np.ndarray

    @classmethod
    def initial(cls, n: int, t: float = 0.0, mode: DriverMode = DriverMode.FOLLOWING) -> "DriverState":
        return cls(
            mode=np.full(n, int(mode), dtype=np.int8),
            mode_entry_time=np.full(n, t, dtype=float),
            last_pedal_sign=np.zeros(n, dtype=np.int8),
            pedal_switch_deadline=np.full(n, -np.inf),
            last_warning_time=np.full(n, -np.inf),
        )

    def copy(self) -> "DriverState":
        return replace(self, **{f.name: getattr(self, f.name).copy() for f in fields(self)})


@dataclass
class Percept:
    """Lo que el conductor percibe en un instante (vector por conductor)"""
    t: float
    has_leader: np.ndarray
    gap: np.ndarray
    leader_velocity: np.ndarray
    own_velocity: np.ndarray
    own_accel_filtered: np.ndarray
    warning_active: np.ndarray
    stale: np.ndarray

    @classmethod
    def single(cls, t: float, gap: Optional[float], leader_velocity: float = 0.0,
               own_velocity: float = 0.0, own_accel_filtered: float = 0.0,
               warning_active: bool = False, stale: bool = False) -> "Percept":
        """Percepción de un único conductor; gap None = sin líder"""
        return cls(
            t=t,
            has_leader=np.array([gap is not None]),
            gap=np.array([np.inf if gap is None else float(gap)]),
            leader_velocity=np.array([float(leader_velocity)]),
            own_velocity=np.array([float(own_velocity)]),
            own_accel_filtered=np.array([float(own_accel_filtered)]),
            warning_active=np.array([bool(warning_active)]),
            stale=np.array([bool(stale)]),
        )

    def copy(self) -> "Percept":
        return replace(self, **{
            name: getattr(self, name).copy() for name in PERCEPT_ARRAY_FIELDS})


PERCEPT_ARRAY_FIELDS: Tuple[str, ...] = (
    "has_leader", "gap", "leader_velocity", "own_velocity",
    "own_accel_filtered", "warning_active", "stale",
)
