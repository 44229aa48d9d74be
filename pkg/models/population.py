"""
Modelo de población de conductores
==================================

PopulationSpec es el puente entre el análisis NGSIM (que la escribe) y la
inicialización de escenarios (que la consume tal cual). Los parámetros de
la gamma se guardan como forma y ESCALA: la moda (forma − 1)·escala ≈ 2.5 s
sólo cuadra leyendo 0.31 como escala.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.driver import BEHAVIOR_ORDER, BehaviorClass

Range = Tuple[float, float]


class PopulationSpec(BaseModel):
    """Distribución gamma de headways más rangos de aceleración por clase"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma_shape: float = Field(gt=0, description="Forma de la gamma")
    gamma_scale: float = Field(gt=0, description="Escala de la gamma (s)")
    thresholds: Tuple[float, float] = Field(
        default=(2.0, 3.0), description="Umbrales agresivo/normal/conservador (s)")
    class_ratios: Dict[BehaviorClass, float]
    accel_range: Dict[BehaviorClass, Range]
    decel_range: Dict[BehaviorClass, Range]

    @model_validator(mode="after")
    def _check_spec(self):
        low, high = self.thresholds
        if not low < high:
            raise ValueError("thresholds deben ser ascendentes")
        for name in ("class_ratios", "accel_range", "decel_range"):
            if set(getattr(self, name)) != set(BEHAVIOR_ORDER):
                raise ValueError(f"{name} debe tener las tres clases")
        total = sum(self.class_ratios.values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"class_ratios suma {total}, no 1")
        if any(r < 0 for r in self.class_ratios.values()):
            raise ValueError("class_ratios no puede tener valores negativos")
        for name in ("accel_range", "decel_range"):
            for behavior, (lo, hi) in getattr(self, name).items():
                if lo > hi or lo < 0:
                    raise ValueError(f"{name}.{behavior.value}: rango [{lo}, {hi}] inválido")
        return self

    @property
    def mode(self) -> float:
        return max(0.0, (self.gamma_shape - 1.0) * self.gamma_scale)

    @classmethod
    def i80_reference(cls) -> "PopulationSpec":
        """Población de referencia extraída de NGSIM I-80"""
        return cls(
            gamma_shape=9.15,
            gamma_scale=0.31,
            thresholds=(2.0, 3.0),
            class_ratios={
                BehaviorClass.AGGRESSIVE: 0.19,
                BehaviorClass.NORMAL: 0.43,
                BehaviorClass.CONSERVATIVE: 0.38,
            },
            accel_range={
                BehaviorClass.AGGRESSIVE: (1.53, 2.75),
                BehaviorClass.NORMAL: (1.43, 2.59),
                BehaviorClass.CONSERVATIVE: (1.30, 2.41),
            },
            decel_range={
                BehaviorClass.AGGRESSIVE: (1.52, 2.73),
                BehaviorClass.NORMAL: (1.43, 2.59),
                BehaviorClass.CONSERVATIVE: (1.27, 2.41),
            },
        )


@dataclass(frozen=True)
class GammaFit:
    shape: float
    scale: float
    n_samples: int
    capped: bool = False

    @property
    def mode(self) -> float:
        return max(0.0, (self.shape - 1.0) * self.scale)
