"""
Modelos del informe de métricas (forma de la tabla de choques y alertas)
"""
from typing import Dict, List

from pydantic import BaseModel, Field, computed_field

from models.driver import BEHAVIOR_ORDER
from models.safety import CrashCause

HEADWAY_BIN_WIDTH = 0.1
HEADWAY_MAX = 10.0
CAUSE_ORDER = (CrashCause.DISTRACTION, CrashCause.LEADER_HARD_BRAKING,
               CrashCause.PILEUP, CrashCause.OTHER)


def empty_collision_table() -> Dict[str, Dict[str, int]]:
    return {b.value: {c.value: 0 for c in CAUSE_ORDER} for b in BEHAVIOR_ORDER}


class WarningCell(BaseModel):
    total: int = 0
    positive: int = Field(default=0, description="Alertas que acabaron en cuasi-choque")

    @computed_field
    @property
    def ratio(self) -> float:
        return self.positive / self.total if self.total else 0.0


class RunMeta(BaseModel):
    """Cabecera de una ejecución (semilla × algoritmo)"""
    seed: int
    algorithm: str
    config_hash: str
    duration: float
    warmup: float
    n_vehicles: int
    class_counts: Dict[str, int] = Field(default_factory=dict)
    attention_counts: Dict[str, int] = Field(default_factory=dict)
    sent: int = 0
    delivered: int = 0

    @property
    def delivery_ratio(self) -> float:
        return self.delivered / self.sent if self.sent else 0.0


class HeadwayHistogram(BaseModel):
    """Histograma de headways en tierra (bins de 0.1 s; el último acumula la cola)"""
    bin_width: float = HEADWAY_BIN_WIDTH
    max_headway: float = HEADWAY_MAX
    counts: List[int] = Field(default_factory=lambda: [0] * int(round(HEADWAY_MAX / HEADWAY_BIN_WIDTH)))
    counts_by_class: Dict[str, List[int]] = Field(default_factory=dict)

    @computed_field
    @property
    def n_samples(self) -> int:
        return int(sum(self.counts))

    @property
    def n_bins(self) -> int:
        return len(self.counts)

    def bin_edges(self) -> List[float]:
        return [round(i * self.bin_width, 10) for i in range(self.n_bins + 1)]


class MetricsReport(BaseModel):
    """Agregado de una o varias ejecuciones; las tablas guardan sumas"""
    runs: List[RunMeta] = Field(default_factory=list)
    collisions: Dict[str, Dict[str, Dict[str, int]]] = Field(
        default_factory=dict, description="algoritmo → clase → causa → choques")
    warnings: Dict[str, Dict[str, WarningCell]] = Field(
        default_factory=dict, description="algoritmo → clase → alertas")
    headway: HeadwayHistogram = Field(default_factory=HeadwayHistogram)
    ttc_at_warning: Dict[str, List[float]] = Field(default_factory=dict)
    headway_at_warning: Dict[str, List[float]] = Field(default_factory=dict)

    @property
    def algorithms(self) -> List[str]:
        seen: List[str] = []
        for run in self.runs:
            if run.algorithm not in seen:
                seen.append(run.algorithm)
        return seen

    def runs_for(self, algorithm: str) -> int:
        return sum(1 for run in self.runs if run.algorithm == algorithm)

    def total_collisions(self, algorithm: str) -> int:
        table = self.collisions.get(algorithm, {})
        return sum(sum(causes.values()) for causes in table.values())

    def collisions_by_cause(self, algorithm: str) -> Dict[str, int]:
        out = {c.value: 0 for c in CAUSE_ORDER}
        for causes in self.collisions.get(algorithm, {}).values():
            for cause, count in causes.items():
                out[cause] += count
        return out

    def collisions_by_class(self, algorithm: str) -> Dict[str, int]:
        return {behavior: sum(causes.values())
                for behavior, causes in self.collisions.get(algorithm, {}).items()}

    def fault_shares(self, algorithm: str) -> Dict[str, Dict[str, float]]:
        """Reparto de culpas por causa y por clase (fracciones)"""
        total = self.total_collisions(algorithm)

        def share(counts: Dict[str, int]) -> Dict[str, float]:
            return {k: (v / total if total else 0.0) for k, v in counts.items()}

        return {
            "cause": share(self.collisions_by_cause(algorithm)),
            "class": share(self.collisions_by_class(algorithm)),
        }

    def warning_totals(self, algorithm: str) -> WarningCell:
        cells = self.warnings.get(algorithm, {}).values()
        return WarningCell(total=sum(c.total for c in cells),
                           positive=sum(c.positive for c in cells))


class MetricStat(BaseModel):
    mean: float
    std: float
    n: int


class ReplicateSummary(BaseModel):
    """Media y desviación (poblacional) de cada métrica escalar entre semillas"""
    seeds: List[int]
    metrics: Dict[str, MetricStat] = Field(default_factory=dict)
