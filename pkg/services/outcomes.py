"""
Resultados de seguridad: colisiones, atribución de culpa y clasificación
de alertas
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from models.driver import BehaviorClass
from models.safety import CrashCause, WarningClass, WarningEvent

logger = logging.getLogger(__name__)


# ============================================================================
# DETECCIÓN DE COLISIONES
# ============================================================================

def detect_collisions(gaps: np.ndarray, leader: np.ndarray, crashed: np.ndarray,
                      active: np.ndarray) -> List[Tuple[int, int]]:
    """
    Pares (golpeador, golpeado) con hueco neto ≤ 0 cuyo golpeador no está
    ya chocado, ordenados de delante hacia atrás en las cadenas.
    """
    candidates = np.flatnonzero(active & (leader >= 0) & (gaps <= 0) & ~crashed)
    pairs = {int(i): int(leader[i]) for i in candidates}
    ordered: List[Tuple[int, int]] = []
    remaining = dict(pairs)
    while remaining:
        strikers = set(remaining)
        # primero los pares cuyo golpeado no golpea a nadie en este paso
        front = [s for s, struck in remaining.items() if struck not in strikers]
        if not front:
            front = sorted(remaining)[:1]
        for striker in sorted(front):
            ordered.append((striker, remaining.pop(striker)))
    return ordered


# ============================================================================
# ATRIBUCIÓN
# ============================================================================

def attribute_fault(t: float, striker_class: BehaviorClass, struck_crash_time: float,
                    striker_last_distracted: float, struck_last_hard_brake: float,
                    fault_window: float = 1.5, pileup_window: float = 20.0) -> Tuple[BehaviorClass, CrashCause]:
    """
    Culpa = clase del golpeador. Causa con precedencia
    Pileup > Distraction > LeaderHardBraking > Other.
    """
    if t - struck_crash_time <= pileup_window:
        return striker_class, CrashCause.PILEUP
    if t - striker_last_distracted <= fault_window:
        return striker_class, CrashCause.DISTRACTION
    if t - struck_last_hard_brake <= fault_window:
        return striker_class, CrashCause.LEADER_HARD_BRAKING
    return striker_class, CrashCause.OTHER


# ============================================================================
# CLASIFICACIÓN DE ALERTAS
# ============================================================================

@dataclass
class PendingWarning:
    """Alerta a la espera de que pase la ventana W"""
    event: WarningEvent
    deadline: float
    min_ttc: float = np.inf
    emergency: bool = False
    collided: bool = False

    def observe(self, ttc: Optional[float], host_in_emergency: bool) -> None:
        if ttc is not None and ttc < self.min_ttc:
            self.min_ttc = ttc
        self.emergency = self.emergency or host_in_emergency


def classify_warning(pending: PendingWarning, ttc_near: float = 2.0) -> WarningClass:
    """Positiva si no hubo choque del par y sí cuasi-choque (TTC ≤ ttc_near o frenada de emergencia)"""
    if pending.collided:
        return WarningClass.FALSE
    if pending.min_ttc <= ttc_near or pending.emergency:
        return WarningClass.POSITIVE
    return WarningClass.FALSE


def pair_collided(pending: Sequence[PendingWarning], striker: int, struck: int) -> None:
    for item in pending:
        if item.event.host == striker and item.event.threat == struck:
            item.collided = True
