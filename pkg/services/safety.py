"""
Métricas de amenaza y algoritmos FCW
====================================

Headway y TTC, y dos familias de alerta de colisión frontal evaluadas cada
tick de seguridad sobre datos comunicados (estado propio en tierra, líder
estimado por su track):

- NHTSA (ajustado al conductor): rango crítico por distancias de frenado
  con deceleración asumida del anfitrión de 0.32g / 0.40g / 0.55g.
- CAMP: deceleración requerida tras proyectar t_d hacia delante, comparada
  con un umbral afín configurable.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from models.network import Track
from models.safety import FcwConfig, FcwKind, WarningEvent
from models.vehicle import VehicleState
from services.vnet import predict_kinematics, track_predict

logger = logging.getLogger(__name__)


# ============================================================================
# MÉTRICAS
# ============================================================================

def time_headway(gap: float, v: float) -> Optional[float]:
    """τ = gap / v; indefinido con v ≤ 0"""
    if v <= 0:
        return None
    return gap / v


def time_to_collision(gap: float, v_h: float, v_l: float) -> Optional[float]:
    """TTC = gap / (v_h − v_l); sólo definido mientras el anfitrión se acerca"""
    if v_h <= v_l:
        return None
    return gap / (v_h - v_l)


def headway_array(gap, v) -> np.ndarray:
    """Headway vectorizado, NaN donde no está definido"""
    gap = np.asarray(gap, dtype=float)
    v = np.asarray(v, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(v > 0, gap / v, np.nan)


def ttc_array(gap, v_h, v_l) -> np.ndarray:
    closing = np.asarray(v_h, dtype=float) - np.asarray(v_l, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(closing > 0, np.asarray(gap, dtype=float) / closing, np.nan)


# ============================================================================
# NHTSA
# ============================================================================

def nhtsa_warning_range(v_h, v_l, a_l, cfg: FcwConfig):
    """Rango crítico r_w (m); se alerta si el hueco estimado es ≤ r_w"""
    v_h = np.asarray(v_h, dtype=float)
    v_l = np.asarray(v_l, dtype=float)
    a_l = np.asarray(a_l, dtype=float)
    a_w = cfg.host_decel
    t_d = cfg.assumed_delay
    braking = a_l < -cfg.a_min
    stopping = (v_l < cfg.v_stop) | braking
    with np.errstate(divide="ignore", invalid="ignore"):
        lead_stop = np.where(braking, v_l ** 2 / (2.0 * np.abs(a_l)), 0.0)
    r_stop = v_h * t_d + v_h ** 2 / (2.0 * a_w) - lead_stop + cfg.buffer
    v_rel = np.maximum(0.0, v_h - v_l)
    r_steady = v_rel * t_d + v_rel ** 2 / (2.0 * a_w) + cfg.buffer
    return np.where(stopping, r_stop, r_steady)


# ============================================================================
# CAMP
# ============================================================================

@dataclass
class CampProjection:
    gap: np.ndarray
    v_h: np.ndarray
    v_l: np.ndarray
    a_req: np.ndarray


def camp_projection(gap, v_h, v_l, a_l, t_d: float, a_h=0.0) -> CampProjection:
    """Proyecta ambos vehículos t_d y calcula la deceleración requerida"""
    gap = np.asarray(gap, dtype=float)
    a_l = np.asarray(a_l, dtype=float)
    x_h, v_h2 = predict_kinematics(0.0, v_h, a_h, t_d)
    x_l, v_l2 = predict_kinematics(0.0, v_l, a_l, t_d)
    gap2 = gap + x_l - x_h
    closing = np.maximum(0.0, v_h2 - v_l2)
    lead_braking = np.where(a_l < 0, np.abs(a_l), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        stopped = v_h2 ** 2 / (2.0 * gap2)
        moving = closing ** 2 / (2.0 * gap2) + lead_braking
        a_req = np.where(v_l2 <= 0, stopped, moving)
    a_req = np.where(gap2 <= 0, np.inf, a_req)
    return CampProjection(gap=gap2, v_h=v_h2, v_l=v_l2, a_req=a_req)


def camp_required_decel(gap, v_h, v_l, a_l, t_d: float, a_h=0.0):
    """Deceleración mínima constante del anfitrión para no chocar (inf si ya es inevitable)"""
    a_req = camp_projection(gap, v_h, v_l, a_l, t_d, a_h).a_req
    return float(a_req) if np.ndim(a_req) == 0 else a_req


def camp_threshold(cfg: FcwConfig, v_h, v_rel, lead_moving):
    c0, c1, c2, c3 = cfg.camp_coeffs
    return c0 + c1 * np.asarray(v_h) + c2 * np.asarray(v_rel) + c3 * np.asarray(lead_moving, dtype=float)


# ============================================================================
# EVALUACIÓN
# ============================================================================

def fcw_condition(cfg: FcwConfig, gap, v_h, a_h, v_l, a_l) -> np.ndarray:
    """Condición de alerta cruda del algoritmo configurado"""
    gap = np.asarray(gap, dtype=float)
    if cfg.kind == FcwKind.NONE:
        return np.zeros(gap.shape, dtype=bool)
    if cfg.kind.is_nhtsa:
        return gap <= nhtsa_warning_range(v_h, v_l, a_l, cfg)
    proj = camp_projection(gap, v_h, v_l, a_l, cfg.assumed_delay, a_h)
    threshold = camp_threshold(cfg, proj.v_h, np.maximum(0.0, proj.v_h - proj.v_l), proj.v_l > 0)
    return (proj.gap <= 0) | (proj.a_req >= threshold)


class FcwMonitor:
    """
    Evaluador FCW para todos los anfitriones con supresión de duplicados:
    un par (anfitrión, amenaza) no emite otra alerta hasta `refractory`
    segundos después de la última emitida.
    """

    def __init__(self, cfg: FcwConfig, n: int):
        self.cfg = cfg
        self.last_emit = np.full(n, -np.inf)
        self.last_threat = np.full(n, -1, dtype=int)

    def evaluate(self, t: float, gap, v_h, a_h, v_l, a_l, threat) -> tuple[np.ndarray, np.ndarray]:
        """Devuelve (condición cruda, máscara de alertas nuevas)"""
        threat = np.asarray(threat)
        alert = fcw_condition(self.cfg, gap, v_h, a_h, v_l, a_l) & (threat >= 0)
        same_pair = threat == self.last_threat
        recent = (t - self.last_emit) < self.cfg.refractory - 1e-9
        emit = alert & ~(same_pair & recent)
        self.last_emit[emit] = t
        self.last_threat[emit] = threat[emit]
        return alert, emit

    def forget(self, vehicle: int) -> None:
        self.last_emit[vehicle] = -np.inf
        self.last_threat[vehicle] = -1
        self.last_threat[self.last_threat == vehicle] = -1


def evaluate_fcw(cfg: FcwConfig, host: VehicleState, threat: Track, t: float,
                 track_length: float, lead_length: float, host_id: int = 0,
                 monitor: Optional[FcwMonitor] = None, max_age: float = 1.0) -> Optional[WarningEvent]:
    """Evalúa un anfitrión frente a su líder estimado; None si no hay alerta nueva"""
    if threat.is_empty:
        return None
    monitor = monitor or FcwMonitor(cfg, host_id + 1)
    pos_l, v_l, stale = track_predict(threat, t, max_age)
    a_l = threat.last.accel if v_l > 0 or threat.last.accel >= 0 else 0.0
    gap = float(np.mod(pos_l - host.pos[0], track_length) - lead_length)
    v_h = float(host.vel[0])
    n = len(monitor.last_emit)
    arrays = [np.zeros(n) for _ in range(5)]
    for arr, value in zip(arrays, (gap, v_h, float(host.accel[0]), v_l, a_l)):
        arr[host_id] = value
    threats = np.full(n, -1)
    threats[host_id] = threat.last.sender
    _, emit = monitor.evaluate(t, *arrays, threats)
    if not emit[host_id]:
        return None
    return WarningEvent(
        t=t, host=host_id, threat=threat.last.sender, algorithm=cfg.kind.value,
        ttc_at_warning=time_to_collision(gap, v_h, v_l),
        headway_at_warning=time_headway(gap, v_h),
        gap=gap, host_velocity=v_h, lead_velocity=v_l, lead_accel=a_l, stale=stale,
    )


def warning_events(cfg: FcwConfig, t: float, emit: np.ndarray, threat: np.ndarray, gap, v_h,
                   v_l, a_l, stale) -> List[WarningEvent]:
    """Construye los WarningEvent de los anfitriones que acaban de emitir"""
    hosts = np.flatnonzero(emit)
    ttc = ttc_array(gap, v_h, v_l)
    headway = headway_array(gap, v_h)
    events = []
    for i in hosts:
        events.append(WarningEvent(
            t=t, host=int(i), threat=int(threat[i]), algorithm=cfg.kind.value,
            ttc_at_warning=None if np.isnan(ttc[i]) else float(ttc[i]),
            headway_at_warning=None if np.isnan(headway[i]) else float(headway[i]),
            gap=float(gap[i]), host_velocity=float(v_h[i]), lead_velocity=float(v_l[i]),
            lead_accel=float(a_l[i]), stale=bool(stale[i]),
        ))
    return events
