"""
Dinámica longitudinal de masa puntual sobre un anillo
=====================================================

Sustituye la planta física completa por pedal → aceleración con retardo de
primer orden y Euler semi-implícito. La posición es la del frontal del
vehículo; el hueco neto descuenta la longitud del líder.
"""
import logging

import numpy as np

from models.vehicle import VehicleParams, VehicleState

logger = logging.getLogger(__name__)


def pedal_to_accel(p: VehicleParams, u, v, a_prev, dt: float):
    """Pedal en [-1, 1] → aceleración con retardo de actuador"""
    u = np.asarray(u, dtype=float)
    a_cmd = np.where(u >= 0, u * p.max_accel, u * p.max_brake_decel)
    lag = 1.0 if p.actuator_tau == 0 else min(1.0, dt / p.actuator_tau)
    a = a_prev + (a_cmd - a_prev) * lag
    return np.where((np.asarray(v) <= 0) & (a < 0), 0.0, a)


def integrate(s: VehicleState, a, dt: float, L: float) -> VehicleState:
    """Euler semi-implícito; la velocidad nunca es negativa"""
    vel = np.maximum(0.0, s.vel + np.asarray(a, dtype=float) * dt)
    pos = np.mod(s.pos + vel * dt, L)
    # np.mod puede devolver L por redondeo
    pos = np.where(pos >= L, 0.0, pos)
    accel = (vel - s.vel) / dt
    return VehicleState(pos=pos, vel=vel, accel=accel, pedal=s.pedal.copy())


def gap_to_leader(host_pos, leader_pos, leader_len, L: float):
    """Hueco neto s = ((x_lider − x_host) mod L) − longitud del líder"""
    return np.mod(np.asarray(leader_pos) - np.asarray(host_pos), L) - leader_len


def ring_order(pos: np.ndarray) -> np.ndarray:
    """Índices de vehículos ordenados por posición creciente"""
    return np.argsort(pos, kind="stable")


def leaders(pos: np.ndarray, active: np.ndarray | None = None) -> np.ndarray:
    """
    Líder inmediato de cada vehículo (el siguiente en el sentido de la marcha).
    Con un solo vehículo activo no hay líder (-1).
    """
    n = len(pos)
    out = np.full(n, -1, dtype=int)
    idx = np.arange(n) if active is None else np.flatnonzero(active)
    if len(idx) < 2:
        return out
    order = idx[ring_order(pos[idx])]
    out[order] = np.roll(order, -1)
    return out
