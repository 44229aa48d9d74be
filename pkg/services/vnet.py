"""
Comunicación V2V
================

Difusión de BSM a 10 Hz sobre un canal con pérdidas i.i.d. por par
(emisor, receptor) y seguimiento de cada vecino con un modelo cinemático
de aceleración constante. La latencia de un salto se considera nula: lo
enviado en el tick t se usa en el tick t.
"""
import logging
from dataclasses import replace
from typing import Optional, Tuple

import numpy as np

from models.network import Broadcast, Bsm, ChannelConfig, Track, TrackTable
from models.vehicle import VehicleState

logger = logging.getLogger(__name__)


# ============================================================================
# CANAL
# ============================================================================

def broadcast_step(t: float, states: VehicleState, cfg: ChannelConfig, rng: np.random.Generator,
                   active: Optional[np.ndarray] = None) -> Broadcast:
    """Cada vehículo emite un BSM; cada par lo pierde con probabilidad per"""
    n = len(states)
    delivered = rng.random((n, n)) >= cfg.per
    np.fill_diagonal(delivered, False)
    if active is not None:
        delivered &= active[:, None] & active[None, :]
    return Broadcast(t=t, pos=states.pos.copy(), vel=states.vel.copy(),
                     accel=states.accel.copy(), delivered=delivered)


# ============================================================================
# SEGUIMIENTO
# ============================================================================

def track_update(track: Track, bsm: Bsm, now: float, max_age: float = 1.0) -> Track:
    """Sustituye el BSM guardado sólo si el nuevo es más reciente"""
    if track.last is not None and bsm.t <= track.last.t:
        return replace(track, stale=(now - track.last_rx) > max_age)
    return Track(last=bsm, last_rx=now, stale=False)


def update_tracks(table: TrackTable, broadcast: Broadcast, now: float) -> TrackTable:
    """Versión matricial de track_update para todos los receptores"""
    newer = broadcast.delivered & (broadcast.t > table.t)
    receivers, senders = np.nonzero(newer)
    table.t[receivers, senders] = broadcast.t
    table.pos[receivers, senders] = broadcast.pos[senders]
    table.vel[receivers, senders] = broadcast.vel[senders]
    table.accel[receivers, senders] = broadcast.accel[senders]
    table.last_rx[receivers, senders] = now
    return table


def predict_kinematics(pos, vel, accel, dt):
    """Aceleración constante; si el vehículo se detiene deja de avanzar"""
    pos = np.asarray(pos, dtype=float)
    vel = np.asarray(vel, dtype=float)
    accel = np.asarray(accel, dtype=float)
    dt = np.asarray(dt, dtype=float)
    stops = (accel < 0) & (vel + accel * dt < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        horizon = np.where(stops, -vel / accel, dt)
    new_pos = pos + vel * horizon + 0.5 * accel * horizon ** 2
    new_vel = np.where(stops, 0.0, np.maximum(0.0, vel + accel * dt))
    return new_pos, new_vel


def track_predict(track: Track, t: float, max_age: float = 1.0) -> Tuple[float, float, bool]:
    """Estimación (pos, vel, obsoleto) del vecino en t"""
    if track.is_empty:
        raise ValueError("track vacío")
    pos, vel = predict_kinematics(track.last.pos, track.last.vel, track.last.accel,
                                  t - track.last.t)
    stale = (t - track.last_rx) > max_age
    return float(pos), float(vel), bool(stale)


def predict_pairs(table: TrackTable, receivers: np.ndarray, senders: np.ndarray,
                  t: float, max_age: float):
    """
    Estimación del emisor `senders[i]` vista por `receivers[i]`.
    Devuelve (pos, vel, accel, stale, known).
    """
    known = table.has_track(receivers, senders)
    last_t = np.where(known, table.t[receivers, senders], t)
    raw_accel = table.accel[receivers, senders]
    pos, vel = predict_kinematics(table.pos[receivers, senders], table.vel[receivers, senders],
                                  raw_accel, t - last_t)
    accel = np.where((raw_accel < 0) & (vel <= 0), 0.0, raw_accel)
    stale = ~known | ((t - table.last_rx[receivers, senders]) > max_age)
    return pos, vel, accel, stale, known
