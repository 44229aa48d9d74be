"""
Intelligent Driver Model
========================

Aceleración de referencia del conductor. La versión vectorizada opera
sobre arrays de todos los vehículos a la vez; sin líder se pasa s = inf.
"""
import logging

import numpy as np

from core.errors import GapDomainError
from models.driver import IdmParams

logger = logging.getLogger(__name__)


def desired_gap(v, dv, s0, tau_h, alpha, beta_c):
    """G(t) acotado inferiormente en 0 para no premiar solapes"""
    g = s0 + v * tau_h + v * dv / (2.0 * np.sqrt(alpha * beta_c))
    return np.maximum(0.0, g)


def idm_acceleration(v, dv, s, v0, delta, alpha, beta_c, s0, tau_h):
    """IDM vectorizado; s = inf equivale a flujo libre"""
    v = np.asarray(v, dtype=float)
    s = np.asarray(s, dtype=float)
    free = alpha * (1.0 - (v / v0) ** delta)
    g = desired_gap(v, dv, s0, tau_h, alpha, beta_c)
    with np.errstate(divide="ignore", invalid="ignore"):
        interaction = np.where(np.isfinite(s), (g / s) ** 2, 0.0)
    return free - alpha * interaction


def idm_reference_acceleration(p: IdmParams, v: float, dv: float, s: float | None = None) -> float:
    """Aceleración de referencia de un conductor (s None = flujo libre)"""
    if s is not None and s <= 0:
        raise GapDomainError(f"hueco no positivo: s={s}")
    gap = np.inf if s is None else s
    return float(idm_acceleration(v, dv, gap, p.v0, p.delta, p.alpha, p.beta_c, p.s0, p.tau_h))


def equilibrium_gap(p: IdmParams, v):
    """Hueco de equilibrio s*(v) con a = 0 y Δv = 0 (v < v0)"""
    v = np.asarray(v, dtype=float)
    g = p.s0 + v * p.tau_h
    return g / np.sqrt(1.0 - (v / p.v0) ** p.delta)
