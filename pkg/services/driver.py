"""
Conductor en el lazo
====================

Controlador de lazo cerrado CFM-Fuzzy-PD con retardo de percepción-reacción,
filtro de media móvil en la realimentación, episodios de distracción y la
máquina de estados de tareas de conducción (FreeFlow / Following /
Emergency).

Todo opera sobre "bancos": arrays numpy con un elemento por conductor. Las
operaciones de un solo conductor son los mismos bancos con longitud 1.
"""
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from models.driver import (
    PERCEPT_ARRAY_FIELDS, BehaviorClass, DriverMode, DriverProfile, DriverState, PedalSign,
    Percept,
)
from models.scenario import DistractionConfig
from services.fuzzy import FisCurve, compile_fis
from services.idm import idm_acceleration

logger = logging.getLogger(__name__)

TIME_EPS = 1e-9
# Hueco mínimo usado por el IDM cuando la percepción (congelada o retrasada) es ≤ 0
MIN_PERCEIVED_GAP = 0.1
LEADER_FIELDS = ("has_leader", "gap", "leader_velocity")


# ============================================================================
# BANCO DE PERFILES
# ============================================================================

@dataclass
class DriverBank:
    """Perfiles de conductor como estructura de arrays"""
    v0: np.ndarray
    delta: np.ndarray
    alpha: np.ndarray
    beta_c: np.ndarray
    s0: np.ndarray
    tau_h: np.ndarray
    norm_scale: np.ndarray
    kp: np.ndarray
    kd: np.ndarray
    reaction_time: np.ndarray
    pedal_switch_time: np.ndarray
    filter_window: np.ndarray
    vision_range: np.ndarray
    distracted: np.ndarray
    behavior: List[BehaviorClass]
    fis_index: np.ndarray
    fis_curves: Tuple[FisCurve, ...]

    @classmethod
    def from_profiles(cls, profiles: Sequence[DriverProfile]) -> "DriverBank":
        configs = []
        index = []
        for p in profiles:
            if p.fis not in configs:
                configs.append(p.fis)
            index.append(configs.index(p.fis))

        def col(getter):
            return np.array([getter(p) for p in profiles], dtype=float)

        return cls(
            v0=col(lambda p: p.idm.v0),
            delta=col(lambda p: p.idm.delta),
            alpha=col(lambda p: p.idm.alpha),
            beta_c=col(lambda p: p.idm.beta_c),
            s0=col(lambda p: p.idm.s0),
            tau_h=col(lambda p: p.idm.tau_h),
            norm_scale=col(lambda p: p.norm_scale),
            kp=col(lambda p: p.pd.kp),
            kd=col(lambda p: p.pd.kd),
            reaction_time=col(lambda p: p.reaction_time),
            pedal_switch_time=col(lambda p: p.pedal_switch_time),
            filter_window=col(lambda p: p.filter_window),
            vision_range=col(lambda p: p.vision_range),
            distracted=np.array([p.is_distracted for p in profiles], dtype=bool),
            behavior=[p.behavior for p in profiles],
            fis_index=np.array(index, dtype=int),
            fis_curves=tuple(compile_fis(cfg) for cfg in configs),
        )

    def __len__(self) -> int:
        return len(self.v0)

    def fis(self, x: np.ndarray) -> np.ndarray:
        if len(self.fis_curves) == 1:
            return self.fis_curves[0](x)
        out = np.empty_like(x, dtype=float)
        for k, curve in enumerate(self.fis_curves):
            mask = self.fis_index == k
            out[mask] = curve(x[mask])
        return out


def _as_bank(profile) -> DriverBank:
    if isinstance(profile, DriverBank):
        return profile
    if isinstance(profile, DriverProfile):
        return DriverBank.from_profiles([profile])
    return DriverBank.from_profiles(profile)


# ============================================================================
# LÍNEA DE RETARDO
# ============================================================================

class DelayLine:
    """
    Búfer circular de muestras con marca de tiempo, un carril por conductor.

    pop(t) devuelve, por carril, la muestra con mayor marca ≤ t − delay.
    Mientras no haya muestra suficientemente antigua devuelve la más
    temprana del carril marcada como obsoleta.
    """

    def __init__(self, delay, dt: float, n: int, field_names: Sequence[str]):
        self.delay = np.broadcast_to(np.asarray(delay, dtype=float), (n,)).copy()
        if np.any(self.delay < 0):
            raise ValueError("retardo negativo")
        self.capacity = int(np.ceil(self.delay.max() / dt - TIME_EPS)) + 2
        self.n = n
        self.field_names = tuple(field_names)
        self._times = np.full(self.capacity, np.nan)
        self._values: Dict[str, Optional[np.ndarray]] = {name: None for name in self.field_names}
        self._start = 0
        self._count = 0
        self._valid_from = np.full(n, -np.inf)

    def __len__(self) -> int:
        return self._count

    def _chrono(self) -> np.ndarray:
        return (self._start + np.arange(self._count)) % self.capacity

    def push(self, t: float, **values) -> None:
        if self._count and t <= self._times[(self._start + self._count - 1) % self.capacity]:
            raise ValueError(f"marca de tiempo no creciente: {t}")
        if self._count == self.capacity:
            self._start = (self._start + 1) % self.capacity
            self._count -= 1
        slot = (self._start + self._count) % self.capacity
        self._times[slot] = t
        for name in self.field_names:
            value = np.asarray(values[name])
            if self._values[name] is None:
                self._values[name] = np.empty((self.capacity, self.n), dtype=value.dtype)
            self._values[name][slot] = value
        self._count += 1

    def pop(self, t: float) -> Tuple[Dict[str, np.ndarray], np.ndarray]:
        if not self._count:
            raise ValueError("línea de retardo vacía")
        order = self._chrono()
        times = self._times[order]
        target = t - self.delay
        idx = np.searchsorted(times, target + TIME_EPS, side="right") - 1
        first = np.searchsorted(times, self._valid_from - TIME_EPS, side="left")
        first = np.minimum(first, self._count - 1)
        stale = idx < first
        sel = order[np.maximum(idx, first)]
        lanes = np.arange(self.n)
        return {name: self._values[name][sel, lanes] for name in self.field_names}, stale

    def reset_lane(self, lane: int, t: float) -> None:
        """Descarta la historia de un carril (vehículo reaparecido)"""
        self._valid_from[lane] = t


def percept_delay_line(delay, dt: float, n: int) -> DelayLine:
    return DelayLine(delay, dt, n, PERCEPT_ARRAY_FIELDS)


def push_percept(line: DelayLine, percept: Percept) -> None:
    line.push(percept.t, **{name: getattr(percept, name) for name in PERCEPT_ARRAY_FIELDS})


def apply_reaction_delay(line: DelayLine, t: float) -> Percept:
    """Percepción entregada al conductor en t (la de t − reaction_time)"""
    values, warming_up = line.pop(t)
    values["stale"] = values["stale"] | warming_up
    return Percept(t=t, **values)


# ============================================================================
# FILTRO DE MEDIA MÓVIL
# ============================================================================

def window_samples(window: float, dt: float) -> int:
    return max(1, int(round(window / dt)))


def low_pass(window: float, history: Sequence[float], dt: float) -> float:
    """Media de las muestras dentro de la ventana final"""
    samples = np.asarray(history, dtype=float)
    return float(samples[-window_samples(window, dt):].mean())


class MovingAverage:
    """Media móvil causal por carril con ventana propia"""

    def __init__(self, window, dt: float, n: int):
        window = np.broadcast_to(np.asarray(window, dtype=float), (n,))
        self.samples = np.array([window_samples(w, dt) for w in window])
        self.depth = int(self.samples.max())
        self._buffer = np.zeros((self.depth, n))
        self._head = -1
        self._count = np.zeros(n, dtype=int)

    def update(self, values: np.ndarray) -> np.ndarray:
        self._head = (self._head + 1) % self.depth
        self._buffer[self._head] = values
        self._count = np.minimum(self._count + 1, self.depth)
        k = np.minimum(self._count, self.samples)
        ages = (self._head - np.arange(self.depth)) % self.depth
        mask = ages[:, None] < k[None, :]
        return (self._buffer * mask).sum(axis=0) / k

    def reset_lane(self, lane: int) -> None:
        self._count[lane] = 0


# ============================================================================
# DISTRACCIÓN
# ============================================================================

@dataclass
class DistractionEpisode:
    """Proceso de renovación atento/distraído por conductor"""
    active: np.ndarray
    started: np.ndarray
    next_start: np.ndarray
    end: np.ndarray
    frozen: Dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def initial(cls, eligible: np.ndarray, rng: np.random.Generator,
                cfg: DistractionConfig, t: float = 0.0) -> "DistractionEpisode":
        n = len(eligible)
        next_start = np.full(n, np.inf)
        count = int(eligible.sum())
        if count:
            next_start[eligible] = t + rng.exponential(cfg.mean_between, size=count)
        return cls(
            active=np.zeros(n, dtype=bool),
            started=np.zeros(n, dtype=bool),
            next_start=next_start,
            end=np.full(n, -np.inf),
            frozen={
                "has_leader": np.zeros(n, dtype=bool),
                "gap": np.full(n, np.inf),
                "leader_velocity": np.zeros(n),
            },
        )

    def copy(self) -> "DistractionEpisode":
        data = {f.name: getattr(self, f.name).copy() for f in fields(self) if f.name != "frozen"}
        return replace(self, **data, frozen={k: v.copy() for k, v in self.frozen.items()})


def distraction_step(rng: np.random.Generator, profile, episode: DistractionEpisode,
                     t: float, dt: float, cfg: DistractionConfig) -> Tuple[DistractionEpisode, np.ndarray]:
    """
    Avanza el proceso un paso. Devuelve el nuevo episodio y la máscara de
    conductores con la percepción congelada (gate = frozen).
    """
    eligible = _as_bank(profile).distracted
    episode = episode.copy()
    episode.started[:] = False

    ending = episode.active & (t >= episode.end - TIME_EPS)
    if ending.any():
        episode.active[ending] = False
        episode.next_start[ending] = t + rng.exponential(cfg.mean_between, size=int(ending.sum()))

    starting = eligible & ~episode.active & (t >= episode.next_start - TIME_EPS)
    if starting.any():
        episode.active[starting] = True
        episode.started[starting] = True
        episode.end[starting] = t + rng.uniform(
            cfg.duration_min, cfg.duration_max, size=int(starting.sum()))
    return episode, episode.active & eligible


def gate_percept(percept: Percept, episode: DistractionEpisode) -> Percept:
    """Congela el estado del líder durante el episodio; la alerta no se congela"""
    out = percept.copy()
    for name in LEADER_FIELDS:
        episode.frozen[name][episode.started] = getattr(percept, name)[episode.started]
        getattr(out, name)[episode.active] = episode.frozen[name][episode.active]
    out.stale = out.stale | episode.active
    return out


# ============================================================================
# MÁQUINA DE ESTADOS
# ============================================================================

def update_driver_state(state: DriverState, percept: Percept, profile, t: float,
                        emergency_hold: float = 2.0) -> DriverState:
    """Transiciones FreeFlow / Following / Emergency sobre la percepción retrasada"""
    bank = _as_bank(profile)
    new = state.copy()
    warn = percept.warning_active.astype(bool)
    new.last_warning_time = np.where(warn, t, state.last_warning_time)

    in_emergency = state.mode == DriverMode.EMERGENCY
    safe_gap = bank.s0 + percept.own_velocity * bank.tau_h
    clear = ~percept.has_leader | (percept.gap > safe_gap)
    held = (t - new.last_warning_time) >= emergency_hold - TIME_EPS
    stay = in_emergency & ~(held & clear)

    following = percept.has_leader & (percept.gap <= bank.vision_range)
    mode = np.where(
        warn | stay, DriverMode.EMERGENCY,
        np.where(following, DriverMode.FOLLOWING, DriverMode.FREE_FLOW),
    ).astype(np.int8)
    changed = mode != state.mode
    new.mode = mode
    new.mode_entry_time = np.where(changed, t, state.mode_entry_time)
    return new


# ============================================================================
# REFERENCIA Y PEDAL
# ============================================================================

def reference_acceleration(bank: DriverBank, percept: Percept, mode: np.ndarray) -> np.ndarray:
    """Aceleración IDM; sólo los conductores en Following ven al líder"""
    following = mode != DriverMode.FREE_FLOW
    following &= percept.has_leader
    gap = np.where(following, np.maximum(percept.gap, MIN_PERCEIVED_GAP), np.inf)
    dv = np.where(following, percept.own_velocity - percept.leader_velocity, 0.0)
    return idm_acceleration(percept.own_velocity, dv, gap, bank.v0, bank.delta,
                            bank.alpha, bank.beta_c, bank.s0, bank.tau_h)


def fuzzy_pd_pedal(profile, a_ref, a_meas_filtered, d_err_dt) -> np.ndarray:
    """u = FIS(e) + kp·e + kd·ė, con e normalizado por norm_scale y u en [-1, 1]"""
    bank = _as_bank(profile)
    err = (np.asarray(a_ref, dtype=float) - np.asarray(a_meas_filtered, dtype=float)) / bank.norm_scale
    d_err = np.asarray(d_err_dt, dtype=float) / bank.norm_scale
    u = bank.fis(np.clip(err, -1.0, 1.0)) + bank.kp * err + bank.kd * d_err
    return np.clip(u, -1.0, 1.0)


def apply_pedal_switch(u: np.ndarray, state: DriverState, profile, t: float) -> Tuple[np.ndarray, DriverState]:
    """Latencia de cambio acelerador↔freno: pedal en 0 durante pedal_switch_time"""
    bank = _as_bank(profile)
    new = state.copy()
    out = np.asarray(u, dtype=float).copy()
    pending = t < state.pedal_switch_deadline - TIME_EPS
    sign = np.sign(out).astype(np.int8)
    last = state.last_pedal_sign

    switching = ~pending & (sign != 0) & (last != 0) & (sign != last)
    latency = switching & (bank.pedal_switch_time > 0)
    new.pedal_switch_deadline = np.where(switching, t + bank.pedal_switch_time,
                                         state.pedal_switch_deadline)
    new.last_pedal_sign = np.where(~pending & (sign != 0), sign, last).astype(np.int8)
    out[pending | latency] = 0.0

    emergency = state.mode == DriverMode.EMERGENCY
    out[emergency] = -1.0
    new.last_pedal_sign[emergency] = PedalSign.BRAKE
    new.pedal_switch_deadline[emergency] = -np.inf
    return out, new


def pedal_command(profile, a_ref, a_meas_filtered, d_err_dt,
                  state: Optional[DriverState] = None, t: float = 0.0) -> Tuple[np.ndarray, DriverState]:
    """Fuzzy-PD seguido de la latencia de pedal; Emergency fuerza −1"""
    bank = _as_bank(profile)
    if state is None:
        state = DriverState.initial(len(bank), t)
    u = fuzzy_pd_pedal(bank, a_ref, a_meas_filtered, d_err_dt)
    return apply_pedal_switch(u, state, bank, t)
