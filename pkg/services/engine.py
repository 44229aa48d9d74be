"""
Motor de escenario
==================

Orquestación determinista del anillo. Cada paso de física (dt_physics)
ejecuta, en este orden fijo:

1. comunicaciones (ticks de 1/tx_rate): difusión de BSM y actualización de tracks
2. seguridad (ticks de dt_safety): FCW, alertas pendientes, muestras de headway
3. conductor: distracción → línea de retardo → máquina de estados → pedal
4. movilidad: pedal → aceleración e integración
5. detección de colisiones
6. ciclo de vida de choques: bloqueo y reaparición

Todo lo aleatorio sale de flujos independientes derivados de una única
SeedSequence(seed): población, colocación, distracción, canal y choques.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy import optimize

from core.config import get_settings
from core.errors import ConfigurationError
from models.driver import (
    BEHAVIOR_ORDER, AttentionType, DriverMode, DriverProfile, DriverState, Percept,
)
from models.network import TrackTable
from models.report import MetricsReport, ReplicateSummary
from models.safety import CollisionEvent, FcwKind, WarningEvent
from models.scenario import ScenarioConfig
from models.vehicle import VehicleState
from services.driver import (
    DelayLine, DistractionEpisode, DriverBank, MovingAverage, apply_reaction_delay,
    distraction_step, gate_percept, pedal_command, percept_delay_line, push_percept,
    reference_acceleration, update_driver_state,
)
from services.idm import equilibrium_gap
from services.metrics import build_report, merge_reports, summarize_runs
from services.mobility import gap_to_leader, integrate, leaders, pedal_to_accel
from services.outcomes import (
    PendingWarning, attribute_fault, classify_warning, detect_collisions, pair_collided,
)
from services.population import sample_population
from services.safety import FcwMonitor, headway_array, ttc_array, warning_events
from services.vnet import broadcast_step, predict_pairs, update_tracks

logger = logging.getLogger(__name__)

STREAM_NAMES = ("population", "placement", "distraction", "channel", "crash")
HARD_BRAKE_PEDAL = -0.99


@dataclass
class Streams:
    """Generadores independientes de una semilla"""
    population: np.random.Generator
    placement: np.random.Generator
    distraction: np.random.Generator
    channel: np.random.Generator
    crash: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int, inject_nondeterminism: bool = False) -> "Streams":
        children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
        gens = {name: np.random.default_rng(child) for name, child in zip(STREAM_NAMES, children)}
        if inject_nondeterminism:
            # entropía fresca del sistema: dos ejecuciones divergen
            gens["channel"] = np.random.default_rng(np.random.SeedSequence())
        return cls(**gens)


@dataclass
class World:
    """Estado completo de una ejecución, propiedad de un único hilo"""
    cfg: ScenarioConfig
    profiles: List[DriverProfile]
    bank: DriverBank
    vehicles: VehicleState
    driver: DriverState
    streams: Streams
    tracks: TrackTable
    monitor: FcwMonitor
    percept_line: DelayLine
    alert_line: DelayLine
    accel_filter: MovingAverage
    episode: DistractionEpisode
    active: np.ndarray
    crashed: np.ndarray
    crash_time: np.ndarray
    block_until: np.ndarray
    awaiting_respawn: np.ndarray
    prev_error: np.ndarray
    has_prev_error: np.ndarray
    last_distracted: np.ndarray
    last_hard_brake: np.ndarray
    alert_now: np.ndarray
    step_index: int = 0
    pending: List[PendingWarning] = field(default_factory=list)
    records: List[Dict] = field(default_factory=list)
    collisions: List[CollisionEvent] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.profiles)

    @property
    def t(self) -> float:
        return self.step_index * self.cfg.dt_physics

    @property
    def recording(self) -> bool:
        return self.step_index >= self.cfg.warmup_steps

    @property
    def algorithm(self) -> str:
        return self.cfg.fcw.kind.value

    def behavior_of(self, i: int):
        return self.profiles[i].behavior


# ============================================================================
# INICIALIZACIÓN
# ============================================================================

def equilibrium_speed(profiles: Sequence[DriverProfile], mean_gap: float) -> float:
    """Velocidad común v con media de s*_i(v) igual al hueco medio"""
    v_max = min(p.idm.v0 for p in profiles)

    def excess(v: float) -> float:
        return float(np.mean([equilibrium_gap(p.idm, v) for p in profiles])) - mean_gap

    if excess(0.0) >= 0:
        return 0.0
    upper = v_max * (1.0 - 1e-9)
    if excess(upper) <= 0:
        return v_max
    return float(optimize.brentq(excess, 0.0, upper, xtol=1e-10))


def init_scenario(cfg: ScenarioConfig, streams: Optional[Streams] = None) -> World:
    """Coloca n vehículos con separación uniforme y jitter, a velocidad de equilibrio"""
    streams = streams or Streams.from_seed(cfg.seed, cfg.debug_inject_nondeterminism)
    n = cfg.n_vehicles
    length = cfg.vehicle.length
    if n * length >= cfg.track_length:
        raise ConfigurationError(
            f"{n} vehículos de {length} m no caben en {cfg.track_length} m")

    profiles = sample_population(streams.population, cfg.population, n, cfg.driver,
                                 cfg.p_distracted, cfg.class_counts)
    bank = DriverBank.from_profiles(profiles)

    spacing = cfg.track_length / n
    jitter = 0.25 * (spacing - length) if n > 1 else 0.0
    pos = np.mod(np.arange(n) * spacing + streams.placement.uniform(-jitter, jitter, size=n),
                 cfg.track_length)
    if n == 1:
        speed = profiles[0].idm.v0
    else:
        speed = equilibrium_speed(profiles, cfg.track_length / n - length)
        speed = min(speed, min(p.idm.v0 for p in profiles))

    vehicles = VehicleState(pos=pos, vel=np.full(n, speed), accel=np.zeros(n), pedal=np.zeros(n))
    initial_mode = DriverMode.FOLLOWING if n > 1 else DriverMode.FREE_FLOW
    dt = cfg.dt_physics
    world = World(
        cfg=cfg,
        profiles=profiles,
        bank=bank,
        vehicles=vehicles,
        driver=DriverState.initial(n, 0.0, initial_mode),
        streams=streams,
        tracks=TrackTable.empty(n),
        monitor=FcwMonitor(cfg.fcw, n),
        percept_line=percept_delay_line(bank.reaction_time, dt, n),
        alert_line=DelayLine(cfg.emergency_reaction, dt, n, ("warning_active",)),
        accel_filter=MovingAverage(bank.filter_window, dt, n),
        episode=DistractionEpisode.initial(bank.distracted, streams.distraction, cfg.distraction),
        active=np.ones(n, dtype=bool),
        crashed=np.zeros(n, dtype=bool),
        crash_time=np.full(n, -np.inf),
        block_until=np.full(n, np.inf),
        awaiting_respawn=np.zeros(n, dtype=bool),
        prev_error=np.zeros(n),
        has_prev_error=np.zeros(n, dtype=bool),
        last_distracted=np.full(n, -np.inf),
        last_hard_brake=np.full(n, -np.inf),
        alert_now=np.zeros(n, dtype=bool),
    )
    world.records.append(run_record(world))
    logger.info(f"🚗 Escenario: {n} vehículos, {cfg.track_length:.0f} m, v inicial {speed:.2f} m/s, "
                f"FCW={cfg.fcw.kind.value}, semilla {cfg.seed}")
    return world


def run_record(world: World) -> Dict:
    cfg = world.cfg
    class_counts = {b.value: 0 for b in BEHAVIOR_ORDER}
    attention_counts = {a.value: 0 for a in AttentionType}
    for p in world.profiles:
        class_counts[p.behavior.value] += 1
        attention_counts[p.attention.value] += 1
    return {
        "type": "run", "seed": cfg.seed, "algorithm": world.algorithm,
        "config_hash": cfg.config_hash(), "duration": cfg.duration, "warmup": cfg.warmup,
        "n_vehicles": cfg.n_vehicles, "class_counts": class_counts,
        "attention_counts": attention_counts,
    }


# ============================================================================
# SUB-PASOS
# ============================================================================

def _ring_view(world: World) -> Tuple[np.ndarray, np.ndarray]:
    """Líder y hueco neto de cada vehículo en la carretera (−1 / inf si no hay)"""
    leader = leaders(world.vehicles.pos, world.active)
    has = leader >= 0
    gaps = np.full(world.n, np.inf)
    gaps[has] = gap_to_leader(world.vehicles.pos[has], world.vehicles.pos[leader[has]],
                              world.cfg.vehicle.length, world.cfg.track_length)
    return leader, gaps


def comms_tick(world: World, t: float) -> None:
    broadcast = broadcast_step(t, world.vehicles, world.cfg.channel, world.streams.channel,
                               world.active)
    update_tracks(world.tracks, broadcast, t)
    if world.recording:
        sent = int(world.active.sum()) * (int(world.active.sum()) - 1)
        world.records.append({"type": "delivery", "t": t, "sent": sent,
                              "delivered": broadcast.delivered_count})


def safety_tick(world: World, t: float, leader: np.ndarray, gaps: np.ndarray) -> None:
    cfg = world.cfg
    hosts = np.flatnonzero(world.active & ~world.crashed & (leader >= 0))
    threat = np.full(world.n, -1)
    gap = np.full(world.n, np.inf)
    v_l = np.zeros(world.n)
    a_l = np.zeros(world.n)
    stale = np.ones(world.n, dtype=bool)
    if len(hosts):
        pos, vel, acc, is_stale, known = predict_pairs(
            world.tracks, hosts, leader[hosts], t, cfg.channel.max_age)
        hosts, pos, vel, acc, is_stale = (hosts[known], pos[known], vel[known],
                                          acc[known], is_stale[known])
        threat[hosts] = leader[hosts]
        gap[hosts] = np.mod(pos - world.vehicles.pos[hosts], cfg.track_length) - cfg.vehicle.length
        v_l[hosts] = vel
        a_l[hosts] = acc
        stale[hosts] = is_stale

    alert, emit = world.monitor.evaluate(t, gap, world.vehicles.vel, world.vehicles.accel,
                                         v_l, a_l, threat)
    world.alert_now = alert

    if world.recording:
        for event in warning_events(cfg.fcw, t, emit, threat, gap, world.vehicles.vel, v_l, a_l, stale):
            event.host_class = world.behavior_of(event.host)
            world.pending.append(PendingWarning(event=event, deadline=t + cfg.warning_window))
    update_pending(world, t)

    if world.recording and world.step_index % cfg.headway_every == 0:
        record_headways(world, leader, gaps)


def update_pending(world: World, t: float, final: bool = False) -> None:
    """Observa los pares con alertas abiertas y finaliza las que vencen"""
    if not world.pending:
        return
    cfg = world.cfg
    pos = world.vehicles.pos
    vel = world.vehicles.vel
    still_open = []
    for item in world.pending:
        host, threat = item.event.host, item.event.threat
        if world.active[host] and world.active[threat]:
            gap = gap_to_leader(pos[host], pos[threat], cfg.vehicle.length, cfg.track_length)
            ttc = ttc_array(gap, vel[host], vel[threat])
            item.observe(None if np.isnan(ttc) else float(ttc),
                         bool(world.driver.mode[host] == DriverMode.EMERGENCY))
        if item.collided or final or t >= item.deadline - 1e-9:
            item.event.classification = classify_warning(item, cfg.ttc_near)
            world.records.append(item.event.to_record())
        else:
            still_open.append(item)
    world.pending = still_open


def record_headways(world: World, leader: np.ndarray, gaps: np.ndarray) -> None:
    valid = world.active & ~world.crashed & (leader >= 0) & (world.vehicles.vel > 0)
    idx = np.flatnonzero(valid)
    values = headway_array(gaps[idx], world.vehicles.vel[idx])
    world.records.append({
        "type": "headway", "t": world.t,
        "values": values.tolist(),
        "classes": [world.profiles[i].behavior.value for i in idx],
    })


def driver_tick(world: World, t: float, leader: np.ndarray, gaps: np.ndarray) -> np.ndarray:
    """Percepción → retardo → estado → pedal; devuelve el pedal de cada vehículo"""
    cfg = world.cfg
    dt = cfg.dt_physics
    bank = world.bank
    has = leader >= 0
    lead_vel = np.where(has, world.vehicles.vel[np.maximum(leader, 0)], 0.0)
    filtered = world.accel_filter.update(world.vehicles.accel)

    percept = Percept(
        t=t, has_leader=has, gap=gaps.copy(), leader_velocity=lead_vel,
        own_velocity=world.vehicles.vel.copy(), own_accel_filtered=filtered,
        warning_active=np.zeros(world.n, dtype=bool), stale=np.zeros(world.n, dtype=bool),
    )
    world.episode, frozen = distraction_step(world.streams.distraction, bank, world.episode,
                                             t, dt, cfg.distraction)
    world.last_distracted[frozen] = t
    push_percept(world.percept_line, gate_percept(percept, world.episode))
    world.alert_line.push(t, warning_active=world.alert_now)

    delayed = apply_reaction_delay(world.percept_line, t)
    alert, _ = world.alert_line.pop(t)
    delayed.warning_active = alert["warning_active"]

    world.driver = update_driver_state(world.driver, delayed, bank, t, cfg.emergency_hold)
    a_ref = reference_acceleration(bank, delayed, world.driver.mode)
    error = a_ref - filtered
    d_error = np.where(world.has_prev_error, (error - world.prev_error) / dt, 0.0)
    world.prev_error = error
    world.has_prev_error[:] = True

    pedal, world.driver = pedal_command(bank, a_ref, filtered, d_error, world.driver, t)
    world.last_hard_brake[(world.driver.mode == DriverMode.EMERGENCY) | (pedal <= HARD_BRAKE_PEDAL)] = t
    return pedal


def mobility_tick(world: World, pedal: np.ndarray) -> None:
    cfg = world.cfg
    v = world.vehicles
    frozen = world.crashed | ~world.active
    pedal = np.where(frozen, -1.0, pedal)
    a = pedal_to_accel(cfg.vehicle, pedal, v.vel, v.accel, cfg.dt_physics)
    moved = integrate(v, a, cfg.dt_physics, cfg.track_length)
    moved.pedal = pedal
    moved.pos = np.where(frozen, v.pos, moved.pos)
    moved.vel = np.where(frozen, 0.0, moved.vel)
    moved.accel = np.where(frozen, 0.0, moved.accel)
    world.vehicles = moved


def collision_tick(world: World, t: float) -> None:
    cfg = world.cfg
    leader, gaps = _ring_view(world)
    for striker, struck in detect_collisions(gaps, leader, world.crashed, world.active):
        fault_class, cause = attribute_fault(
            t, world.behavior_of(striker),
            world.crash_time[struck] if world.crashed[struck] else -np.inf,
            world.last_distracted[striker], world.last_hard_brake[struck],
            cfg.fault_window, cfg.pileup_window)
        event = CollisionEvent(
            t=t, striker=striker, struck=struck, fault_class=fault_class, cause=cause,
            algorithm=world.algorithm, striker_velocity=float(world.vehicles.vel[striker]),
            struck_velocity=float(world.vehicles.vel[struck]))
        pair_collided(world.pending, striker, struck)
        for vehicle in (striker, struck):
            if not world.crashed[vehicle]:
                world.crashed[vehicle] = True
                world.crash_time[vehicle] = t
                world.block_until[vehicle] = t + world.streams.crash.uniform(*cfg.block_range)
        world.collisions.append(event)
        if world.recording:
            world.records.append(event.to_record())
        logger.debug(f"💥 t={t:.2f}s choque {striker}→{struck} ({cause.value})")
    if world.crashed.any():
        world.vehicles.vel[world.crashed] = 0.0
        world.vehicles.accel[world.crashed] = 0.0
        world.vehicles.pedal[world.crashed] = -1.0


def crash_lifecycle(world: World, t: float, safety: bool) -> None:
    """Retira los bloqueos vencidos y reaparece vehículos en el mayor hueco"""
    expired = world.crashed & (t >= world.block_until - 1e-9)
    if expired.any():
        world.crashed[expired] = False
        world.active[expired] = False
        world.awaiting_respawn[expired] = True
        world.block_until[expired] = np.inf
    if not (expired.any() or (safety and world.awaiting_respawn.any())):
        return
    for vehicle in np.flatnonzero(world.awaiting_respawn):
        if not respawn(world, int(vehicle), t):
            logger.debug(f"⏳ t={t:.2f}s reaparición de {vehicle} aplazada")


def respawn(world: World, vehicle: int, t: float) -> bool:
    cfg = world.cfg
    length = cfg.vehicle.length
    leader, gaps = _ring_view(world)
    on_road = np.flatnonzero(world.active)
    v = world.vehicles
    if len(on_road) == 0:
        pos, speed = v.pos[vehicle], 0.0
    elif len(on_road) == 1:
        other = on_road[0]
        free = cfg.track_length - 2 * length
        if free / 2 < cfg.respawn_min_gap:
            return False
        pos = np.mod(v.pos[other] + cfg.track_length / 2, cfg.track_length)
        speed = float(v.vel[other])
    else:
        host = on_road[np.argmax(gaps[on_road])]
        half = (gaps[host] - length) / 2
        if half < cfg.respawn_min_gap:
            return False
        pos = np.mod(v.pos[host] + (gaps[host] + length) / 2, cfg.track_length)
        speed = float(0.5 * (v.vel[host] + v.vel[leader[host]]))

    v.pos[vehicle] = pos
    v.vel[vehicle] = speed
    v.accel[vehicle] = 0.0
    v.pedal[vehicle] = 0.0
    world.active[vehicle] = True
    world.awaiting_respawn[vehicle] = False
    world.crash_time[vehicle] = -np.inf
    world.has_prev_error[vehicle] = False
    world.driver.mode[vehicle] = DriverMode.FOLLOWING
    world.driver.mode_entry_time[vehicle] = t
    world.driver.last_pedal_sign[vehicle] = 0
    world.driver.pedal_switch_deadline[vehicle] = -np.inf
    world.driver.last_warning_time[vehicle] = -np.inf
    world.percept_line.reset_lane(vehicle, t + cfg.dt_physics)
    world.alert_line.reset_lane(vehicle, t + cfg.dt_physics)
    world.accel_filter.reset_lane(vehicle)
    world.tracks.forget(vehicle)
    world.monitor.forget(vehicle)
    world.alert_now[vehicle] = False
    logger.debug(f"♻️ t={t:.2f}s vehículo {vehicle} reaparece en {pos:.1f} m a {speed:.2f} m/s")
    return True


# ============================================================================
# BUCLE
# ============================================================================

def step(world: World) -> World:
    """Avanza un paso de física en el orden fijo de sub-pasos"""
    cfg = world.cfg
    t = world.t
    k = world.step_index
    safety = k % cfg.safety_every == 0

    if k % cfg.comms_every == 0:
        comms_tick(world, t)
    leader, gaps = _ring_view(world)
    if safety:
        safety_tick(world, t, leader, gaps)
    pedal = driver_tick(world, t, leader, gaps)
    mobility_tick(world, pedal)
    collision_tick(world, t)
    crash_lifecycle(world, t, safety)
    world.step_index += 1
    return world


def run_world(world: World) -> World:
    for _ in range(world.cfg.n_steps):
        step(world)
    update_pending(world, world.t, final=True)
    return world


def run_scenario(cfg: ScenarioConfig) -> Tuple[MetricsReport, List[Dict]]:
    """Ejecuta el escenario completo; devuelve el informe y los registros del log"""
    world = run_world(init_scenario(cfg))
    logger.info(f"🏁 Semilla {cfg.seed} / {cfg.fcw.kind.value}: {len(world.collisions)} choques")
    return build_report(world.records), world.records


# ============================================================================
# RÉPLICAS
# ============================================================================

@dataclass
class RunOutput:
    seed: int
    algorithm: str
    report: MetricsReport
    records: List[Dict]


def _run_one(cfg: ScenarioConfig, seed: int, kind: FcwKind) -> RunOutput:
    run_cfg = cfg.model_copy(update={"seed": seed, "fcw": cfg.fcw.with_kind(kind)})
    report, records = run_scenario(run_cfg)
    return RunOutput(seed=seed, algorithm=kind.value, report=report, records=records)


def replicate(cfg: ScenarioConfig, seeds: Sequence[int],
              algorithms: Optional[Sequence[FcwKind]] = None,
              n_jobs: Optional[int] = None) -> Tuple[List[RunOutput], MetricsReport, ReplicateSummary]:
    """Ejecuta cada semilla con cada algoritmo (en paralelo) y agrega"""
    if not seeds:
        raise ValueError("replicate requiere al menos una semilla")
    kinds = list(algorithms) if algorithms else [cfg.fcw.kind]
    tasks = [(seed, kind) for kind in kinds for seed in seeds]
    jobs = max(1, min(n_jobs or get_settings().THREADS, len(tasks)))
    logger.info(f"🔁 {len(tasks)} ejecuciones con {jobs} hilo(s)")
    outputs = Parallel(n_jobs=jobs)(delayed(_run_one)(cfg, seed, kind) for seed, kind in tasks)
    reports = [o.report for o in outputs]
    return outputs, merge_reports(reports), summarize_runs(reports)
