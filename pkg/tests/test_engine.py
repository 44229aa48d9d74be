import numpy as np
import pytest

from core.errors import ConfigurationError
from core.event_log import dumps_records
from models.driver import BehaviorClass, DriverMode, DriverModelConfig, DriverProfile, IdmParams
from models.network import ChannelConfig
from models.safety import CrashCause, FcwConfig, FcwKind
from models.scenario import DistractionConfig, ScenarioConfig
from services.engine import (
    Streams, collision_tick, crash_lifecycle, equilibrium_speed, init_scenario, replicate,
    run_scenario, run_world,
)
from services.idm import equilibrium_gap


def _types(records, kind):
    return [r for r in records if r["type"] == kind]


def _triangle(**overrides):
    """Tres vehículos en un anillo de 300 m; 0 y 1 solapados"""
    cfg = ScenarioConfig(duration=10.0, warmup=0.0, n_vehicles=3, track_length=300.0,
                         block_range=(1.0, 1.0), driver=DriverModelConfig(s0=0.5), **overrides)
    world = init_scenario(cfg)
    world.vehicles.pos[:] = [0.0, 4.0, 150.0]
    world.vehicles.vel[:] = [10.0, 0.0, 12.0]
    return world


# ============================================================================
# INICIALIZACIÓN
# ============================================================================

def test_equilibrium_speed_matches_idm_gap(idm_params):
    profile = DriverProfile(behavior=BehaviorClass.NORMAL, idm=idm_params)
    gap = float(equilibrium_gap(idm_params, 20.0))
    assert equilibrium_speed([profile, profile], gap) == pytest.approx(20.0, abs=1e-6)
    assert equilibrium_speed([profile], 1.0) == 0.0


def test_packing_too_dense_is_rejected():
    cfg = ScenarioConfig(n_vehicles=10, track_length=40.0)
    with pytest.raises(ConfigurationError):
        init_scenario(cfg)


def test_initial_placement(small_scenario):
    world = init_scenario(small_scenario)
    assert world.n == 8
    assert np.all((world.vehicles.pos >= 0) & (world.vehicles.pos < 200.0))
    assert np.all(world.vehicles.vel == world.vehicles.vel[0])
    assert world.records[0]["type"] == "run"
    assert sum(world.records[0]["class_counts"].values()) == 8


def test_streams_are_independent_per_seed():
    a = Streams.from_seed(5)
    b = Streams.from_seed(5)
    assert a.channel.random() == b.channel.random()
    assert a.population.random() != a.placement.random()


# ============================================================================
# EJECUCIÓN
# ============================================================================

def test_same_seed_gives_identical_log(small_scenario):
    _, first = run_scenario(small_scenario)
    _, second = run_scenario(small_scenario)
    assert dumps_records(first) == dumps_records(second)


def test_injected_nondeterminism_diverges(small_scenario):
    cfg = small_scenario.model_copy(update={"debug_inject_nondeterminism": True})
    _, first = run_scenario(cfg)
    _, second = run_scenario(cfg)
    assert dumps_records(first) != dumps_records(second)


def test_zero_duration_writes_only_run_record(small_scenario):
    report, records = run_scenario(small_scenario.model_copy(update={"duration": 0.0}))
    assert [r["type"] for r in records] == ["run"]
    assert len(report.runs) == 1
    assert report.total_collisions(small_scenario.fcw.kind.value) == 0


def test_record_cadence(small_scenario):
    _, records = run_scenario(small_scenario)
    assert len(_types(records, "delivery")) == 50
    assert len(_types(records, "headway")) == 5
    for record in _types(records, "delivery"):
        assert record["sent"] == 56
        assert 0 <= record["delivered"] <= record["sent"]


def test_warmup_excludes_early_records(small_scenario):
    cfg = small_scenario.model_copy(update={"warmup": 2.0})
    _, records = run_scenario(cfg)
    assert all(r["t"] >= 2.0 - 1e-9 for r in records if r["type"] != "run")


def test_single_vehicle_cruises_at_desired_speed():
    cfg = ScenarioConfig(duration=20.0, warmup=0.0, n_vehicles=1, track_length=1000.0,
                         driver=DriverModelConfig(s0=0.5))
    world = run_world(init_scenario(cfg))
    assert world.vehicles.vel[0] == pytest.approx(30.0, abs=0.5)
    assert not world.collisions


def test_warnings_are_classified_by_the_end(small_scenario):
    cfg = small_scenario.model_copy(update={
        "fcw": FcwConfig(kind=FcwKind.NHTSA_EARLY), "channel": ChannelConfig(per=0.0)})
    _, records = run_scenario(cfg)
    for record in _types(records, "warning"):
        assert record["classification"] in ("Positive", "False")
        assert record["algorithm"] == "nhtsa_early"
        assert record["host_class"] in ("Aggressive", "Normal", "Conservative")


def test_vehicle_count_is_conserved(small_scenario):
    world = run_world(init_scenario(small_scenario.model_copy(update={"duration": 10.0})))
    assert int(world.active.sum() + world.awaiting_respawn.sum()) == 8
    assert not (world.crashed & ~world.active).any()


def test_dynamics_are_smooth_in_dt():
    """Mismo escenario de equilibrio con dt = 0.01 y dt = 0.005"""
    worlds = []
    for dt in (0.01, 0.005):
        cfg = ScenarioConfig(duration=20.0, warmup=0.0, n_vehicles=6, track_length=300.0,
                             dt_physics=dt, p_distracted=0.0, channel=ChannelConfig(per=0.0),
                             seed=3)
        world = init_scenario(cfg)
        world.vehicles.pos[:] = np.arange(6) * 50.0
        worlds.append(run_world(world))
    coarse, fine = worlds
    assert not coarse.collisions and not fine.collisions
    drift = np.mod(coarse.vehicles.pos - fine.vehicles.pos + 150.0, 300.0) - 150.0
    np.testing.assert_allclose(drift, 0.0, atol=1.0)
    np.testing.assert_allclose(coarse.vehicles.vel, fine.vehicles.vel, atol=0.25)


# ============================================================================
# CHOQUES Y REAPARICIÓN
# ============================================================================

def test_collision_blocks_both_vehicles():
    world = _triangle()
    collision_tick(world, 0.0)
    assert list(world.crashed) == [True, True, False]
    assert world.vehicles.vel[0] == 0.0
    assert len(world.collisions) == 1
    event = world.collisions[0]
    assert (event.striker, event.struck) == (0, 1)
    assert event.cause.value == "Other"
    assert _types(world.records, "collision")[0]["fault_class"] == world.profiles[0].behavior.value


def test_crash_into_blocked_vehicle_is_pileup():
    world = _triangle()
    collision_tick(world, 0.0)
    world.vehicles.pos[2] = 296.0
    collision_tick(world, 5.0)
    assert len(world.collisions) == 2
    assert (world.collisions[1].striker, world.collisions[1].struck) == (2, 0)
    assert world.collisions[1].cause.value == "Pileup"


def test_blocked_vehicles_respawn_in_largest_gap():
    world = _triangle()
    collision_tick(world, 0.0)
    crash_lifecycle(world, 0.5, True)
    assert world.crashed[0] and world.active[0]

    crash_lifecycle(world, 1.0, True)
    assert world.active.all()
    assert not world.crashed.any()
    assert world.vehicles.pos[0] == pytest.approx(0.0)
    assert world.vehicles.pos[1] == pytest.approx(75.0)
    assert world.vehicles.vel[0] == pytest.approx(12.0)
    assert world.vehicles.vel[1] == pytest.approx(12.0)
    assert not np.isfinite(world.tracks.t[:, :2]).any()


def test_respawn_deferred_without_room():
    world = _triangle(respawn_min_gap=200.0)
    collision_tick(world, 0.0)
    crash_lifecycle(world, 1.0, True)
    assert list(world.active) == [False, False, True]
    assert list(world.awaiting_respawn) == [True, True, False]
    assert int(world.active.sum() + world.awaiting_respawn.sum()) == 3


def _distracted_follower(kind: FcwKind):
    """
    Seguidor (0) distraído desde t = 0 con 40 m de hueco a 15 m/s; el líder
    (1) frena a fondo en Emergency durante toda la ejecución.
    """
    cfg = ScenarioConfig(duration=8.0, warmup=0.0, n_vehicles=2, track_length=2000.0,
                         p_distracted=1.0, emergency_hold=1000.0,
                         distraction=DistractionConfig(duration_min=30.0, duration_max=30.0),
                         channel=ChannelConfig(per=0.0), fcw=FcwConfig(kind=kind), seed=5)
    world = init_scenario(cfg)
    world.vehicles.pos[:] = [0.0, 40.0 + cfg.vehicle.length]
    world.vehicles.vel[:] = 15.0
    world.episode.next_start[:] = [0.0, np.inf]
    world.driver.mode[1] = DriverMode.EMERGENCY
    world.driver.last_warning_time[1] = 0.0
    return run_world(world)


def test_distracted_follower_crash_is_attributed_to_distraction():
    world = _distracted_follower(FcwKind.NONE)
    assert len(world.collisions) == 1
    event = world.collisions[0]
    assert (event.striker, event.struck) == (0, 1)
    assert event.cause == CrashCause.DISTRACTION
    assert event.fault_class == world.profiles[0].behavior
    assert world.last_hard_brake[1] >= event.t - 1e-9


def test_early_warning_overrides_distraction():
    world = _distracted_follower(FcwKind.NHTSA_EARLY)
    assert not world.collisions
    warnings = _types(world.records, "warning")
    assert any(r["host"] == 0 and r["threat"] == 1 for r in warnings)
    assert world.vehicles.vel[0] == pytest.approx(0.0, abs=1e-9)


# ============================================================================
# RÉPLICAS
# ============================================================================

def test_replicate_single_seed(small_scenario):
    outputs, report, summary = replicate(small_scenario, [7], n_jobs=1)
    assert len(outputs) == 1
    assert summary.seeds == [7]
    assert all(stat.std == 0.0 for stat in summary.metrics.values())
    _, records = run_scenario(small_scenario)
    assert dumps_records(outputs[0].records) == dumps_records(records)


def test_replicate_identical_seeds_have_no_spread(small_scenario):
    outputs, report, summary = replicate(small_scenario, [3, 3], n_jobs=1)
    assert dumps_records(outputs[0].records) == dumps_records(outputs[1].records)
    assert all(stat.std == 0.0 for stat in summary.metrics.values())
    assert len(report.runs) == 2


def test_replicate_algorithms_in_parallel(small_scenario):
    kinds = [FcwKind.NONE, FcwKind.CAMP]
    outputs, report, _ = replicate(small_scenario, [1, 2], kinds, n_jobs=2)
    assert sorted((o.algorithm, o.seed) for o in outputs) == [
        ("camp", 1), ("camp", 2), ("none", 1), ("none", 2)]
    assert report.algorithms == ["camp", "none"]


def test_replicate_requires_seeds(small_scenario):
    with pytest.raises(ValueError):
        replicate(small_scenario, [])
