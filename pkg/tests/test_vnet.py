import numpy as np
import pytest

from models.network import Bsm, ChannelConfig, Track, TrackTable
from models.vehicle import VehicleState
from services.vnet import (
    broadcast_step, predict_kinematics, predict_pairs, track_predict, track_update, update_tracks,
)


def _states(n, rng=None):
    rng = rng or np.random.default_rng(0)
    return VehicleState(pos=rng.uniform(0, 2000, n), vel=rng.uniform(0, 30, n),
                        accel=rng.normal(size=n), pedal=np.zeros(n))


# ============================================================================
# CANAL
# ============================================================================

def test_lossless_channel_delivers_everything():
    b = broadcast_step(0.0, _states(6), ChannelConfig(per=0.0), np.random.default_rng(1))
    assert b.delivered_count == b.sent == 30
    assert not np.diag(b.delivered).any()


def test_dead_channel_delivers_nothing():
    b = broadcast_step(0.0, _states(6), ChannelConfig(per=1.0), np.random.default_rng(1))
    assert b.delivered_count == 0


def test_delivery_ratio_matches_per():
    b = broadcast_step(0.0, _states(317), ChannelConfig(per=0.3), np.random.default_rng(2))
    assert b.delivered_count / b.sent == pytest.approx(0.70, abs=0.01)


def test_inactive_vehicles_neither_send_nor_receive():
    active = np.array([True, False, True, True])
    b = broadcast_step(0.0, _states(4), ChannelConfig(per=0.0), np.random.default_rng(3), active)
    assert not b.delivered[1].any()
    assert not b.delivered[:, 1].any()
    assert b.delivered_count == 6


def test_messages_for_receiver():
    states = VehicleState(pos=np.array([0.0, 50.0, 90.0]), vel=np.array([10.0, 11.0, 12.0]),
                          accel=np.zeros(3), pedal=np.zeros(3))
    b = broadcast_step(0.5, states, ChannelConfig(per=0.0), np.random.default_rng(0))
    msgs = b.messages_for(0)
    assert [m.sender for m in msgs] == [1, 2]
    assert msgs[0] == Bsm(sender=1, t=0.5, pos=50.0, vel=11.0, accel=0.0)


def test_reception_gaps_are_geometric():
    """Con PER 0.3 a 10 Hz el intervalo medio entre recepciones es 0.1/0.7 s"""
    rng = np.random.default_rng(42)
    cfg = ChannelConfig(per=0.3)
    states = _states(2)
    received = []
    for k in range(20000):
        t = k * 0.1
        if broadcast_step(t, states, cfg, rng).delivered[0, 1]:
            received.append(t)
    gaps = np.diff(received)
    assert gaps.mean() == pytest.approx(0.1 / 0.7, abs=0.005)
    assert gaps.min() == pytest.approx(0.1)


# ============================================================================
# SEGUIMIENTO
# ============================================================================

def test_newer_bsm_replaces_track():
    track = track_update(Track(), Bsm(1, 0.0, 10.0, 5.0, 0.0), now=0.0)
    assert track.last.pos == 10.0
    assert not track.stale
    track = track_update(track, Bsm(1, 0.1, 10.5, 5.0, 0.0), now=0.1)
    assert track.last.t == 0.1
    assert track.last_rx == 0.1


def test_older_or_equal_bsm_is_ignored():
    track = track_update(Track(), Bsm(1, 1.0, 10.0, 5.0, 0.0), now=1.0)
    same = track_update(track, Bsm(1, 1.0, 99.0, 5.0, 0.0), now=1.0)
    older = track_update(track, Bsm(1, 0.5, 99.0, 5.0, 0.0), now=2.5)
    assert same.last.pos == 10.0
    assert older.last.pos == 10.0
    assert older.stale


def test_track_predict_constant_acceleration():
    track = Track(last=Bsm(1, 0.0, 0.0, 10.0, 2.0), last_rx=0.0, stale=False)
    pos, vel, stale = track_predict(track, 0.1)
    assert pos == pytest.approx(1.01)
    assert vel == pytest.approx(10.2)
    assert not stale


def test_track_predict_stops_braking_vehicle():
    track = Track(last=Bsm(1, 0.0, 0.0, 1.0, -5.0), last_rx=0.0, stale=False)
    pos, vel, stale = track_predict(track, 1.0)
    assert pos == pytest.approx(0.1)
    assert vel == 0.0
    assert not stale
    _, _, stale = track_predict(track, 1.5)
    assert stale


def test_empty_track_cannot_predict():
    with pytest.raises(ValueError):
        track_predict(Track(), 0.0)


def test_prediction_exact_under_constant_acceleration():
    dt = np.linspace(0, 3, 31)
    pos, vel = predict_kinematics(100.0, 12.0, 1.5, dt)
    np.testing.assert_allclose(pos, 100.0 + 12.0 * dt + 0.75 * dt ** 2)
    np.testing.assert_allclose(vel, 12.0 + 1.5 * dt)


def test_update_tracks_keeps_newest_message():
    table = TrackTable.empty(3)
    cfg = ChannelConfig(per=0.0)
    rng = np.random.default_rng(0)
    first = _states(3)
    update_tracks(table, broadcast_step(1.0, first, cfg, rng), now=1.0)
    assert table.has_track(np.array([0]), np.array([1]))[0]
    assert table.pos[0, 1] == first.pos[1]

    old = broadcast_step(0.5, _states(3, np.random.default_rng(9)), cfg, rng)
    update_tracks(table, old, now=1.1)
    assert table.pos[0, 1] == first.pos[1]
    assert table.last_rx[0, 1] == 1.0


def test_predict_pairs_flags_unknown_and_old_tracks():
    table = TrackTable.empty(3)
    table.t[0, 1] = 0.0
    table.pos[0, 1] = 50.0
    table.vel[0, 1] = 10.0
    table.last_rx[0, 1] = 0.0
    receivers = np.array([0, 0])
    senders = np.array([1, 2])
    pos, vel, accel, stale, known = predict_pairs(table, receivers, senders, 0.5, max_age=1.0)
    assert list(known) == [True, False]
    assert list(stale) == [False, True]
    assert pos[0] == pytest.approx(55.0)
    _, _, _, stale, _ = predict_pairs(table, receivers, senders, 1.5, max_age=1.0)
    assert stale[0]


def test_predict_pairs_drops_braking_once_stopped():
    table = TrackTable.empty(2)
    table.t[0, 1] = 0.0
    table.vel[0, 1] = 1.0
    table.accel[0, 1] = -5.0
    table.last_rx[0, 1] = 0.0
    _, vel, accel, _, _ = predict_pairs(table, np.array([0]), np.array([1]), 1.0, max_age=1.0)
    assert vel[0] == 0.0
    assert accel[0] == 0.0


def test_forget_clears_sender_column():
    table = TrackTable.empty(3)
    table.t[:, 2] = 1.0
    table.forget(2)
    assert not table.has_track(np.arange(3), np.full(3, 2)).any()
