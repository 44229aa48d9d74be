import numpy as np
import pytest

from models.vehicle import VehicleParams, VehicleState
from services.mobility import gap_to_leader, integrate, leaders, pedal_to_accel, ring_order


@pytest.fixture
def params():
    return VehicleParams()


def test_neutral_pedal(params):
    assert pedal_to_accel(params, 0.0, 10.0, 0.0, 0.01) == 0.0


def test_full_brake_without_lag():
    p = VehicleParams(actuator_tau=0.0)
    assert pedal_to_accel(p, -1.0, 10.0, 0.0, 0.01) == pytest.approx(-8.0)


def test_first_order_lag(params):
    assert pedal_to_accel(params, 0.5, 10.0, 0.0, params.actuator_tau) == pytest.approx(1.5)
    assert pedal_to_accel(params, 0.5, 10.0, 0.0, 0.01) == pytest.approx(1.5 * 0.01 / 0.2)


def test_no_braking_at_standstill(params):
    assert pedal_to_accel(VehicleParams(actuator_tau=0.0), -1.0, 0.0, 0.0, 0.01) == 0.0


def test_wraps_around_ring():
    s = integrate(VehicleState.single(pos=1999.95, vel=10.0), 0.0, 0.01, 2000.0)
    assert s.pos[0] == pytest.approx(0.05)
    assert 0 <= s.pos[0] < 2000.0


def test_velocity_clamped_at_zero():
    s = integrate(VehicleState.single(pos=10.0, vel=0.05), -8.0, 0.01, 2000.0)
    assert s.vel[0] == 0.0
    assert s.accel[0] == pytest.approx(-5.0)
    assert s.pos[0] == 10.0


def test_uniform_motion():
    s = integrate(VehicleState.single(pos=5.0, vel=12.0), 0.0, 0.01, 2000.0)
    assert s.pos[0] == pytest.approx(5.12)
    assert s.accel[0] == 0.0


def test_euler_error_is_first_order():
    """Con u constante y sin retardo, el error respecto a la cinemática exacta es O(dt)"""
    def error(dt):
        s = VehicleState.single(pos=0.0, vel=5.0)
        for _ in range(int(round(2.0 / dt))):
            s = integrate(s, 1.5, dt, 1e6)
        return abs(s.pos[0] - (5.0 * 2.0 + 0.5 * 1.5 * 4.0))

    ratio = error(0.01) / error(0.005)
    assert ratio == pytest.approx(2.0, rel=0.05)


@pytest.mark.parametrize("host,leader,length,L,expected", [
    (100.0, 152.0, 4.5, 2000.0, 47.5),
    (1990.0, 10.0, 5.0, 2000.0, 15.0),
    (100.0, 104.5, 4.5, 2000.0, 0.0),
])
def test_gap_to_leader(host, leader, length, L, expected):
    assert gap_to_leader(host, leader, length, L) == pytest.approx(expected)


def test_leaders_follow_ring_order():
    pos = np.array([50.0, 10.0, 1500.0, 700.0])
    lead = leaders(pos)
    assert list(lead) == [3, 0, 1, 2]
    assert list(ring_order(pos)) == [1, 0, 3, 2]


def test_leaders_skip_inactive_and_single_vehicle():
    pos = np.array([50.0, 10.0, 1500.0])
    lead = leaders(pos, np.array([True, False, True]))
    assert list(lead) == [2, -1, 0]
    assert list(leaders(pos, np.array([True, False, False]))) == [-1, -1, -1]


def test_gaps_plus_lengths_cover_ring():
    rng = np.random.default_rng(5)
    L = 2000.0
    pos = np.sort(rng.uniform(0, L, 30))
    lead = leaders(pos)
    gaps = gap_to_leader(pos, pos[lead], 4.5, L)
    assert gaps.sum() + 30 * 4.5 == pytest.approx(L)
