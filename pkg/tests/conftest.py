"""
Fixtures compartidas
"""
import numpy as np
import pandas as pd
import pytest

from models.driver import AttentionType, BehaviorClass, DriverModelConfig, DriverProfile, IdmParams
from models.population import PopulationSpec
from models.scenario import ScenarioConfig
from models.trajectory import FEET_TO_METERS, NGSIM_COLUMNS


@pytest.fixture
def idm_params():
    return IdmParams(v0=30.0, delta=4.0, alpha=2.0, beta_c=2.0, s0=2.0, tau_h=1.5)


@pytest.fixture
def profile(idm_params):
    return DriverProfile(behavior=BehaviorClass.NORMAL, idm=idm_params)


@pytest.fixture
def distracted_profile(idm_params):
    return DriverProfile(behavior=BehaviorClass.NORMAL, attention=AttentionType.DISTRACTED, idm=idm_params)


@pytest.fixture
def reference_population():
    return PopulationSpec.i80_reference()


@pytest.fixture
def small_scenario():
    """Anillo corto que se simula en pocos segundos"""
    return ScenarioConfig(duration=5.0, warmup=0.0, n_vehicles=8, track_length=200.0,
                          headway_sample_period=1.0, driver=DriverModelConfig(s0=0.5), seed=7)


def ngsim_frame(rows):
    """DataFrame con las 18 columnas NGSIM a partir de dicts en unidades métricas"""
    records = []
    for row in rows:
        record = {column: 0 for column in NGSIM_COLUMNS}
        record.update({
            "Vehicle_ID": row["vehicle_id"],
            "Frame_ID": row["frame"],
            "Local_Y": row["pos"] / FEET_TO_METERS,
            "v_Vel": row["vel"] / FEET_TO_METERS,
            "v_Acc": row.get("accel", 0.0) / FEET_TO_METERS,
            "v_Length": row.get("length", 4.5) / FEET_TO_METERS,
            "Preceding": row.get("preceding_id", 0),
        })
        records.append(record)
    return pd.DataFrame(records, columns=NGSIM_COLUMNS)


def platoon_rows(follower_id, leader_id, tau, frames=60, speed=15.0, length=4.5,
                 accel=0.0, start=0.0, first_frame=1):
    """Pareja líder/seguidor a velocidad constante con headway fijo tau"""
    rows = []
    for k in range(frames):
        lead_pos = start + speed * k * 0.1
        host_pos = lead_pos - length - tau * speed
        rows.append({"vehicle_id": leader_id, "frame": first_frame + k, "pos": lead_pos,
                     "vel": speed, "accel": -accel, "length": length})
        rows.append({"vehicle_id": follower_id, "frame": first_frame + k, "pos": host_pos,
                     "vel": speed, "accel": accel, "length": length, "preceding_id": leader_id})
    return rows


@pytest.fixture
def write_rows(tmp_path):
    def _write(rows, name="rows.csv"):
        path = tmp_path / name
        ngsim_frame(rows).to_csv(path, index=False)
        return path

    return _write


@pytest.fixture
def write_ngsim(tmp_path):
    """Escribe un CSV NGSIM sintético; headways de los seguidores ~ Gamma(9.15, 0.31)"""

    def _write(n_followers=600, frames=55, seed=2024, name="synthetic.csv"):
        rng = np.random.default_rng(seed)
        taus = rng.gamma(9.15, 0.31, size=n_followers)
        rows = []
        for i, tau in enumerate(taus):
            accel = float(rng.uniform(0.5, 3.0))
            rows += platoon_rows(follower_id=2 * i + 2, leader_id=2 * i + 1, tau=float(tau),
                                 frames=frames, accel=accel, start=1000.0 * i)
        path = tmp_path / name
        ngsim_frame(rows).to_csv(path, index=False)
        return path, taus

    return _write
