import numpy as np
import pandas as pd
import pytest

from conftest import ngsim_frame, platoon_rows
from core.errors import TrajectoryFormatError
from models.driver import BehaviorClass
from models.trajectory import NGSIM_COLUMNS, TRAJECTORY_COLUMNS
from services.population import fit_gamma
from services.ngsim_analysis import (
    accel_percentiles, acceleration_ecdf, analyze_dataset, classify_drivers,
    load_trajectories, mean_headway_pdf, per_driver_headways, smooth, trajectory_records,
)


# ============================================================================
# INGESTA
# ============================================================================

def test_load_converts_to_metric(write_rows):
    path = write_rows([{"vehicle_id": 1, "frame": 10, "pos": 30.48, "vel": 3.048,
                        "accel": -0.3048, "length": 4.572}])
    data = load_trajectories(path)
    assert list(data.columns) == TRAJECTORY_COLUMNS
    row = data.iloc[0]
    assert row["pos"] == pytest.approx(30.48)
    assert row["vel"] == pytest.approx(3.048)
    assert row["accel"] == pytest.approx(-0.3048)
    assert row["length"] == pytest.approx(4.572)
    assert row["t"] == pytest.approx(1.0)


def test_load_raw_whitespace_file(tmp_path):
    frame = ngsim_frame([{"vehicle_id": 3, "frame": 1, "pos": 10.0, "vel": 5.0}])
    path = tmp_path / "trajectories.txt"
    frame.to_csv(path, sep=" ", header=False, index=False)
    data = load_trajectories(path)
    assert data["vehicle_id"].tolist() == [3]
    assert data["vel"].iloc[0] == pytest.approx(5.0)


def test_empty_file_rejected(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(TrajectoryFormatError):
        load_trajectories(path)


def test_missing_file_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_trajectories(tmp_path / "nope.csv")


def test_missing_column_rejected(tmp_path):
    frame = ngsim_frame([{"vehicle_id": 1, "frame": 1, "pos": 10.0, "vel": 5.0}])
    path = tmp_path / "partial.csv"
    frame.drop(columns=["v_Vel"]).to_csv(path, index=False)
    with pytest.raises(TrajectoryFormatError, match="v_Vel"):
        load_trajectories(path)


def test_malformed_row_reports_line(tmp_path):
    frame = ngsim_frame([{"vehicle_id": 1, "frame": k, "pos": 10.0 + k, "vel": 5.0}
                         for k in range(1, 4)]).astype(object)
    frame.loc[1, "v_Vel"] = "abc"
    path = tmp_path / "bad.csv"
    frame.to_csv(path, index=False)
    with pytest.raises(TrajectoryFormatError) as excinfo:
        load_trajectories(path)
    assert excinfo.value.row == 3


def test_directory_offsets_vehicle_ids(tmp_path):
    for name in ("a.csv", "b.csv"):
        ngsim_frame(platoon_rows(2, 1, tau=2.0, frames=3)).to_csv(tmp_path / name, index=False)
    data = load_trajectories(tmp_path)
    assert sorted(data["vehicle_id"].unique()) == [1, 2, 3, 4]
    followers = data[data["preceding_id"] != 0]
    assert sorted(followers["preceding_id"].unique()) == [1, 3]


def test_rows_as_trajectory_records(write_rows):
    data = load_trajectories(write_rows(platoon_rows(2, 1, tau=2.0, frames=3, first_frame=5)))
    records = list(trajectory_records(data))
    assert len(records) == 6
    leader, follower = records[0], records[3]
    assert (leader.vehicle_id, leader.frame) == (1, 5)
    assert leader.t == pytest.approx(0.5)
    assert not leader.has_leader
    assert follower.vehicle_id == 2 and follower.preceding_id == 1
    assert follower.has_leader
    assert follower.pos == pytest.approx(-4.5 - 2.0 * 15.0)
    assert follower.vel == pytest.approx(15.0)


# ============================================================================
# SUAVIZADO Y HEADWAYS
# ============================================================================

def test_smooth_examples():
    out = smooth([0, 0, 10, 0, 0, 0, 0], window=0.5)
    assert out.iloc[2] == pytest.approx(2.0)
    assert out.iloc[0] == pytest.approx(10 / 3)
    np.testing.assert_allclose(smooth(np.full(9, 4.0)), 4.0)


def test_smooth_window_below_dt_rejected():
    with pytest.raises(ValueError):
        smooth([1.0, 2.0], window=0.05)


def test_constant_platoon_headway(write_rows):
    path = write_rows(platoon_rows(2, 1, tau=2.5, frames=60))
    headways, means = per_driver_headways(load_trajectories(path))
    assert list(means.index) == [2]
    assert means.loc[2] == pytest.approx(2.5, abs=1e-6)
    assert len(headways) == 60


def test_short_or_slow_drivers_dropped(write_rows):
    rows = platoon_rows(2, 1, tau=2.0, frames=40)
    rows += platoon_rows(4, 3, tau=2.0, frames=60, speed=0.5, start=5000.0)
    rows += platoon_rows(6, 5, tau=1.5, frames=60, start=9000.0)
    _, means = per_driver_headways(load_trajectories(write_rows(rows)))
    assert list(means.index) == [6]


def test_classify_drivers_labels():
    labels = classify_drivers(pd.Series({1: 1.2, 2: 2.5, 3: 4.0}))
    assert labels.tolist() == ["Aggressive", "Normal", "Conservative"]


# ============================================================================
# PERCENTILES
# ============================================================================

def test_percentiles_of_uniform_pool():
    values = np.linspace(0, 10, 1001)
    ranges = accel_percentiles({BehaviorClass.NORMAL: np.concatenate([values, -values])})
    low, high = ranges[BehaviorClass.NORMAL]["accel"]
    assert low == pytest.approx(7.0, abs=0.01)
    assert high == pytest.approx(9.0, abs=0.01)
    assert ranges[BehaviorClass.NORMAL]["decel"] == pytest.approx((low, high))
    assert ranges[BehaviorClass.AGGRESSIVE]["accel"] == (0.0, 0.0)


# ============================================================================
# PIPELINE
# ============================================================================

def test_synthetic_dataset_recovers_population(write_ngsim):
    path, taus = write_ngsim()
    result = analyze_dataset(path)
    assert len(result.means) == len(taus)
    reference = fit_gamma(taus)
    assert result.fit.shape == pytest.approx(reference.shape, rel=1e-3)
    assert result.fit.shape == pytest.approx(9.15, rel=0.2)
    for got, want in zip(result.ratios, (0.19, 0.43, 0.38)):
        assert got == pytest.approx(want, abs=0.06)
    assert result.spec.gamma_scale == pytest.approx(result.fit.scale)
    # aceleraciones positivas de seguidores en U(0.5, 3.0): p70 ≈ 2.25
    low, high = result.ranges[BehaviorClass.NORMAL]["accel"]
    assert low == pytest.approx(2.25, abs=0.2)
    assert high == pytest.approx(2.75, abs=0.2)


def test_pooled_fit_uses_every_frame(write_ngsim):
    path, _ = write_ngsim(n_followers=60)
    result = analyze_dataset(path, pooled=True)
    assert result.fit.n_samples == len(result.headways)


def test_dataset_without_followers_rejected(write_rows):
    rows = [{"vehicle_id": 1, "frame": k, "pos": 1.5 * k, "vel": 15.0} for k in range(60)]
    with pytest.raises(TrajectoryFormatError):
        analyze_dataset(write_rows(rows))


def test_figure_frames(write_ngsim):
    path, _ = write_ngsim(n_followers=100)
    result = analyze_dataset(path)
    pdf = mean_headway_pdf(result.means, result.fit)
    widths = pdf["bin_right"] - pdf["bin_left"]
    assert (pdf["density"] * widths).sum() == pytest.approx(1.0)
    assert (pdf["gamma_pdf"] >= 0).all()

    ecdf = acceleration_ecdf(result.accel)
    assert set(ecdf.columns) == {"class", "kind", "value", "ecdf"}
    for _, group in ecdf.groupby(["class", "kind"]):
        assert group["ecdf"].iloc[-1] == pytest.approx(1.0)
        assert group["value"].is_monotonic_increasing


def test_ngsim_column_order():
    assert len(NGSIM_COLUMNS) == 18
