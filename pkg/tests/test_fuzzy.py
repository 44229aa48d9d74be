import numpy as np
import pytest
from pydantic import ValidationError

from models.driver import FisConfig, MembershipFunction
from services.fuzzy import compile_fis, fis_curve_frame, fis_evaluate


@pytest.fixture
def fis():
    return FisConfig()


def test_zero_error_gives_zero_pedal(fis):
    assert fis_evaluate(fis, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_full_error_is_centroid_of_clipped_pb(fis):
    # PB de salida completo en [0.6, 1.2]; el centroide se recorta después
    x = np.linspace(-1.2, 1.2, 240001)
    pb = np.clip(np.minimum((x - 0.6) / 0.3, (1.2 - x) / 0.3), 0, 1)
    firing = (1.2 - 1.0) / 0.3  # PB de entrada en x = 1
    clipped = np.minimum(pb, firing)
    expected = float((x * clipped).sum() / clipped.sum())
    assert expected == pytest.approx(0.9, abs=1e-6)
    assert fis_evaluate(fis, 1.0) == pytest.approx(expected, abs=1e-3)


def test_edges_do_not_pull_back_towards_zero(fis):
    assert fis_evaluate(fis, 0.9) <= fis_evaluate(fis, 1.0) + 1e-9
    assert fis_evaluate(fis, -0.9) >= fis_evaluate(fis, -1.0) - 1e-9


def test_odd_symmetry(fis):
    for x in np.linspace(0, 1, 21):
        assert fis_evaluate(fis, -x) == pytest.approx(-fis_evaluate(fis, x), abs=1e-9)


def test_bounded_and_monotone_sweep(fis):
    xs = np.linspace(-1, 1, 1000)
    ys = np.array([fis_evaluate(fis, x) for x in xs])
    assert np.all(np.abs(ys) <= 1.0)
    assert np.all(np.diff(ys) >= -1e-9)


def test_input_is_clamped(fis):
    assert fis_evaluate(fis, 5.0) == pytest.approx(fis_evaluate(fis, 1.0))


def test_compiled_curve_is_exactly_odd(fis):
    curve = compile_fis(fis)
    xs = np.linspace(0, 1, 101)
    assert curve(0.0) == 0.0
    np.testing.assert_allclose(curve(-xs), -curve(xs), atol=1e-15)
    np.testing.assert_allclose(curve(xs), [fis_evaluate(fis, x) for x in xs], atol=2e-3)


def test_compiled_curve_is_monotone(fis):
    curve = compile_fis(fis)
    assert np.all(np.diff(curve.y) >= -1e-9)
    assert np.all(np.abs(curve.y) <= 1.0)
    assert curve(1.0) == pytest.approx(0.9, abs=1e-3)


def test_membership_is_triangular():
    mf = MembershipFunction(label="PS", center=0.25, left=0.3, right=0.3)
    np.testing.assert_allclose(mf.membership([-0.05, 0.1, 0.25, 0.4, 0.55]),
                               [0.0, 0.5, 1.0, 0.5, 0.0], atol=1e-12)
    shoulder = MembershipFunction(label="PB", center=1.0, left=0.4, right=0.0)
    np.testing.assert_allclose(shoulder.membership([0.5, 0.8, 1.0]), [0.0, 0.5, 1.0], atol=1e-12)


def test_steeper_output_mfs_give_larger_pedal():
    soft = FisConfig.symmetric()
    steep = FisConfig.symmetric(output_half_width=0.1)
    # dos reglas disparadas: PS con 2/3 y PM con 1/3
    assert fis_evaluate(steep, 0.35) == pytest.approx(0.3654, abs=2e-3)
    assert fis_evaluate(steep, 0.35) != pytest.approx(fis_evaluate(soft, 0.35), abs=1e-3)


def test_degenerate_output_mf_rejected_at_load():
    fis = FisConfig()
    outputs = list(fis.output_mfs)
    outputs[-1] = MembershipFunction(label="PB", center=1.3, left=0.1, right=0.1)
    with pytest.raises(ValidationError):
        FisConfig(input_mfs=fis.input_mfs, output_mfs=tuple(outputs))


def test_unsorted_centers_rejected():
    fis = FisConfig()
    inputs = list(fis.input_mfs)
    inputs[4] = MembershipFunction(label="PS", center=-0.1, left=0.3, right=0.3)
    with pytest.raises(ValidationError):
        FisConfig(input_mfs=tuple(inputs))


def test_curve_frame_columns(fis):
    frame = fis_curve_frame(fis, points=11)
    assert list(frame.columns) == ["da_norm", "dp"]
    assert len(frame) == 11
    assert frame["dp"].iloc[5] == pytest.approx(0.0, abs=1e-12)
