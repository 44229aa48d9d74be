import numpy as np
import pytest
from pydantic import ValidationError

from models.driver import BEHAVIOR_ORDER, BehaviorClass
from models.population import PopulationSpec
from services.population import (
    class_ratios, classify, emit_population_spec, fit_gamma, load_population_spec,
    sample_population,
)


# ============================================================================
# CLASIFICACIÓN Y PROPORCIONES
# ============================================================================

@pytest.mark.parametrize("tau,expected", [
    (0.4, BehaviorClass.AGGRESSIVE),
    (1.999, BehaviorClass.AGGRESSIVE),
    (2.0, BehaviorClass.NORMAL),
    (2.5, BehaviorClass.NORMAL),
    (3.0, BehaviorClass.NORMAL),
    (3.0001, BehaviorClass.CONSERVATIVE),
])
def test_classify_boundaries(tau, expected):
    assert classify(tau) == expected


def test_reference_ratios(reference_population):
    ratios = class_ratios(reference_population.gamma_shape, reference_population.gamma_scale)
    assert sum(ratios) == pytest.approx(1.0)
    for got, want in zip(ratios, (0.19, 0.43, 0.38)):
        assert got == pytest.approx(want, abs=0.03)


def test_reference_mode(reference_population):
    assert reference_population.mode == pytest.approx(2.53, abs=0.05)


def test_degenerate_thresholds_put_everyone_in_normal(reference_population):
    ratios = class_ratios(reference_population.gamma_shape, reference_population.gamma_scale, (0.0, np.inf))
    assert ratios == pytest.approx((0.0, 1.0, 0.0))


def test_empirical_ratios_match_analytic(reference_population):
    rng = np.random.default_rng(8)
    taus = rng.gamma(reference_population.gamma_shape, reference_population.gamma_scale, size=100_000)
    empirical = (np.mean(taus < 2.0), np.mean((taus >= 2.0) & (taus <= 3.0)), np.mean(taus > 3.0))
    for got, want in zip(empirical, class_ratios(reference_population.gamma_shape, reference_population.gamma_scale)):
        assert got == pytest.approx(want, abs=0.01)


# ============================================================================
# AJUSTE GAMMA
# ============================================================================

@pytest.mark.parametrize("seed", range(20))
def test_fit_recovers_parameters(seed):
    samples = np.random.default_rng(seed).gamma(9.15, 0.31, size=10_000)
    fit = fit_gamma(samples)
    assert fit.shape == pytest.approx(9.15, rel=0.05)
    assert fit.scale == pytest.approx(0.31, rel=0.05)
    assert not fit.capped
    assert fit.n_samples == 10_000


def test_exponential_samples_fit_shape_one():
    samples = np.random.default_rng(4).exponential(2.0, size=10_000)
    fit = fit_gamma(samples)
    assert fit.shape == pytest.approx(1.0, abs=0.05)
    assert fit.scale == pytest.approx(2.0, rel=0.05)


def test_constant_samples_are_capped():
    fit = fit_gamma([2.5] * 50)
    assert fit.capped
    assert fit.shape == 1e4
    assert fit.shape * fit.scale == pytest.approx(2.5)


@pytest.mark.parametrize("samples", [
    [2.0] * 29,
    [2.0] * 40 + [0.0],
    [2.0] * 40 + [-1.0],
    [2.0] * 40 + [np.nan],
])
def test_invalid_samples_rejected(samples):
    with pytest.raises(ValueError):
        fit_gamma(samples)


# ============================================================================
# MUESTREO DE PERFILES
# ============================================================================

def test_exact_class_counts(reference_population):
    counts = {BehaviorClass.AGGRESSIVE: 27, BehaviorClass.NORMAL: 66, BehaviorClass.CONSERVATIVE: 57}
    profiles = sample_population(np.random.default_rng(1), reference_population, 150, class_counts=counts)
    assert len(profiles) == 150
    for behavior, count in counts.items():
        members = [p for p in profiles if p.behavior == behavior]
        assert len(members) == count
        assert all(classify(p.idm.tau_h) == behavior for p in members)


def test_profiles_respect_class_ranges(reference_population):
    profiles = sample_population(np.random.default_rng(2), reference_population, 300)
    for p in profiles:
        lo, hi = reference_population.accel_range[p.behavior]
        assert lo <= p.idm.alpha <= hi
        lo, hi = reference_population.decel_range[p.behavior]
        assert lo <= p.idm.beta_c <= hi
        assert classify(p.idm.tau_h, reference_population.thresholds) == p.behavior


def test_sampling_is_reproducible(reference_population):
    a = sample_population(np.random.default_rng(3), reference_population, 20)
    b = sample_population(np.random.default_rng(3), reference_population, 20)
    assert a == b


def test_class_counts_must_sum_to_n(reference_population):
    with pytest.raises(ValueError):
        sample_population(np.random.default_rng(0), reference_population, 10,
                          class_counts={b: 3 for b in BEHAVIOR_ORDER})


# ============================================================================
# PERSISTENCIA
# ============================================================================

def test_population_spec_round_trip(reference_population, tmp_path):
    path = emit_population_spec(reference_population, tmp_path / "out" / "population.json")
    assert load_population_spec(path) == reference_population


def test_ratios_must_sum_to_one(reference_population):
    data = reference_population.model_dump()
    data["class_ratios"] = {b: 0.5 for b in BEHAVIOR_ORDER}
    with pytest.raises(ValidationError):
        PopulationSpec.model_validate(data)


def test_inverted_range_rejected(reference_population):
    data = reference_population.model_dump()
    data["accel_range"][BehaviorClass.NORMAL] = (2.0, 1.0)
    with pytest.raises(ValidationError):
        PopulationSpec.model_validate(data)
