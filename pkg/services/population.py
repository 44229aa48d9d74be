"""
Población de conductores
========================

Clasificación por headway, distribución gamma de headways (forma y
ESCALA), ajuste por máxima verosimilitud, proporciones por clase y muestreo
de perfiles de conductor a partir de una PopulationSpec.
"""
import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import special, stats

from models.driver import (
    BEHAVIOR_ORDER, AttentionType, BehaviorClass, DriverModelConfig, DriverProfile, IdmParams,
)
from models.population import GammaFit, PopulationSpec

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLDS: Tuple[float, float] = (2.0, 3.0)
SHAPE_MAX = 1e4
MIN_FIT_SAMPLES = 30


# ============================================================================
# CLASIFICACIÓN
# ============================================================================

def classify(mean_tau: float, thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> BehaviorClass:
    """τ < 2 agresivo; 2 ≤ τ ≤ 3 normal; τ > 3 conservador"""
    low, high = thresholds
    if mean_tau < low:
        return BehaviorClass.AGGRESSIVE
    if mean_tau <= high:
        return BehaviorClass.NORMAL
    return BehaviorClass.CONSERVATIVE


def class_ratios(shape: float, scale: float,
                 thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> Tuple[float, float, float]:
    """P(τ<2), P(2≤τ≤3), P(τ>3) con la gamma incompleta regularizada"""
    low, high = thresholds
    f_low = float(special.gammainc(shape, low / scale))
    f_high = float(special.gammainc(shape, high / scale))
    return f_low, f_high - f_low, 1.0 - f_high


# ============================================================================
# AJUSTE GAMMA
# ============================================================================

def fit_gamma(samples: Sequence[float], shape_max: float = SHAPE_MAX,
              min_samples: int = MIN_FIT_SAMPLES) -> GammaFit:
    """
    Máxima verosimilitud de (forma, escala).

    Resuelve log k − ψ(k) = log(media) − media(log) con Newton salvaguardado
    partiendo de la aproximación cerrada; la escala es media / k.
    """
    values = np.asarray(samples, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise ValueError("fit_gamma requiere muestras positivas y finitas")
    if len(values) < min_samples:
        raise ValueError(f"fit_gamma requiere al menos {min_samples} muestras ({len(values)})")

    n = len(values)
    mean = math.fsum(values) / n
    mean_log = math.fsum(np.log(values)) / n
    s = math.log(mean) - mean_log
    if s <= 1e-12:
        logger.warning(f"⚠️ Muestras casi constantes: forma acotada a {shape_max}")
        return GammaFit(shape=shape_max, scale=mean / shape_max, n_samples=n, capped=True)

    k = (3.0 - s + math.sqrt((s - 3.0) ** 2 + 24.0 * s)) / (12.0 * s)
    for _ in range(100):
        f = math.log(k) - float(special.digamma(k)) - s
        df = 1.0 / k - float(special.polygamma(1, k))
        step = f / df
        k_new = k - step
        while k_new <= 0:
            step /= 2.0
            k_new = k - step
        if abs(k_new - k) <= 1e-12 * k:
            k = k_new
            break
        k = k_new

    capped = k > shape_max
    if capped:
        logger.warning(f"⚠️ Forma gamma {k:.1f} acotada a {shape_max}")
        k = shape_max
    return GammaFit(shape=k, scale=mean / k, n_samples=n, capped=capped)


def gamma_pdf(x, shape: float, scale: float) -> np.ndarray:
    return stats.gamma.pdf(x, shape, scale=scale)


# ============================================================================
# MUESTREO DE PERFILES
# ============================================================================

def build_profile(behavior: BehaviorClass, tau_h: float, alpha: float, beta_c: float,
                  distracted: bool, driver: DriverModelConfig) -> DriverProfile:
    return DriverProfile(
        behavior=behavior,
        attention=AttentionType.DISTRACTED if distracted else AttentionType.CAUTIOUS,
        idm=IdmParams(v0=driver.v0, delta=driver.delta, alpha=alpha, beta_c=beta_c,
                      s0=driver.s0, tau_h=tau_h),
        fis=driver.fis_for(behavior),
        pd=driver.pd,
        reaction_time=driver.reaction_time,
        pedal_switch_time=driver.pedal_switch_time,
        filter_window=driver.filter_window,
        vision_range=driver.vision_range,
    )


def sample_driver_profile(rng: np.random.Generator, spec: PopulationSpec,
                          driver: Optional[DriverModelConfig] = None,
                          p_distracted: float = 0.03) -> DriverProfile:
    """τ_h ~ Gamma(forma, escala), clase por umbrales, α y β_c uniformes en su rango"""
    driver = driver or DriverModelConfig()
    tau = float(rng.gamma(spec.gamma_shape, spec.gamma_scale))
    behavior = classify(tau, spec.thresholds)
    alpha = float(rng.uniform(*spec.accel_range[behavior]))
    beta_c = float(rng.uniform(*spec.decel_range[behavior]))
    distracted = bool(rng.random() < p_distracted)
    return build_profile(behavior, tau, alpha, beta_c, distracted, driver)


def _class_interval(behavior: BehaviorClass, thresholds) -> Tuple[float, float]:
    low, high = thresholds
    if behavior == BehaviorClass.AGGRESSIVE:
        return 0.0, float(np.nextafter(low, 0.0))
    if behavior == BehaviorClass.NORMAL:
        return low, high
    return float(np.nextafter(high, np.inf)), np.inf


def sample_population(rng: np.random.Generator, spec: PopulationSpec, n: int,
                      driver: Optional[DriverModelConfig] = None, p_distracted: float = 0.03,
                      class_counts: Optional[Dict[BehaviorClass, int]] = None) -> List[DriverProfile]:
    """
    Población de n conductores. Con class_counts la composición es exacta:
    el τ_h de cada clase sale de la gamma truncada a su intervalo.
    """
    driver = driver or DriverModelConfig()
    if class_counts is None:
        return [sample_driver_profile(rng, spec, driver, p_distracted) for _ in range(n)]

    if sum(class_counts.values()) != n:
        raise ValueError("class_counts debe sumar n")
    dist = stats.gamma(spec.gamma_shape, scale=spec.gamma_scale)
    drafts: List[Tuple[BehaviorClass, float]] = []
    for behavior in BEHAVIOR_ORDER:
        count = class_counts.get(behavior, 0)
        if not count:
            continue
        lo, hi = _class_interval(behavior, spec.thresholds)
        u = rng.uniform(dist.cdf(lo), dist.cdf(hi), size=count)
        taus = np.clip(dist.ppf(u), max(lo, 1e-6), hi)
        drafts.extend((behavior, float(tau)) for tau in taus)

    profiles = []
    for k in rng.permutation(n):
        behavior, tau = drafts[k]
        alpha = float(rng.uniform(*spec.accel_range[behavior]))
        beta_c = float(rng.uniform(*spec.decel_range[behavior]))
        distracted = bool(rng.random() < p_distracted)
        profiles.append(build_profile(behavior, tau, alpha, beta_c, distracted, driver))
    return profiles


# ============================================================================
# PERSISTENCIA
# ============================================================================

def emit_population_spec(spec: PopulationSpec, path: str | Path) -> Path:
    """Escribe la PopulationSpec como JSON"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(spec.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"💾 PopulationSpec escrita en {path}")
    return path


def load_population_spec(path: str | Path) -> PopulationSpec:
    return PopulationSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))
