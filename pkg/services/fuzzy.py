"""
Sistema de inferencia difusa (Mamdani) del pedal
================================================

Una entrada (error de aceleración normalizado, en [-1, 1]) y una salida
(delta de pedal normalizado). Fuzzificación triangular, disparo por mínimo,
agregación por máximo y defuzzificación por centroide con scikit-fuzzy.

La salida se agrega sobre un universo que cubre el soporte completo de sus
funciones de pertenencia y el centroide se recorta a [-1, 1] después.

El motor no llama a `fis_evaluate` en cada paso: usa la curva compilada
(`compile_fis`), una tabla de la misma función interpolada con np.interp.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import pandas as pd
import skfuzzy as fuzz

from core.errors import ConfigurationError
from models.driver import FisConfig

logger = logging.getLogger(__name__)

UNIVERSE = np.linspace(-1.0, 1.0, 2001)
UNIVERSE_STEP = 1e-3
CURVE_POINTS = 801


def _output_universe(cfg: FisConfig) -> np.ndarray:
    lo = min(-1.0, min(mf.vertices[0] for mf in cfg.output_mfs))
    hi = max(1.0, max(mf.vertices[2] for mf in cfg.output_mfs))
    return np.linspace(lo, hi, int(round((hi - lo) / UNIVERSE_STEP)) + 1)


@lru_cache(maxsize=64)
def _mf_table(cfg: FisConfig):
    out_universe = _output_universe(cfg)
    inputs = {mf.label: fuzz.trimf(UNIVERSE, list(mf.vertices)) for mf in cfg.input_mfs}
    outputs = {mf.label: fuzz.trimf(out_universe, list(mf.vertices)) for mf in cfg.output_mfs}
    return inputs, outputs, out_universe


def fis_evaluate(cfg: FisConfig, da_norm: float) -> float:
    """Evaluación Mamdani exacta sobre el universo discretizado"""
    x = float(np.clip(da_norm, -1.0, 1.0))
    inputs, outputs, out_universe = _mf_table(cfg)
    aggregated = np.zeros_like(out_universe)
    for in_label, out_label in cfg.rules:
        firing = fuzz.interp_membership(UNIVERSE, inputs[in_label], x)
        if firing > 0:
            aggregated = np.fmax(aggregated, np.fmin(firing, outputs[out_label]))
    if not np.any(aggregated > 0):
        raise ConfigurationError(f"agregado FIS de área nula en da_norm={x}")
    return float(np.clip(fuzz.defuzz(out_universe, aggregated, "centroid"), -1.0, 1.0))


@dataclass(frozen=True)
class FisCurve:
    """Tabla (da_norm → delta de pedal) de un FIS"""
    x: np.ndarray
    y: np.ndarray

    def __call__(self, da_norm):
        return np.interp(np.clip(da_norm, -1.0, 1.0), self.x, self.y)


@lru_cache(maxsize=64)
def compile_fis(cfg: FisConfig, points: int = CURVE_POINTS) -> FisCurve:
    """Compila el FIS; falla aquí (al cargar) si algún punto da área nula"""
    xs = np.linspace(-1.0, 1.0, points)
    ys = np.array([fis_evaluate(cfg, x) for x in xs])
    if cfg.is_symmetric:
        ys = 0.5 * (ys - ys[::-1])
    logger.debug(f"🧮 FIS compilado con {points} puntos")
    return FisCurve(x=xs, y=ys)


def fis_curve_frame(cfg: FisConfig, points: int = 201) -> pd.DataFrame:
    """Pares (da_norm, dp) para dibujar la curva de salida del FIS"""
    xs = np.linspace(-1.0, 1.0, points)
    return pd.DataFrame({"da_norm": xs, "dp": [fis_evaluate(cfg, x) for x in xs]})
