"""
Análisis de trayectorias NGSIM
==============================

Ingesta (CSV con cabecera o .txt crudo de 18 columnas separado por
espacios), conversión a unidades métricas, suavizado de medio segundo,
headways por conductor, clasificación, ajuste gamma, percentiles de
aceleración por clase y emisión de la PopulationSpec resultante.
"""
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd

from core.errors import TrajectoryFormatError
from models.driver import BEHAVIOR_ORDER, BehaviorClass
from models.population import GammaFit, PopulationSpec
from models.trajectory import (
    FEET_TO_METERS, FRAME_DT, IMPERIAL_COLUMNS, NGSIM_COLUMNS, NGSIM_RENAME,
    TRAJECTORY_COLUMNS, TrajectoryRecord,
)
from services.population import (
    DEFAULT_THRESHOLDS, class_ratios, classify, fit_gamma, gamma_pdf,
)

logger = logging.getLogger(__name__)

SMOOTH_WINDOW = 0.5
V_MIN = 1.0
N_MIN = 50
PERCENTILES = (70.0, 90.0)
MIN_PERCENTILE_POOL = 100
TRAJECTORY_SUFFIXES = (".csv", ".txt")


# ============================================================================
# INGESTA
# ============================================================================

def _read_raw(path: Path) -> Tuple[pd.DataFrame, int]:
    """Lee el archivo; devuelve el frame y el desplazamiento fila→número de línea"""
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
    if not first.strip():
        raise TrajectoryFormatError(f"archivo vacío: {path}")
    try:
        if "Vehicle_ID" in first:
            return pd.read_csv(path, dtype=str, skipinitialspace=True), 2
        return pd.read_csv(path, sep=r"\s+", header=None, names=NGSIM_COLUMNS, dtype=str), 1
    except pd.errors.ParserError as e:
        match = re.search(r"line (\d+)", str(e))
        row = int(match.group(1)) if match else None
        raise TrajectoryFormatError("número de campos incorrecto", row=row) from e


def _load_file(path: Path) -> pd.DataFrame:
    raw, first_line = _read_raw(path)
    if raw.empty:
        raise TrajectoryFormatError(f"archivo sin registros: {path}")
    missing = [c for c in NGSIM_RENAME if c not in raw.columns]
    if missing:
        raise TrajectoryFormatError(f"faltan columnas: {', '.join(missing)}")

    data = raw[list(NGSIM_RENAME)].rename(columns=NGSIM_RENAME)
    data = data.apply(pd.to_numeric, errors="coerce")
    bad = data.isna().any(axis=1).to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + first_line
        raise TrajectoryFormatError("valor no numérico o ausente", row=row)

    data[IMPERIAL_COLUMNS] = data[IMPERIAL_COLUMNS] * FEET_TO_METERS
    data["vehicle_id"] = data["vehicle_id"].astype(np.int64)
    data["frame"] = data["frame"].astype(np.int64)
    data["preceding_id"] = data["preceding_id"].astype(np.int64)
    data["t"] = data["frame"] * FRAME_DT
    return data[TRAJECTORY_COLUMNS]


def load_trajectories(path: str | Path) -> pd.DataFrame:
    """
    Carga un archivo o un directorio de archivos NGSIM en metros.
    En un directorio los ids de cada archivo se desplazan para no colisionar.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    files = (sorted(p for p in path.iterdir() if p.suffix.lower() in TRAJECTORY_SUFFIXES)
             if path.is_dir() else [path])
    if not files:
        raise TrajectoryFormatError(f"sin archivos de trayectorias en {path}")

    frames = []
    offset = 0
    for file in files:
        data = _load_file(file)
        if offset:
            data["vehicle_id"] += offset
            data.loc[data["preceding_id"] != 0, "preceding_id"] += offset
        offset = int(data["vehicle_id"].max())
        frames.append(data)
        logger.info(f"📂 {file.name}: {len(data)} registros")

    trajectories = pd.concat(frames, ignore_index=True)
    trajectories = trajectories.sort_values(["vehicle_id", "frame"], kind="stable").reset_index(drop=True)
    gaps = trajectories.groupby("vehicle_id")["frame"].diff().dropna()
    if (gaps != 1).any():
        logger.warning(f"⚠️ {int((gaps != 1).sum())} saltos de frame dentro de vehículos")
    return trajectories


def trajectory_records(trajectories: pd.DataFrame) -> Iterator[TrajectoryRecord]:
    """Filas del DataFrame de trayectorias como TrajectoryRecord"""
    for row in trajectories[TRAJECTORY_COLUMNS].itertuples(index=False):
        yield TrajectoryRecord(
            vehicle_id=int(row.vehicle_id), frame=int(row.frame), t=float(row.t),
            pos=float(row.pos), vel=float(row.vel), accel=float(row.accel),
            length=float(row.length), preceding_id=int(row.preceding_id),
        )


# ============================================================================
# SUAVIZADO Y HEADWAYS
# ============================================================================

def smooth(series, window: float = SMOOTH_WINDOW, dt: float = FRAME_DT) -> pd.Series:
    """Media móvil centrada de window/dt muestras (impar); bordes truncados"""
    if window < dt - 1e-12:
        raise ValueError("window debe ser >= dt")
    m = max(1, int(round(window / dt)))
    if m % 2 == 0:
        m += 1
    return pd.Series(series, dtype=float).rolling(m, center=True, min_periods=1).mean()


def smooth_trajectories(trajectories: pd.DataFrame, window: float = SMOOTH_WINDOW) -> pd.DataFrame:
    out = trajectories.copy()
    grouped = out.groupby("vehicle_id", sort=False)
    for column in ("vel", "accel"):
        out[column] = grouped[column].transform(lambda s: smooth(s.to_numpy(), window).to_numpy())
    return out


def per_driver_headways(trajectories: pd.DataFrame, v_min: float = V_MIN,
                        n_min: int = N_MIN) -> Tuple[pd.DataFrame, pd.Series]:
    """
    Headway por frame τ = (x_líder − x − L_líder) / v y su media por
    conductor. Se descartan frames con v ≤ v_min o sin líder en el
    conjunto, y conductores con menos de n_min frames válidos.
    """
    leaders = trajectories[["vehicle_id", "frame", "pos", "length"]].rename(
        columns={"vehicle_id": "preceding_id", "pos": "lead_pos", "length": "lead_length"})
    frames = trajectories[trajectories["preceding_id"] != 0].merge(
        leaders, on=["preceding_id", "frame"], how="inner")
    frames = frames[frames["vel"] > v_min].copy()
    frames["tau"] = (frames["lead_pos"] - frames["pos"] - frames["lead_length"]) / frames["vel"]
    frames = frames[frames["tau"] > 0]

    counts = frames.groupby("vehicle_id")["tau"].transform("size")
    frames = frames[counts >= n_min]
    means = frames.groupby("vehicle_id")["tau"].mean()
    logger.info(f"📏 Headways válidos de {len(means)} conductores")
    return frames.reset_index(drop=True), means


def classify_drivers(means: pd.Series, thresholds=DEFAULT_THRESHOLDS) -> pd.Series:
    return means.map(lambda tau: classify(tau, thresholds).value)


# ============================================================================
# PERCENTILES DE ACELERACIÓN
# ============================================================================

def _percentile_range(values: np.ndarray) -> Tuple[float, float]:
    if len(values) == 0:
        return 0.0, 0.0
    low, high = np.percentile(values, PERCENTILES, method="linear")
    return float(low), float(high)


def accel_percentiles(accel_by_class: Dict[BehaviorClass, np.ndarray]) -> Dict[BehaviorClass, Dict[str, Tuple[float, float]]]:
    """Rangos [p70, p90] de aceleraciones positivas y de |deceleraciones| por clase"""
    ranges = {}
    for behavior in BEHAVIOR_ORDER:
        accel = np.asarray(accel_by_class.get(behavior, np.empty(0)), dtype=float)
        positive = accel[accel > 0]
        negative = np.abs(accel[accel < 0])
        for name, pool in (("accel", positive), ("decel", negative)):
            if len(pool) < MIN_PERCENTILE_POOL:
                logger.warning(f"⚠️ {behavior.value}/{name}: sólo {len(pool)} muestras")
        ranges[behavior] = {"accel": _percentile_range(positive), "decel": _percentile_range(negative)}
    return ranges


def accel_by_class(trajectories: pd.DataFrame, classes: pd.Series) -> Dict[BehaviorClass, np.ndarray]:
    labelled = trajectories.merge(classes.rename("behavior"), left_on="vehicle_id", right_index=True)
    return {
        behavior: labelled.loc[labelled["behavior"] == behavior.value, "accel"].to_numpy()
        for behavior in BEHAVIOR_ORDER
    }


# ============================================================================
# PIPELINE
# ============================================================================

@dataclass
class AnalysisResult:
    trajectories: pd.DataFrame
    headways: pd.DataFrame
    means: pd.Series
    classes: pd.Series
    fit: GammaFit
    ratios: Tuple[float, float, float]
    ranges: Dict[BehaviorClass, Dict[str, Tuple[float, float]]]
    spec: PopulationSpec
    accel: Dict[BehaviorClass, np.ndarray] = field(default_factory=dict)


def build_population_spec(fit: GammaFit, ratios, ranges, thresholds=DEFAULT_THRESHOLDS) -> PopulationSpec:
    return PopulationSpec(
        gamma_shape=fit.shape,
        gamma_scale=fit.scale,
        thresholds=tuple(thresholds),
        class_ratios=dict(zip(BEHAVIOR_ORDER, ratios)),
        accel_range={b: ranges[b]["accel"] for b in BEHAVIOR_ORDER},
        decel_range={b: ranges[b]["decel"] for b in BEHAVIOR_ORDER},
    )


def analyze_dataset(path: str | Path, pooled: bool = False,
                    thresholds=DEFAULT_THRESHOLDS) -> AnalysisResult:
    """load → smooth → headways → classify → fit → ratios → percentiles"""
    trajectories = smooth_trajectories(load_trajectories(path))
    headways, means = per_driver_headways(trajectories)
    if means.empty:
        raise TrajectoryFormatError("ningún conductor con headways válidos")
    classes = classify_drivers(means, thresholds)
    samples = headways["tau"].to_numpy() if pooled else means.to_numpy()
    fit = fit_gamma(samples)
    ratios = class_ratios(fit.shape, fit.scale, thresholds)
    accel = accel_by_class(trajectories, classes)
    ranges = accel_percentiles(accel)
    spec = build_population_spec(fit, ratios, ranges, thresholds)
    logger.info(f"✅ Ajuste gamma: forma={fit.shape:.3f} escala={fit.scale:.3f}")
    return AnalysisResult(trajectories=trajectories, headways=headways, means=means,
                          classes=classes, fit=fit, ratios=ratios, ranges=ranges,
                          spec=spec, accel=accel)


# ============================================================================
# EXPORTACIÓN DE FIGURAS
# ============================================================================

def mean_headway_pdf(means: pd.Series, fit: GammaFit, bin_width: float = 0.1,
                     max_headway: Optional[float] = None) -> pd.DataFrame:
    """Histograma (densidad) de headways medios con la PDF gamma ajustada"""
    top = max_headway or max(float(np.ceil(means.max())), bin_width)
    edges = np.arange(0.0, top + bin_width / 2, bin_width)
    density, edges = np.histogram(means.to_numpy(), bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return pd.DataFrame({
        "bin_left": edges[:-1], "bin_right": edges[1:], "density": density,
        "gamma_pdf": gamma_pdf(centers, fit.shape, fit.scale),
    })


def acceleration_ecdf(accel: Dict[BehaviorClass, np.ndarray]) -> pd.DataFrame:
    """ECDF por clase de aceleraciones y de |deceleraciones|"""
    rows: List[pd.DataFrame] = []
    for behavior in BEHAVIOR_ORDER:
        values = np.asarray(accel.get(behavior, np.empty(0)), dtype=float)
        for kind, pool in (("accel", values[values > 0]), ("decel", np.abs(values[values < 0]))):
            if not len(pool):
                continue
            ordered = np.sort(pool)
            rows.append(pd.DataFrame({
                "class": behavior.value, "kind": kind, "value": ordered,
                "ecdf": np.arange(1, len(ordered) + 1) / len(ordered),
            }))
    if not rows:
        return pd.DataFrame(columns=["class", "kind", "value", "ecdf"])
    return pd.concat(rows, ignore_index=True)
