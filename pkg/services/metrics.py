"""
Métricas e informes
===================

El informe se construye SIEMPRE a partir de los registros del log de
eventos, tanto tras simular como desde logs ya escritos, así ambos caminos
dan el mismo resultado. La fusión de informes es asociativa e
independiente del orden.
"""
import io
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

import numpy as np
import pandas as pd
from rich.console import Console
from rich.table import Table

from core.event_log import RECORD_TYPES
from models.driver import BEHAVIOR_ORDER
from models.report import (
    CAUSE_ORDER, HeadwayHistogram, MetricsReport, MetricStat, ReplicateSummary, RunMeta,
    WarningCell, empty_collision_table,
)
from models.safety import WarningClass

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
TABLE_FILE = "table.txt"
SUMMARY_FILE = "summary.json"


# ============================================================================
# HISTOGRAMA
# ============================================================================

def headway_bins(values: np.ndarray, hist: HeadwayHistogram) -> np.ndarray:
    """Cuenta por bin; valores fuera del rango van al último bin"""
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values) & (values >= 0)]
    idx = np.minimum((values / hist.bin_width).astype(int), hist.n_bins - 1)
    return np.bincount(idx, minlength=hist.n_bins)


# ============================================================================
# INFORME DESDE REGISTROS
# ============================================================================

def build_report(records: Iterable[Dict]) -> MetricsReport:
    """Agrega los registros de un log (una ejecución) en un MetricsReport"""
    report = MetricsReport()
    hist = report.headway
    counts = np.zeros(hist.n_bins, dtype=np.int64)
    by_class = {b.value: np.zeros(hist.n_bins, dtype=np.int64) for b in BEHAVIOR_ORDER}
    run = None

    for record in records:
        kind = record.get("type")
        if kind not in RECORD_TYPES:
            raise ValueError(f"tipo de registro desconocido: {kind!r}")
        if kind == "run":
            run = RunMeta(**{k: v for k, v in record.items() if k != "type"})
            report.runs.append(run)
            report.collisions.setdefault(run.algorithm, empty_collision_table())
            report.warnings.setdefault(
                run.algorithm, {b.value: WarningCell() for b in BEHAVIOR_ORDER})
            report.ttc_at_warning.setdefault(run.algorithm, [])
            report.headway_at_warning.setdefault(run.algorithm, [])
        elif run is None:
            raise ValueError("el log debe empezar con un registro 'run'")
        elif kind == "delivery":
            run.sent += record["sent"]
            run.delivered += record["delivered"]
        elif kind == "collision":
            report.collisions[record["algorithm"]][record["fault_class"]][record["cause"]] += 1
        elif kind == "warning":
            cell = report.warnings[record["algorithm"]][record["host_class"]]
            cell.total += 1
            if record["classification"] == WarningClass.POSITIVE.value:
                cell.positive += 1
            if record["ttc_at_warning"] is not None:
                report.ttc_at_warning[record["algorithm"]].append(record["ttc_at_warning"])
            if record["headway_at_warning"] is not None:
                report.headway_at_warning[record["algorithm"]].append(record["headway_at_warning"])
        elif kind == "headway":
            values = np.asarray(record["values"], dtype=float)
            classes = np.asarray(record["classes"])
            counts += headway_bins(values, hist)
            for behavior in by_class:
                by_class[behavior] += headway_bins(values[classes == behavior], hist)

    hist.counts = counts.tolist()
    hist.counts_by_class = {k: v.tolist() for k, v in by_class.items()}
    for samples in (report.ttc_at_warning, report.headway_at_warning):
        for algorithm in samples:
            samples[algorithm].sort()
    return report


def merge_reports(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Suma de tablas y unión de muestras; el resultado no depende del orden"""
    merged = MetricsReport()
    hist = merged.headway
    counts = np.zeros(hist.n_bins, dtype=np.int64)
    by_class = {b.value: np.zeros(hist.n_bins, dtype=np.int64) for b in BEHAVIOR_ORDER}
    for report in reports:
        merged.runs.extend(report.runs)
        for algorithm, table in report.collisions.items():
            target = merged.collisions.setdefault(algorithm, empty_collision_table())
            for behavior, causes in table.items():
                for cause, count in causes.items():
                    target[behavior][cause] += count
        for algorithm, cells in report.warnings.items():
            target = merged.warnings.setdefault(
                algorithm, {b.value: WarningCell() for b in BEHAVIOR_ORDER})
            for behavior, cell in cells.items():
                target[behavior].total += cell.total
                target[behavior].positive += cell.positive
        for name in ("ttc_at_warning", "headway_at_warning"):
            for algorithm, values in getattr(report, name).items():
                getattr(merged, name).setdefault(algorithm, []).extend(values)
        counts += np.asarray(report.headway.counts, dtype=np.int64)
        for behavior, values in report.headway.counts_by_class.items():
            by_class[behavior] += np.asarray(values, dtype=np.int64)

    merged.runs.sort(key=lambda r: (r.algorithm, r.seed))
    for name in ("ttc_at_warning", "headway_at_warning"):
        for values in getattr(merged, name).values():
            values.sort()
    hist.counts = counts.tolist()
    hist.counts_by_class = {k: v.tolist() for k, v in by_class.items()}
    return merged


# ============================================================================
# RÉPLICAS
# ============================================================================

def scalar_metrics(report: MetricsReport) -> Dict[str, float]:
    """Métricas escalares de un informe de una ejecución"""
    out: Dict[str, float] = {}
    for algorithm in report.algorithms:
        prefix = f"{algorithm}."
        out[prefix + "collisions.total"] = report.total_collisions(algorithm)
        for behavior, count in report.collisions_by_class(algorithm).items():
            out[prefix + f"collisions.{behavior}"] = count
        for cause, count in report.collisions_by_cause(algorithm).items():
            out[prefix + f"collisions.cause.{cause}"] = count
        totals = report.warning_totals(algorithm)
        out[prefix + "warnings.total"] = totals.total
        out[prefix + "warnings.positive"] = totals.positive
        out[prefix + "warnings.ratio"] = totals.ratio
    if report.runs:
        out["delivery_ratio"] = float(np.mean([r.delivery_ratio for r in report.runs]))
    return out


def summarize_runs(reports: Sequence[MetricsReport]) -> ReplicateSummary:
    """Media y desviación poblacional (ddof=0) de cada métrica entre ejecuciones"""
    seeds = sorted({run.seed for report in reports for run in report.runs})
    per_run = [scalar_metrics(r) for r in reports]
    keys = sorted({k for metrics in per_run for k in metrics})
    summary = ReplicateSummary(seeds=seeds)
    for key in keys:
        values = np.array([m[key] for m in per_run if key in m], dtype=float)
        summary.metrics[key] = MetricStat(mean=float(values.mean()), std=float(values.std(ddof=0)),
                                          n=len(values))
    return summary


# ============================================================================
# SALIDAS
# ============================================================================

def headway_count_density(report: MetricsReport) -> pd.DataFrame:
    hist = report.headway
    edges = np.asarray(hist.bin_edges())
    frame = pd.DataFrame({
        "bin_left": edges[:-1], "bin_right": edges[1:],
        "count": hist.counts,
        "count_density": np.asarray(hist.counts, dtype=float) / hist.bin_width,
    })
    for behavior, counts in hist.counts_by_class.items():
        frame[f"count_density_{behavior}"] = np.asarray(counts, dtype=float) / hist.bin_width
    return frame


def ecdf_frame(samples: Dict[str, List[float]], column: str) -> pd.DataFrame:
    rows = []
    for algorithm in sorted(samples):
        values = np.sort(np.asarray(samples[algorithm], dtype=float))
        if not len(values):
            continue
        rows.append(pd.DataFrame({
            "algorithm": algorithm, column: values,
            "ecdf": np.arange(1, len(values) + 1) / len(values),
        }))
    if not rows:
        return pd.DataFrame(columns=["algorithm", column, "ecdf"])
    return pd.concat(rows, ignore_index=True)


def percentile(samples: Sequence[float], q: float) -> float:
    return float(np.percentile(samples, q)) if len(samples) else float("nan")


def render_table(report: MetricsReport) -> Table:
    """Tabla de choques y alertas: filas = algoritmos, grupos de columnas = clases"""
    table = Table(title="Choques y alertas (media por ejecución)")
    table.add_column("Algoritmo")
    table.add_column("Runs", justify="right")
    for behavior in BEHAVIOR_ORDER:
        table.add_column(f"{behavior.value}\nTotal", justify="right")
        table.add_column(f"{behavior.value}\nDistr.", justify="right")
        table.add_column(f"{behavior.value}\nLHB", justify="right")
        table.add_column(f"{behavior.value}\nAlertas (pos.)", justify="right")
    table.add_column("Total", justify="right")
    table.add_column("Ratio pos.", justify="right")

    for algorithm in report.algorithms:
        runs = max(report.runs_for(algorithm), 1)
        row = [algorithm, str(runs)]
        for behavior in BEHAVIOR_ORDER:
            causes = report.collisions.get(algorithm, {}).get(behavior.value, {})
            cell = report.warnings.get(algorithm, {}).get(behavior.value, WarningCell())
            row += [
                f"{sum(causes.values()) / runs:.1f}",
                f"{causes.get('Distraction', 0) / runs:.1f}",
                f"{causes.get('LeaderHardBraking', 0) / runs:.1f}",
                f"{cell.total / runs:.1f} ({cell.positive / runs:.1f})",
            ]
        totals = report.warning_totals(algorithm)
        row += [f"{report.total_collisions(algorithm) / runs:.1f}", f"{totals.ratio:.2f}"]
        table.add_row(*row)
    return table


def table_text(report: MetricsReport, width: int = 200) -> str:
    console = Console(width=width, record=True, file=io.StringIO())
    console.print(render_table(report))
    return console.export_text()


def write_report(report: MetricsReport, out_dir: str | Path,
                 summary: ReplicateSummary | None = None) -> Path:
    """Escribe report.json, la tabla de texto y los CSV de figuras"""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / REPORT_FILE).write_text(report.model_dump_json(indent=2), encoding="utf-8")
    (out_dir / TABLE_FILE).write_text(table_text(report), encoding="utf-8")
    if summary is not None:
        (out_dir / SUMMARY_FILE).write_text(summary.model_dump_json(indent=2), encoding="utf-8")
    headway_count_density(report).to_csv(out_dir / "headway_count_density.csv", index=False)
    ecdf_frame(report.headway_at_warning, "headway").to_csv(
        out_dir / "headway_at_warning_ecdf.csv", index=False)
    ecdf_frame(report.ttc_at_warning, "ttc").to_csv(out_dir / "ttc_at_warning_ecdf.csv", index=False)
    logger.info(f"📊 Informe escrito en {out_dir}")
    return out_dir


def fault_share_lines(report: MetricsReport) -> List[str]:
    lines = []
    for algorithm in report.algorithms:
        shares = report.fault_shares(algorithm)
        causes = ", ".join(f"{c.value} {shares['cause'][c.value]:.0%}" for c in CAUSE_ORDER)
        lines.append(f"{algorithm}: {causes}")
    return lines
