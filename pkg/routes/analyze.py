"""
Comando analyze: trayectorias NGSIM → PopulationSpec
"""
import logging
from pathlib import Path
from typing import Optional

import typer
from rich.table import Table

from core.errors import TrajectoryFormatError
from models.driver import BEHAVIOR_ORDER
from services.ngsim_analysis import acceleration_ecdf, analyze_dataset, mean_headway_pdf
from services.population import emit_population_spec

from .common import EXIT_USAGE, console, fail

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("analyze")
def analyze(
    input_path: Path = typer.Option(..., "--input", help="Archivo o directorio de trayectorias NGSIM"),
    out: Path = typer.Option(Path("output/population.json"), "--out", help="PopulationSpec de salida"),
    pooled: bool = typer.Option(False, "--pooled", help="Ajustar la gamma sobre todos los headways"),
    figures: Optional[Path] = typer.Option(None, "--figures", help="Directorio para los CSV de figuras"),
):
    """Analiza el dataset y escribe la especificación de población"""
    if not input_path.exists():
        raise fail(f"no existe {input_path}")
    try:
        result = analyze_dataset(input_path, pooled=pooled)
    except (TrajectoryFormatError, ValueError, OSError) as e:
        raise fail(f"{input_path}: {e}", EXIT_USAGE)

    emit_population_spec(result.spec, out)
    if figures is not None:
        figures.mkdir(parents=True, exist_ok=True)
        mean_headway_pdf(result.means, result.fit).to_csv(figures / "mean_headway_pdf.csv", index=False)
        acceleration_ecdf(result.accel).to_csv(figures / "acceleration_ecdf.csv", index=False)

    console.print(f"📈 Gamma: forma={result.fit.shape:.3f} escala={result.fit.scale:.3f} "
                  f"moda={result.fit.mode:.2f} s ({result.fit.n_samples} muestras)")
    table = Table(title="Clases de conductor")
    table.add_column("Clase")
    table.add_column("Proporción", justify="right")
    table.add_column("Conductores", justify="right")
    table.add_column("Aceleración (m/s²)", justify="right")
    table.add_column("Deceleración (m/s²)", justify="right")
    counts = result.classes.value_counts()
    for behavior, ratio in zip(BEHAVIOR_ORDER, result.ratios):
        ranges = result.ranges[behavior]
        table.add_row(
            behavior.value, f"{ratio:.2f}", str(int(counts.get(behavior.value, 0))),
            "{:.2f} – {:.2f}".format(*ranges["accel"]),
            "{:.2f} – {:.2f}".format(*ranges["decel"]),
        )
    console.print(table)
    console.print(f"💾 {out}")
