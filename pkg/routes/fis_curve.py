"""
Comando fis-curve: curva de transferencia del FIS en CSV
"""
from pathlib import Path
from typing import Optional

import typer

from core.errors import ConfigurationError
from models.driver import BehaviorClass
from services.fuzzy import fis_curve_frame

from .common import console, fail, load_scenario

router = typer.Typer()


@router.command("fis-curve")
def fis_curve(
    config: Optional[Path] = typer.Option(None, "--config", help="Escenario JSON"),
    out: Path = typer.Option(Path("output/fis_curve.csv"), "--out", help="CSV de salida"),
    points: int = typer.Option(201, "--points", min=2, help="Puntos del barrido en [-1, 1]"),
    behavior: Optional[BehaviorClass] = typer.Option(
        None, "--class", help="Clase con FIS propio (por defecto el FIS común)"),
):
    """Exporta Δp en función de Δa normalizado"""
    cfg = load_scenario(config)
    fis = cfg.driver.fis_for(behavior) if behavior else cfg.driver.fis
    try:
        frame = fis_curve_frame(fis, points)
    except ConfigurationError as e:
        raise fail(str(e))
    out.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(out, index=False)
    console.print(f"✅ Curva FIS ({points} puntos) escrita en {out}")
