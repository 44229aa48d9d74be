"""
Comando validate: misma semilla dos veces, logs idénticos byte a byte
"""
import logging
from pathlib import Path
from typing import Optional

import typer

from core.errors import ConfigurationError, DeterminismError
from core.event_log import assert_identical, dumps_records
from services.engine import run_scenario

from .common import EXIT_ASSERTION, console, err_console, fail, load_scenario

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("validate")
def validate(
    config: Optional[Path] = typer.Option(None, "--config", help="Escenario JSON"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Semilla (por defecto la del escenario)"),
):
    """Ejecuta el escenario dos veces y compara los logs de eventos"""
    cfg = load_scenario(config)
    if seed is not None:
        cfg = cfg.model_copy(update={"seed": seed})

    try:
        _, first = run_scenario(cfg)
        _, second = run_scenario(cfg)
    except ConfigurationError as e:
        raise fail(str(e))
    try:
        assert_identical(dumps_records(first), dumps_records(second))
    except DeterminismError as e:
        err_console.print(f"❌ Ejecuciones distintas en el registro {e.index}")
        err_console.print(f"   1ª: {e.first}")
        err_console.print(f"   2ª: {e.second}")
        raise typer.Exit(code=EXIT_ASSERTION)
    console.print(f"✅ Determinista: {len(first)} registros idénticos (semilla {cfg.seed})")
