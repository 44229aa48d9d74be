"""
Comando simulate: réplicas por semilla y algoritmo, logs e informe agregado
"""
import logging
from pathlib import Path
from typing import Optional

import typer

from core.config import settings
from core.errors import ConfigurationError
from core.event_log import event_log_name, write_event_log
from services.engine import replicate
from services.metrics import fault_share_lines, render_table, write_report

from .common import console, fail, load_scenario, parse_algorithms, parse_seeds

logger = logging.getLogger(__name__)

router = typer.Typer()


@router.command("simulate")
def simulate(
    config: Optional[Path] = typer.Option(None, "--config", help="Escenario JSON"),
    seeds: Optional[str] = typer.Option(None, "--seeds", help="Lista '1,2,3' o número de semillas"),
    out: Path = typer.Option(Path(settings.OUTPUT_DIR), "--out", help="Directorio de resultados"),
    algorithms: Optional[str] = typer.Option(
        None, "--algorithms", help="Algoritmos FCW separados por comas (por defecto el del escenario)"),
):
    """Ejecuta el escenario para cada semilla y escribe logs, informe, tabla y CSV"""
    cfg = load_scenario(config)
    seed_list = parse_seeds(seeds, cfg.seed)
    kinds = parse_algorithms(algorithms)

    try:
        outputs, report, summary = replicate(cfg, seed_list, kinds)
    except ConfigurationError as e:
        raise fail(str(e))
    out.mkdir(parents=True, exist_ok=True)
    for output in outputs:
        write_event_log(out / event_log_name(output.seed, output.algorithm), output.records)
    write_report(report, out, summary)

    console.print(render_table(report))
    for line in fault_share_lines(report):
        console.print(f"   {line}")
    console.print(f"✅ {len(outputs)} ejecuciones escritas en {out}")
