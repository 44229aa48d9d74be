"""
Comando report: reconstruye el informe desde logs de eventos ya escritos
"""
import logging
from pathlib import Path
from typing import List

import orjson
import typer

from core.config import settings
from core.event_log import read_event_log
from services.metrics import build_report, merge_reports, render_table, summarize_runs, write_report

from .common import console, fail

logger = logging.getLogger(__name__)

router = typer.Typer()


def collect_logs(paths: List[Path]) -> List[Path]:
    """Expande directorios a sus *.ndjson en orden de nombre"""
    found: List[Path] = []
    for path in paths:
        if path.is_dir():
            found.extend(sorted(path.glob("*.ndjson")))
        elif path.is_file():
            found.append(path)
        else:
            raise fail(f"no existe {path}")
    if not found:
        raise fail("no se encontró ningún log de eventos")
    return found


@router.command("report")
def report(
    logs: List[Path] = typer.Argument(..., help="Logs NDJSON o directorios que los contienen"),
    out: Path = typer.Option(Path(settings.OUTPUT_DIR), "--out", help="Directorio de resultados"),
):
    """Agrega logs de eventos en el informe, la tabla y los CSV de figuras"""
    reports = []
    for path in collect_logs(logs):
        try:
            reports.append(build_report(read_event_log(path)))
        except (orjson.JSONDecodeError, KeyError, ValueError) as e:
            raise fail(f"{path}: log inválido ({e})")
    merged = merge_reports(reports)
    write_report(merged, out, summarize_runs(reports))
    console.print(render_table(merged))
    console.print(f"✅ {len(reports)} logs agregados en {out}")
