"""
Utilidades compartidas por los comandos
"""
import logging
from pathlib import Path
from typing import List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console

from core.config import settings
from models.safety import FcwKind
from models.scenario import MAX_SEED, ScenarioConfig

logger = logging.getLogger(__name__)

console = Console()
err_console = Console(stderr=True)

# Códigos de salida
EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_USAGE = 2


def validation_diagnostics(error: ValidationError) -> List[str]:
    """Una línea por error, con la ruta del esquema en notación de puntos"""
    lines = []
    for item in error.errors():
        path = ".".join(str(part) for part in item["loc"]) or "(raíz)"
        lines.append(f"{path}: {item['msg']}")
    return lines


def fail(message: str, code: int = EXIT_USAGE) -> typer.Exit:
    err_console.print(f"❌ {message}")
    return typer.Exit(code=code)


def load_scenario(path: Optional[Path]) -> ScenarioConfig:
    """Carga y valida un escenario; cualquier problema termina con código 2"""
    if path is None:
        path = Path(settings.DEFAULT_SCENARIO)
    if not path.is_file():
        raise fail(f"no existe el escenario {path}")
    try:
        return ScenarioConfig.from_file(path)
    except ValidationError as e:
        for line in validation_diagnostics(e):
            err_console.print(f"❌ {path}: {line}")
        raise typer.Exit(code=EXIT_USAGE)
    except (OSError, ValueError) as e:
        raise fail(f"{path}: {e}")


def parse_seeds(text: Optional[str], base_seed: int) -> List[int]:
    """'1,2,3' es una lista; '5' son 5 semillas consecutivas desde la del escenario"""
    if text is None or not text.strip():
        return [base_seed]
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise fail(f"--seeds inválido: {text!r}")
    if len(values) == 1 and "," not in text:
        count = values[0]
        if count < 1:
            raise fail("--seeds: el número de semillas debe ser >= 1")
        seeds = [base_seed + k for k in range(count)]
    else:
        seeds = values
    if any(s < 0 or s > MAX_SEED for s in seeds):
        raise fail("--seeds: las semillas deben estar en [0, 2^64)")
    return seeds


def parse_algorithms(text: Optional[str]) -> Optional[List[FcwKind]]:
    if text is None or not text.strip():
        return None
    kinds = []
    for name in (p.strip() for p in text.split(",") if p.strip()):
        try:
            kinds.append(FcwKind(name))
        except ValueError:
            valid = ", ".join(k.value for k in FcwKind)
            raise fail(f"--algorithms: '{name}' desconocido (válidos: {valid})")
    return kinds
