"""
VSafe - Inicialización de Datos
===============================

Escribe los datos incluidos en el repositorio (escenarios y población de
referencia) cuando no existen. Nunca sobrescribe un archivo presente.
"""

import json
import logging
import os
from pathlib import Path
from typing import Dict, Optional

from core.config import settings
from models.driver import BehaviorClass, DriverModelConfig
from models.population import PopulationSpec
from models.scenario import ScenarioConfig

logger = logging.getLogger(__name__)


def _write_if_absent(path: Path, payload: Dict) -> bool:
    if path.exists():
        logger.info(f"✅ Ya existe {path}")
        return False
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    logger.info(f"✅ {path} creado")
    return True


def reference_scenario() -> ScenarioConfig:
    """Anillo de 2 km con 150 conductores, PER 30 % y sin FCW"""
    return ScenarioConfig(
        duration=900.0,
        n_vehicles=150,
        track_length=2000.0,
        class_counts={
            BehaviorClass.AGGRESSIVE: 27,
            BehaviorClass.NORMAL: 66,
            BehaviorClass.CONSERVATIVE: 57,
        },
        driver=DriverModelConfig(s0=0.5),
    )


def smoke_scenario() -> ScenarioConfig:
    """Escenario corto para comprobaciones rápidas"""
    return ScenarioConfig(duration=60.0, warmup=10.0, n_vehicles=20, track_length=400.0,
                          driver=DriverModelConfig(s0=0.5))


def scenario_payload(cfg: ScenarioConfig, population_file: Optional[str]) -> Dict:
    """JSON del escenario con sólo los campos fijados explícitamente"""
    data = cfg.model_dump(mode="json", exclude_unset=True, exclude={"population_file"})
    if population_file:
        data.pop("population", None)
        data["population_file"] = population_file
    return data


def init_population(population_path: Path) -> bool:
    return _write_if_absent(population_path,
                            PopulationSpec.i80_reference().model_dump(mode="json"))


def init_scenarios(scenarios_dir: Path, population_path: Path) -> int:
    population_ref = Path(os.path.relpath(population_path, scenarios_dir)).as_posix()
    created = 0
    for name, cfg in (("reference.json", reference_scenario()), ("smoke.json", smoke_scenario())):
        created += _write_if_absent(scenarios_dir / name, scenario_payload(cfg, population_ref))
    return created


def init_data(root: str | Path = ".") -> None:
    """Función principal de inicialización"""
    root = Path(root)
    logger.info("🚀 Inicializando datos de VSafe...")
    try:
        population_path = root / settings.DEFAULT_POPULATION
        init_population(population_path)
        init_scenarios(root / settings.SCENARIOS_DIR, population_path)
        for directory in (settings.DATA_DIR, settings.OUTPUT_DIR, settings.LOGS_DIR):
            (root / directory).mkdir(parents=True, exist_ok=True)
        logger.info("🎉 Inicialización de datos completada")
    except OSError as e:
        logger.error(f"❌ Error durante la inicialización: {e}")
        raise


if __name__ == "__main__":
    init_data()
