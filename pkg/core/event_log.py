"""
VSafe - Persistencia del Log de Eventos
=======================================

Logs NDJSON (un registro JSON por línea) serializados con orjson y claves
ordenadas, de modo que la misma (configuración, semilla, algoritmo)
produce exactamente los mismos bytes.

Tipos de registro: run, delivery, warning, collision, headway.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional

import orjson

from .errors import DeterminismError

logger = logging.getLogger(__name__)

ORJSON_OPTIONS = orjson.OPT_SORT_KEYS | orjson.OPT_SERIALIZE_NUMPY

RECORD_TYPES = ("run", "delivery", "warning", "collision", "headway")


# ============================================================================
# SERIALIZACIÓN
# ============================================================================

def dumps_record(record: Dict[str, Any]) -> bytes:
    """Serializa un registro como una línea NDJSON"""
    return orjson.dumps(record, option=ORJSON_OPTIONS) + b"\n"


def dumps_records(records: Iterable[Dict[str, Any]]) -> bytes:
    return b"".join(dumps_record(r) for r in records)


def event_log_name(seed: int, algorithm: str) -> str:
    return f"events_seed{seed}_{algorithm}.ndjson"


def write_event_log(path: str | Path, records: Iterable[Dict[str, Any]]) -> Path:
    """Escribe un log completo de una vez"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps_records(records))
    logger.debug(f"📝 Log de eventos escrito: {path}")
    return path


def iter_event_log(path: str | Path) -> Iterator[Dict[str, Any]]:
    with open(path, "rb") as f:
        for line in f:
            line = line.strip()
            if line:
                yield orjson.loads(line)


def read_event_log(path: str | Path) -> List[Dict[str, Any]]:
    return list(iter_event_log(path))


# ============================================================================
# COMPARACIÓN
# ============================================================================

def first_divergence(first: bytes, second: bytes) -> Optional[int]:
    """Índice del primer registro distinto entre dos logs, o None si son idénticos"""
    if first == second:
        return None
    a = first.splitlines()
    b = second.splitlines()
    for index in range(max(len(a), len(b))):
        left = a[index] if index < len(a) else None
        right = b[index] if index < len(b) else None
        if left != right:
            return index
    return None


def assert_identical(first: bytes, second: bytes) -> None:
    """Lanza DeterminismError con el primer registro divergente"""
    index = first_divergence(first, second)
    if index is None:
        return
    a = first.splitlines()
    b = second.splitlines()
    left = orjson.loads(a[index]) if index < len(a) else None
    right = orjson.loads(b[index]) if index < len(b) else None
    raise DeterminismError(index, left, right)
