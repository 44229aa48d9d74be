"""
Modelo de trayectorias NGSIM
============================

Las trayectorias se manejan como DataFrame de pandas con las columnas de
TRAJECTORY_COLUMNS (unidades métricas). TrajectoryRecord es la vista de
una fila (services.ngsim_analysis.trajectory_records).
"""
from dataclasses import dataclass
from typing import Dict, List

FEET_TO_METERS = 0.3048
FRAME_DT = 0.1

# Orden de columnas de la publicación NGSIM (CSV con cabecera o .txt sin ella)
NGSIM_COLUMNS: List[str] = [
    "Vehicle_ID", "Frame_ID", "Total_Frames", "Global_Time",
    "Local_X", "Local_Y", "Global_X", "Global_Y",
    "v_Length", "v_Width", "v_Class", "v_Vel", "v_Acc",
    "Lane_ID", "Preceding", "Following", "Space_Headway", "Time_Headway",
]

# Columnas NGSIM requeridas → nombre interno
NGSIM_RENAME: Dict[str, str] = {
    "Vehicle_ID": "vehicle_id",
    "Frame_ID": "frame",
    "Local_Y": "pos",
    "v_Vel": "vel",
    "v_Acc": "accel",
    "v_Length": "length",
    "Preceding": "preceding_id",
}

# Columnas en pies que se convierten a metros
IMPERIAL_COLUMNS: List[str] = ["pos", "vel", "accel", "length"]

TRAJECTORY_COLUMNS: List[str] = [
    "vehicle_id", "frame", "t", "pos", "vel", "accel", "length", "preceding_id",
]


@dataclass(frozen=True)
class TrajectoryRecord:
    vehicle_id: int
    frame: int
    t: float
    pos: float
    vel: float
    accel: float
    length: float
    preceding_id: int = 0

    @property
    def has_leader(self) -> bool:
        return self.preceding_id != 0
