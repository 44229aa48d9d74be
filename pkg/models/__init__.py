"""
VSafe - Modelos del Sistema
===========================

Tipos de dominio del simulador. Lo que se carga o se escribe en JSON
(configuración de escenario, población, informes) son modelos pydantic;
el estado del bucle caliente son dataclasses de arrays numpy.
El orden de importación sigue las dependencias entre módulos.
"""

# Modelos base (sin dependencias)
from .driver import (
    AttentionType, BehaviorClass, DriverMode, DriverModelConfig, DriverProfile, DriverState,
    FisConfig, IdmParams, MembershipFunction, PdGains, PedalSign, Percept,
)
from .vehicle import VehicleParams, VehicleState
from .network import Broadcast, Bsm, ChannelConfig, Track, TrackTable
from .trajectory import TrajectoryRecord

# Modelos con dependencias (después de los base)
from .safety import CollisionEvent, CrashCause, FcwConfig, FcwKind, WarningClass, WarningEvent
from .population import GammaFit, PopulationSpec
from .scenario import DistractionConfig, ScenarioConfig
from .report import HeadwayHistogram, MetricsReport, ReplicateSummary, RunMeta, WarningCell

__all__ = [
    # Conductor
    'AttentionType', 'BehaviorClass', 'DriverMode', 'DriverModelConfig', 'DriverProfile',
    'DriverState', 'FisConfig', 'IdmParams', 'MembershipFunction', 'PdGains', 'PedalSign',
    'Percept',

    # Vehículo y red
    'VehicleParams', 'VehicleState', 'Broadcast', 'Bsm', 'ChannelConfig', 'Track', 'TrackTable',

    # Trayectorias
    'TrajectoryRecord',

    # Seguridad
    'CollisionEvent', 'CrashCause', 'FcwConfig', 'FcwKind', 'WarningClass', 'WarningEvent',

    # Población y escenario
    'GammaFit', 'PopulationSpec', 'DistractionConfig', 'ScenarioConfig',

    # Informes
    'HeadwayHistogram', 'MetricsReport', 'ReplicateSummary', 'RunMeta', 'WarningCell',
]
