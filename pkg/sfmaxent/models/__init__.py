"""Data models package."""
from sfmaxent.models.ensemble import (BoundsConfig, ExchangeConfig, SimConfig, SimMode,
                                      StepDiagnostics, WalkerEnsemble)
from sfmaxent.models.equilibrium import ConstraintSet, EquilibriumModel, ModelFamily, MultiplierSolution
from sfmaxent.models.manifest import RunManifest
from sfmaxent.models.series import ColumnSchema, Place, SnapshotSeries
from sfmaxent.models.stats import GrowthRecord, Histogram, LineFit, RankSize
from sfmaxent.models.transform import TransformKind, TransformSpec

__all__ = [
    'BoundsConfig', 'ExchangeConfig', 'SimConfig', 'SimMode', 'StepDiagnostics', 'WalkerEnsemble',
    'ConstraintSet', 'EquilibriumModel', 'ModelFamily', 'MultiplierSolution',
    'RunManifest', 'ColumnSchema', 'Place', 'SnapshotSeries',
    'GrowthRecord', 'Histogram', 'LineFit', 'RankSize',
    'TransformKind', 'TransformSpec',
]
