"""
Simulation, theory and statistics utilities for the Reinforced Walk Lab.

The Streamlit helpers in ui_utils are imported by the dashboard directly so
that the command line never loads streamlit.
"""

from .fenwick import FenwickTree
from .stable import (
    CFEstimate,
    StableParams,
    empirical_cf,
    sample_isotropic_stable,
    sample_positive_stable,
    stable_cf,
)
from .theory import Model, Regime, RegimeReport, regime
from .urn import UrnModel, replacement_rule, sample_positions
from .walk import RademacherSteps, StableSteps, UpdateRule, WalkConfig
from .patree import PATForest, PATree, grow_continuous, grow_discrete, percolate
from .srs import SRSConfig, SRSMethod, simulate_srs
from .stats import MCReport, ToleranceRule
from .replicas import replica_rng, run_replicas

__all__ = [
    # Data structures
    "FenwickTree",
    # Stable laws
    "CFEstimate",
    "StableParams",
    "empirical_cf",
    "sample_isotropic_stable",
    "sample_positive_stable",
    "stable_cf",
    # Theory
    "Model",
    "Regime",
    "RegimeReport",
    "regime",
    # Walks and urns
    "RademacherSteps",
    "StableSteps",
    "UpdateRule",
    "WalkConfig",
    "UrnModel",
    "replacement_rule",
    "sample_positions",
    # Trees and swims
    "PATForest",
    "PATree",
    "grow_continuous",
    "grow_discrete",
    "percolate",
    "SRSConfig",
    "SRSMethod",
    "simulate_srs",
    # Reports and replicas
    "MCReport",
    "ToleranceRule",
    "replica_rng",
    "run_replicas",
]
