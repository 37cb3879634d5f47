"""Payment-channel network creation game: costs, equilibria and fee bounds."""
from .model import (GameParams, PaymentScenario, PerNode, StrategyProfile, Uniform,
                    homogeneous_scenario, validate_profile)
from .topology import CLIQUE, PATH, STAR, TWO_STAR, Family, apply_deviation, bipartite, generate

__all__ = [
    "GameParams", "PaymentScenario", "PerNode", "StrategyProfile", "Uniform",
    "homogeneous_scenario", "validate_profile",
    "CLIQUE", "PATH", "STAR", "TWO_STAR", "Family", "apply_deviation", "bipartite", "generate",
]
