"""Adaptive PSO tuning of Sugeno fuzzy inference systems."""

__version__ = "0.1.0"

from .anfis import TrainConfig, TrainTrace, lse_consequents, premise_gradients, train
from .anpso import MetaConfig, MetaTrace, optimize_adaptive
from .baselines import BaselineConfig, de_optimize, ga_optimize, hs_optimize
from .data import Dataset, SplitSpec, load_bupa, load_csv, normalize, split
from .fis import FISModel, MembershipFunction, Rule, fire_rules, infer, predict
from .metrics import mse, r_value, rmse
from .one_plus_one_ea import EAConfig, EAResult
from .pso import SwarmConfig, SwarmState, optimize
from .tuner import decode, default_genome, fitness

__all__ = [
    "BaselineConfig",
    "Dataset",
    "EAConfig",
    "EAResult",
    "FISModel",
    "MembershipFunction",
    "MetaConfig",
    "MetaTrace",
    "Rule",
    "SplitSpec",
    "SwarmConfig",
    "SwarmState",
    "TrainConfig",
    "TrainTrace",
    "de_optimize",
    "decode",
    "default_genome",
    "fire_rules",
    "fitness",
    "ga_optimize",
    "hs_optimize",
    "infer",
    "load_bupa",
    "load_csv",
    "lse_consequents",
    "mse",
    "normalize",
    "optimize",
    "optimize_adaptive",
    "predict",
    "premise_gradients",
    "r_value",
    "rmse",
    "split",
    "train",
]
