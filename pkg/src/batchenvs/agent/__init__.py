"""Advantage actor-critic with dense networks and hand-written gradients."""

from batchenvs.agent.checkpoint import CheckpointError
from batchenvs.agent.checkpoint import load as load_checkpoint
from batchenvs.agent.checkpoint import save as save_checkpoint
from batchenvs.agent.config import ConfigError, TrainConfig, load_config, parse_config
from batchenvs.agent.distributions import masked_categorical, masked_greedy, masked_log_softmax
from batchenvs.agent.encoding import ENCODERS, default_encoding, get_encoder
from batchenvs.agent.losses import LossBatch, LossTerms, a2c_loss, compute_advantages, sgd_step
from batchenvs.agent.network import MlpParams, init_mlp, mlp_backward, mlp_forward
from batchenvs.agent.training import EpochRecord, TrainResult, curve_csv, evaluate, random_baseline, train

__all__ = [
    "ENCODERS",
    "CheckpointError",
    "ConfigError",
    "EpochRecord",
    "LossBatch",
    "LossTerms",
    "MlpParams",
    "TrainConfig",
    "TrainResult",
    "a2c_loss",
    "compute_advantages",
    "curve_csv",
    "default_encoding",
    "evaluate",
    "get_encoder",
    "init_mlp",
    "load_checkpoint",
    "load_config",
    "masked_categorical",
    "masked_greedy",
    "masked_log_softmax",
    "mlp_backward",
    "mlp_forward",
    "parse_config",
    "random_baseline",
    "save_checkpoint",
    "sgd_step",
    "train",
]
