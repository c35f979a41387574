"""Log-partition functions over trigger modifications and deterministic policies, with their regularizers."""

from .balanced import balanced_value_at_zero, balanced_weights, log_partition_balanced
from .entropy import (
    balanced_trigger_entropy,
    balanced_trigger_kl,
    dilated_entropy,
    dilated_kl,
    trigger_dilated_entropy,
    trigger_dilated_kl,
)
from .oracle import OracleResult, brute_force_log_partition, vertex_scores
from .trigger import TriggerGradient, incremental_recursion, log_partition_trigger, weighted_log_partition
from .vertex import VertexGradient, kernel_eval, log_kernel_eval, log_partition_vertex

__all__ = [
    "TriggerGradient",
    "VertexGradient",
    "OracleResult",
    "log_partition_trigger",
    "weighted_log_partition",
    "incremental_recursion",
    "log_partition_balanced",
    "balanced_weights",
    "balanced_value_at_zero",
    "log_partition_vertex",
    "kernel_eval",
    "log_kernel_eval",
    "dilated_entropy",
    "dilated_kl",
    "trigger_dilated_entropy",
    "trigger_dilated_kl",
    "balanced_trigger_entropy",
    "balanced_trigger_kl",
    "brute_force_log_partition",
    "vertex_scores",
]
