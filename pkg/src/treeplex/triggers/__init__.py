"""Trigger modifications: enumeration, (lambda, m) profiles, fixed points and best responses."""

from .best_response import (
    TriggerResponse,
    best_trigger_response,
    best_vertex_response,
    trigger_regret_from_cumulative,
    trigger_response_values,
)
from .fixed_point import FIXED_POINT_TOLERANCE, fixed_point, fixed_point_residual
from .profile import (
    TriggerProfile,
    profile_apply,
    profile_from_vertices,
    profile_inner,
    profile_matrix,
    untriggered_loss,
)
from .vertices import (
    DEFAULT_ENUMERATION_CAP,
    TriggerVertex,
    apply_trigger_vertex,
    count_policies,
    count_trigger_vertices,
    enumerate_policies,
    enumerate_subtree_policies,
    enumerate_trigger_vertices,
    trigger_vertex_matrix,
)

__all__ = [
    "TriggerVertex",
    "TriggerProfile",
    "TriggerResponse",
    "DEFAULT_ENUMERATION_CAP",
    "FIXED_POINT_TOLERANCE",
    "enumerate_policies",
    "enumerate_subtree_policies",
    "enumerate_trigger_vertices",
    "count_policies",
    "count_trigger_vertices",
    "apply_trigger_vertex",
    "trigger_vertex_matrix",
    "profile_apply",
    "profile_matrix",
    "profile_inner",
    "profile_from_vertices",
    "untriggered_loss",
    "fixed_point",
    "fixed_point_residual",
    "best_trigger_response",
    "best_vertex_response",
    "trigger_response_values",
    "trigger_regret_from_cumulative",
]
