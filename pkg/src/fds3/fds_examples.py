"""Concrete FDS³ models, their canonical forms and period groups, and the cat map counts."""
from __future__ import annotations

from .catmap import cat_map_fixed_point_count, count_table, enumerate_periodic_points
from .models import (
    MODEL_NAMES,
    canonical_form_check,
    flow_tangency_check,
    make_model,
    make_product_model,
    make_rotation_model,
    make_t3_linear_model,
    make_t3_type2_model,
    make_t3_type3_model,
    period_group,
)

__all__ = [
    "MODEL_NAMES", "canonical_form_check", "cat_map_fixed_point_count", "count_table", "enumerate_periodic_points",
    "flow_tangency_check", "make_model", "make_product_model", "make_rotation_model", "make_t3_linear_model",
    "make_t3_type2_model", "make_t3_type3_model", "period_group",
]
